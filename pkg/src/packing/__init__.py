"""Packing specifications, word balls, orbit enumeration, representation counts and audits."""
