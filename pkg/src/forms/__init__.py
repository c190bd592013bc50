"""Shifted binary quadratic forms of group elements."""
