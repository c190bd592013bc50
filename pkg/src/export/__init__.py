"""Packing config files, report writers and the SVG renderer."""

from src.export.reports import render_report, to_csv, to_json, write_text
from src.export.schemas import PackingConfig, dump_config, load_config, parse_config
from src.export.svg import Viewport, render_svg, viewport_circles

__all__ = [
    "PackingConfig",
    "dump_config",
    "load_config",
    "parse_config",
    "render_report",
    "to_csv",
    "to_json",
    "write_text",
    "Viewport",
    "render_svg",
    "viewport_circles",
]
