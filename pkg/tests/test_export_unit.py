"""
Unit Tests for the Export Module

Tests packing config files, report writers and SVG rendering.
"""

import json
import pytest
from fractions import Fraction


GAUSSIAN_CONFIG = """
{
  "schema": 1,
  "d": 1,
  "generators": [
    {"matrix": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]], "name": "S"},
    {"matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]], "name": "T"},
    {"matrix": [[[1, 0], ["-1", 0]], [[0, 0], [1, 0]]], "name": "T^-1"}
  ],
  "bases": [{"selector": "default"}],
  "L": 2,
  "scale": "1",
  "label": "modular"
}
"""


class TestConfig:
    """Tests for parse_config, load_config and dump_config."""

    def test_parse_minimal(self):
        """Test that a hand-written config builds the expected generators."""
        from src.arithmetic.ring import Mat2, field_of
        from src.export.schemas import parse_config

        spec = parse_config(GAUSSIAN_CONFIG)
        F = field_of(1)
        assert spec.label == "modular"
        assert spec.generators[0] == Mat2.of(F, [[0, 1], [-1, 0]])
        assert spec.generators[2] == Mat2.of(F, [[1, -1], [0, 1]])
        assert spec.generator_names == ("S", "T", "T^-1")
        assert spec.scale == 1

    def test_dump_is_stable(self):
        """Test that dumping a parsed dump reproduces the same text."""
        from src.export.schemas import dump_config, parse_config
        from src.presets import cuboctahedral, kapollonian

        for spec in (kapollonian(2), kapollonian(3), cuboctahedral()):
            text = dump_config(spec)
            assert dump_config(parse_config(text)) == text
            assert json.loads(text)["schema"] == 1

    def test_rational_strings(self):
        """Test that "p/q" entries survive a dump."""
        from src.export.schemas import dump_config
        from src.presets import cuboctahedral

        data = json.loads(dump_config(cuboctahedral()))
        entries = [x for g in data["generators"] for row in g["matrix"] for pair in row for x in pair]
        assert any(isinstance(x, str) and "/" in x for x in entries)

    def test_non_square_free_d(self):
        """Test that d = 4 is a validation error, not a parse error."""
        from src.core.exceptions import ParseError, ValidationError
        from src.export.schemas import parse_config

        with pytest.raises(ValidationError) as exc_info:
            parse_config('{"d": 4, "generators": []}')
        assert not isinstance(exc_info.value, ParseError)

    def test_json_error_position(self):
        """Test that malformed JSON reports its line and column."""
        from src.core.exceptions import ParseError
        from src.export.schemas import parse_config

        with pytest.raises(ParseError) as exc_info:
            parse_config('{\n  "d": 1,\n  "generators": [}\n')
        assert exc_info.value.line == 3
        assert exc_info.value.column > 0

    def test_schema_error_names_field(self):
        """Test that a schema violation names the offending field."""
        from src.core.exceptions import ParseError
        from src.export.schemas import parse_config

        with pytest.raises(ParseError) as exc_info:
            parse_config('{"d": 0}')
        assert "d" in exc_info.value.message

    def test_zero_denominator(self):
        """Test that a scale of 1/0 is rejected."""
        from src.core.exceptions import ParseError
        from src.export.schemas import parse_config

        with pytest.raises(ParseError):
            parse_config('{"d": 1, "scale": "1/0"}')

    def test_bad_matrix_shape(self):
        """Test that a 2x1 matrix is rejected."""
        from src.core.exceptions import ParseError
        from src.export.schemas import parse_config

        with pytest.raises(ParseError):
            parse_config('{"d": 1, "generators": [{"matrix": [[[1, 0]], [[0, 0]]]}]}')

    def test_missing_file(self, tmp_path):
        """Test that an unreadable path raises ParseError."""
        from src.core.exceptions import ParseError
        from src.export.schemas import load_config

        with pytest.raises(ParseError):
            load_config(tmp_path / "missing.json")

    def test_load_from_file(self, tmp_path):
        """Test that load_config reads a written config."""
        from src.export.schemas import load_config

        path = tmp_path / "modular.json"
        path.write_text(GAUSSIAN_CONFIG, encoding="utf-8")
        assert load_config(path).label == "modular"

    def test_real_line_selector(self):
        """Test that the real_line base selector places R-hat itself."""
        from src.export.schemas import parse_config
        from src.geometry.moebius import real_line

        spec = parse_config('{"d": 1, "bases": [{"selector": "real_line"}], "scale": 1}')
        assert spec.bases[0].circle(spec.field) == real_line(spec.field)


class TestReports:
    """Tests for the CSV and JSON writers."""

    def test_json_is_sorted(self):
        """Test that JSON output sorts keys and stringifies fractions."""
        from src.export.reports import to_json

        text = to_json({"b": Fraction(1, 3), "a": [Fraction(2)]})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": ["2"], "b": "1/3"}

    def test_csv_cells(self):
        """Test that lists become JSON cells and None becomes empty."""
        from src.export.reports import to_csv

        text = to_csv([{"q": 3, "classes": [0, 1], "note": None}], ["q", "classes", "note"])
        lines = text.splitlines()
        assert lines[0] == "q,classes,note"
        assert lines[1] == '3,"[0, 1]",'

    def test_unknown_format(self):
        """Test that an unsupported format raises ValueError."""
        from src.export.reports import render_report

        with pytest.raises(ValueError):
            render_report({}, "xml")

    def test_write_text(self, tmp_path):
        """Test that write_text writes files and returns None without a path."""
        from src.export.reports import write_text

        assert write_text("x", None) is None
        path = write_text("hello\n", tmp_path / "nested" / "out.txt")
        assert path.read_text(encoding="utf-8") == "hello\n"


class TestSvg:
    """Tests for SVG rendering."""

    def test_viewport_flips_y(self):
        """Test that y grows downward in pixel space."""
        from src.export.svg import Viewport

        view = Viewport(0.0, 2.0, 1.0, 100.0)
        assert view.px(0.0, 0.0) == (0.0, 100.0)
        assert view.px(2.0, 1.0) == (200.0, 0.0)
        assert view.width_px == 200.0

    def test_render_is_deterministic(self, apollonian_spec):
        """Test that two renders of the same orbit are identical."""
        from src.export.svg import render_svg
        from src.packing.orbit import enumerate_orbit

        orbit = enumerate_orbit(apollonian_spec, 20)
        first = render_svg(orbit, 0.0, 1.0, 1.0, labels=True)
        assert first == render_svg(orbit, 0.0, 1.0, 1.0, labels=True)
        assert first.startswith('<?xml version="1.0" encoding="UTF-8"?>')
        assert first.rstrip().endswith("</svg>")
        assert "data-curvature" in first
        assert "<title>apollonian</title>" in first

    def test_labels_toggle(self, apollonian_spec):
        """Test that labels add text elements only when asked."""
        from src.export.svg import render_svg
        from src.packing.orbit import enumerate_orbit

        orbit = enumerate_orbit(apollonian_spec, 20)
        assert "<text" not in render_svg(orbit, 0.0, 1.0, 1.0, labels=False)
        assert "<text" in render_svg(orbit, 0.0, 1.0, 1.0, labels=True)
