#!/usr/bin/env python3
"""
kleinpack CLI - curvatures, local obstructions and spectral gaps of integral Kleinian packings.
"""
import functools
import sys
from dataclasses import replace
from typing import List, Optional

import click
from rich.console import Console
from rich.table import Table

from src.config.logging import configure_logging, get_logger
from src.config.settings import get_settings
from src.core.exceptions import EXIT_VALIDATION, KleinpackException, NotRationalScaling, ValidationError

console = Console(stderr=True)
logger = get_logger(__name__)

FORMATS = ("csv", "json", "svg")


class KleinpackGroup(click.Group):
    """Unknown subcommands exit with the validation code and the usage text."""

    def resolve_command(self, ctx, args):
        try:
            return super().resolve_command(ctx, args)
        except click.UsageError as exc:
            click.echo(ctx.get_usage(), err=True)
            console.print(f"[bold red]✗ {exc.format_message()}[/bold red]")
            ctx.exit(EXIT_VALIDATION)


def _load_spec(preset_name: Optional[str], d: int, config: Optional[str], budget: Optional[int], word_cap: Optional[int]):
    from src.export.schemas import load_config
    from src.presets import preset

    if config:
        spec = load_config(config)
    else:
        spec = preset(preset_name or "apollonian", d)
    if budget or word_cap:
        spec = replace(spec, budget=budget or spec.budget, word_cap=word_cap or spec.word_cap)
    return spec


def packing_command(func):
    """Shared packing selection, budget and output options; maps errors to exit codes."""

    @click.option("--preset", "preset_name", type=click.Choice(["apollonian", "kapollonian", "cuboctahedral"]),
                  default=None, help="Built-in packing")
    @click.option("--d", "d", type=int, default=1, show_default=True, help="d for kapollonian")
    @click.option("--config", "config", type=click.Path(dir_okay=False), default=None, help="Packing config file")
    @click.option("--budget", type=int, default=None, help="State budget for this run")
    @click.option("--word-cap", "word_cap", type=int, default=None, help="Word length cap")
    @click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout)")
    @click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
    @functools.wraps(func)
    def wrapper(preset_name, d, config, budget, word_cap, out, fmt, **kwargs):
        # --budget rides on the PackingSpec; process settings stay as loaded
        try:
            spec = _load_spec(preset_name, d, config, budget, word_cap)
            text = func(spec=spec, fmt=fmt, word_cap=word_cap, **kwargs)
            _emit(text, out)
        except KleinpackException as exc:
            console.print(f"[bold red]✗ {exc.message}[/bold red]")
            logger.error("command_failed", error=type(exc).__name__, message=exc.message, **_loggable(exc.details))
            sys.exit(exc.exit_code)

    return wrapper


def _loggable(details: dict) -> dict:
    return {k: v for k, v in details.items() if k not in ("event", "level")}


def _emit(text: str, out: Optional[str]):
    from src.export.reports import write_text

    if write_text(text, out) is None:
        click.echo(text, nl=False)
    else:
        console.print(f"[bold green]✓ Wrote {out}[/bold green]")


def _report(data, fmt: str, rows=None) -> str:
    from src.export.reports import render_report

    if fmt == "svg":
        raise ValidationError("svg output is only available for render")
    return render_report(data, fmt, rows)


@click.group(cls=KleinpackGroup)
def cli():
    """kleinpack - integral Kleinian circle packings over imaginary quadratic fields."""
    settings = get_settings()
    configure_logging(settings.log_level, True if settings.log_json else None)


@cli.command("enumerate")
@packing_command
@click.option("--kmax", type=int, required=True, help="Largest scaled |curvature|")
def enumerate_cmd(spec, fmt, word_cap, kmax):
    """Enumerate orbit circles up to a curvature bound."""
    from src.packing.orbit import enumerate_orbit

    orbit = enumerate_orbit(spec, kmax, word_cap)
    console.print(f"[cyan]{len(orbit.circles)} circles, certified={orbit.certified}[/cyan]")
    rows = [oc.to_dict() for oc in orbit.circles]
    return _report(orbit.to_dict(), fmt, rows)


@cli.command("curvatures")
@packing_command
@click.option("--N", "N", type=int, required=True, help="Upper bound")
def curvatures_cmd(spec, fmt, word_cap, N):
    """Distinct curvatures in [0, N]."""
    from src.packing.orbit import curvature_set

    values = curvature_set(spec, N, word_cap)
    return _report({"label": spec.label, "N": N, "curvatures": values}, fmt, [{"curvature": k} for k in values])


@cli.command("obstruction")
@packing_command
@click.option("--p", "p_max", type=int, default=5, show_default=True, help="Test every prime up to this bound")
@click.option("--k-max", "k_max", type=int, default=None, help="Highest prime-power level")
def obstruction_cmd(spec, fmt, word_cap, p_max, k_max):
    """Obstruction modulus L0 and the admissible classes."""
    from src.local.obstruction import obstruction_report

    report = obstruction_report(spec, p_max, k_max)
    table = Table(title=f"Obstruction: {spec.label}")
    table.add_column("p", style="cyan")
    table.add_column("k_p", style="green")
    table.add_column("stabilized")
    for level in report.levels:
        table.add_row(str(level.p), str(level.k_p), str(level.stabilized))
    console.print(table)
    console.print(f"L0 = {report.L0}, admissible mod L0: {sorted(report.admissible_classes)}")
    rows = [{"L0": report.L0, "class": r} for r in sorted(report.admissible_classes)]
    return _report(report.to_dict(), fmt, rows)


@cli.command("tau")
@packing_command
@click.option("--q", "q", type=int, required=True, help="Modulus")
def tau_cmd(spec, fmt, word_cap, q):
    """Local densities tau_q(r) for every residue r."""
    from sympy import isprime

    from src.core.exceptions import BadPrime
    from src.local.densities import density_table, tau_closed_form

    rows = []
    for entry in density_table(spec, q):
        row = entry.to_dict()
        if isprime(q):
            try:
                row["closed_form"] = str(tau_closed_form(spec.field, q, entry.r % q == 0))
            except BadPrime:
                row["closed_form"] = None
        rows.append(row)
    return _report({"label": spec.label, "q": q, "densities": rows}, fmt, rows)


@cli.command("singular")
@packing_command
@click.option("--Q0", "Q0", type=int, required=True, help="Truncation: moduli q < Q0")
@click.option("--n", "n", type=int, required=True, help="Target integer")
@click.option("--x", "x", type=int, default=0, show_default=True)
@click.option("--y", "y", type=int, default=0, show_default=True)
def singular_cmd(spec, fmt, word_cap, Q0, n, x, y):
    """Truncated singular series at n."""
    from src.local.densities import singular_series

    series = singular_series(spec, Q0, n, x, y)
    rows = [{"Q": Q, "partial": str(v)} for Q, v in series.partial_sums()]
    return _report(series.to_dict(), fmt, rows)


@cli.command("expsum")
@packing_command
@click.option("--q", "q", type=int, required=True, help="Modulus")
@click.option("--U", "U", type=int, default=1, show_default=True, help="Unit u coprime to L")
@click.option("--radius", type=int, default=2, show_default=True, help="Word radius of the form family")
def expsum_cmd(spec, fmt, word_cap, q, U, radius):
    """Ramanujan sums mod q and the S_gamma bound audit over the packing's forms."""
    from src.expsums.sums import ramanujan
    from src.expsums.twisted import s_gamma
    from src.forms.shifted import form_family, normalize_primitive

    d1 = spec.denominator_lcm()
    audits = []
    for form in form_family(spec, radius):
        try:
            primitive, _ = normalize_primitive(form, d1)
        except NotRationalScaling:
            logger.debug("form_skipped", form=form.to_dict())
            continue
        value, audit = s_gamma(primitive, q, U, 1, 0, 0, spec.L, spec.field.Delta)
        audits.append({"form": primitive.to_dict(), "value": value.to_dict(), **audit.to_dict()})
    failed = sum(1 for a in audits if not a["holds"])
    console.print(f"[cyan]{len(audits)} forms audited, {failed} violations[/cyan]")
    data = {
        "label": spec.label,
        "q": q,
        "u": U,
        "ramanujan": {n: ramanujan(q, n) for n in range(q)},
        "audits": audits,
    }
    rows = [{"magnitude": a["magnitude"], "bound": a["bound"], "holds": a["holds"]} for a in audits]
    return _report(data, fmt, rows)


@cli.command("count")
@packing_command
@click.option("--T1", "T1", type=int, required=True, help="Norm window of gamma1")
@click.option("--T2", "T2", type=int, required=True, help="Norm window of gamma2")
@click.option("--X", "X", type=int, required=True, help="Range of a and c")
@click.option("--U", "U", type=int, default=None, help="Sieve level for R_N^U")
@click.option("--q", "q", type=int, default=None, help="Also histogram the shifts mod q")
@click.option("--radius", type=int, default=None, help="Word radius (default from settings)")
def count_cmd(spec, fmt, word_cap, T1, T2, X, U, q, radius):
    """Representation counts R_N(n) over the norm ball F_T."""
    from src.packing.counting import (
        check_represented_are_curvatures,
        class_histogram,
        norm_ball_FT,
        representation_counts,
    )
    from src.packing.spec import CircleMethodParams

    try:
        params = CircleMethodParams(T1=T1, T2=T2, X=X)
    except ValueError as exc:
        raise ValidationError(f"Invalid circle-method parameters: {exc}") from exc
    family = norm_ball_FT(spec, T1, T2, word_radius=radius)
    counts = representation_counts(spec, params, U=U, family=family)
    if U is None:
        check_represented_are_curvatures(spec, counts)
    console.print(f"[cyan]|F_T| = {len(family)}, N = {params.N}, support {len(counts)}[/cyan]")
    data = {
        "label": spec.label,
        "T1": T1,
        "T2": T2,
        "X": X,
        "N": params.N,
        "U": U,
        "family": len(family),
        "counts": {str(n): str(r) for n, r in counts.items()},
    }
    if q:
        data["histogram"] = class_histogram(spec, T1, T2, q, family=family)
    rows = [{"n": n, "R": str(r)} for n, r in counts.items()]
    return _report(data, fmt, rows)


@cli.command("spectrum")
@packing_command
@click.option("--q", "q_list", type=int, multiple=True, required=True, help="Moduli (repeatable)")
@click.option("--floor", type=float, default=None, help="Gap floor")
@click.option("--bins", type=int, default=20, show_default=True, help="Histogram bins for csv output")
def spectrum_cmd(spec, fmt, word_cap, q_list, floor, bins):
    """Spectral gaps of the congruence-quotient Cayley graphs."""
    from src.spectral.cayley import cayley_graph, cheeger_audit, eigenvalue_histogram, gap_scan
    from src.local.quotient import quotient_group

    scan = gap_scan(spec, q_list, floor=floor)
    data = scan.to_dict()
    limit = get_settings().cheeger_exact_limit
    for entry, report in zip(data["reports"], scan.reports):
        # dense reports carry the whole spectrum, so their length is the group order
        if report.solver == "dense" and 2 < len(report.eigenvalues) <= limit:
            entry["cheeger"] = cheeger_audit(cayley_graph(quotient_group(spec, report.q)), report).to_dict()
    table = Table(title=f"Spectral gaps: {spec.label}")
    table.add_column("q", style="cyan")
    table.add_column("lambda'_1", style="green")
    table.add_column("gap", style="green")
    for report in scan.reports:
        if report.gap is not None:
            table.add_row(str(report.q), f"{report.lambda1:.6f}", f"{report.gap:.6f}")
    console.print(table)
    rows = [
        {"q": report.q, "lo": lo, "hi": hi, "count": count}
        for report in scan.reports
        for lo, hi, count in eigenvalue_histogram(report, bins)
    ]
    return _report(data, fmt, rows)


@cli.command("iota")
@packing_command
@click.option("--p", "primes", type=int, multiple=True, default=(2, 3), show_default=True, help="Primes (repeatable)")
@click.option("--radius", type=int, default=None, help="Word radius (default from settings)")
def iota_cmd(spec, fmt, word_cap, primes, radius):
    """Upper bounds on the p-adic index of the Lie algebra lattice."""
    from src.local.lie import iota_bound

    radius = radius or get_settings().norm_ball_radius
    bounds = [iota_bound(spec, p, radius).to_dict() for p in primes]
    return _report({"label": spec.label, "bounds": bounds}, fmt, [{"p": b["p"], "bound": b["bound"]} for b in bounds])


@cli.command("render")
@packing_command
@click.option("--kmax", type=int, required=True, help="Largest scaled |curvature|")
@click.option("--x0", type=float, default=0.0, show_default=True)
@click.option("--x1", type=float, default=None, help="Right edge (default: one period)")
@click.option("--height", type=float, default=None, help="Strip height (default: x1 - x0)")
@click.option("--labels/--no-labels", default=True, show_default=True)
@click.option("--scale", "px_scale", type=float, default=400.0, show_default=True, help="Pixels per unit")
def render_cmd(spec, fmt, word_cap, kmax, x0, x1, height, labels, px_scale):
    """SVG picture of the packing in a horizontal strip."""
    from src.export.svg import render_svg
    from src.packing.orbit import enumerate_orbit

    orbit = enumerate_orbit(spec, kmax, word_cap)
    if x1 is None:
        x1 = x0 + float(spec.period or 1)
    if height is None:
        height = x1 - x0
    return render_svg(orbit, x0, x1, height, labels, px_scale)


@cli.command("verify")
@packing_command
def verify_cmd(spec, fmt, word_cap):
    """Exact identity checks on the built-in presets."""
    from src.presets import verify_presets

    report = verify_presets()
    for name, ok in report.checks.items():
        mark = "[bold green]✓[/bold green]" if ok else "[bold red]✗[/bold red]"
        console.print(f"{mark} {name}")
    rows = [{"check": k, "passed": v} for k, v in report.checks.items()]
    return _report(report.to_dict(), fmt, rows)


@cli.command("audit")
@packing_command
@click.option("--N", "Ns", type=int, multiple=True, required=True, help="Bounds (repeatable)")
def audit_cmd(spec, fmt, word_cap, Ns):
    """Exceptional admissible integers below N and their density trend."""
    from src.packing.audit import exceptional_trend

    audits, monotone = exceptional_trend(spec, Ns, word_cap=word_cap)
    data = {"label": spec.label, "monotone": monotone, "audits": [a.to_dict() for a in audits]}
    rows = [{k: v for k, v in a.to_dict().items() if k != "exceptional"} for a in audits]
    return _report(data, fmt, rows)


def run(argv: Optional[List[str]] = None) -> int:
    """Entry point returning the exit code."""
    try:
        code = cli.main(args=argv, prog_name="kleinpack", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return EXIT_VALIDATION
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(run())
