"""Command-line front end: ``borel-lab <command> [options]``.

Exit status: 0 on success, 1 when a check or reproduction entry fails,
2 on usage or input errors (message on stderr).
"""

from __future__ import annotations

import csv
import io
import sys
import warnings

import click
import mpmath

from . import __version__
from .bounds import bound_report, expected_ordering, ordering_report
from .expr import ExprError, parse_growth
from .lemma import BelowFloorError, CoarseGridWarning, Variant, VariantSpec, build_cover, measure_bound, scan_violations
from .repro import ScenarioError, example6_scenario, reproduce_all
from .schema import (
    BoundsCompareModel,
    CoverModel,
    ExceptionalSetModel,
    QuantityModel,
    ReproReportModel,
    ScenarioModel,
    dump,
)
from .specfun import DomainError, hurwitz_zeta, riemann_zeta, tower_constant_Se, zeta_gap_quadrature
from .tabulated import TabulatedGrowth

DIGITS_ENV = "BOREL_LAB_DIGITS"

_INPUT_ERRORS = (ValueError, ExprError, DomainError, OverflowError, ArithmeticError)


def _num(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if hasattr(x, "_mpf_"):
        return mpmath.nstr(x, 30)
    return str(x)


def _emit_csv(header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["true" if v is True else "false" if v is False else v for v in row])
    click.echo(buf.getvalue(), nl=False)


def _common(fn):
    fn = click.option(
        "--digits",
        type=click.IntRange(min=15),
        default=30,
        show_default=True,
        envvar=DIGITS_ENV,
        help=f"Significant digits of certified output (env {DIGITS_ENV}).",
    )(fn)
    fn = click.option(
        "--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True
    )(fn)
    return fn


def _growth_options(fn):
    fn = click.option("--T", "expr", help='Growth function of r, e.g. "exp(r)".')(fn)
    fn = click.option(
        "--table",
        type=click.Path(exists=True, dir_okay=False),
        help="Two-column CSV of (r, T) samples, used instead of --T.",
    )(fn)
    return fn


def _variant_options(fn):
    fn = click.option("--variant", required=True, help="borel, nevanlinna, hayman, hanliu, fernandez-arias")(fn)
    fn = click.option("--s", "s", type=float, default=None, help="Variant parameter s > 1.")(fn)
    fn = click.option("--sigma", type=float, default=None, help="Exponent in (0,1) for fernandez-arias.")(fn)
    return fn


def _load_growth(expr: str | None, table: str | None):
    if (expr is None) == (table is None):
        raise click.UsageError("give exactly one of --T or --table")
    if expr is not None:
        return parse_growth(expr), expr
    rs, ts = [], []
    with open(table, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rs.append(float(row[0]))
                ts.append(float(row[1]))
            except (ValueError, IndexError):
                if rs:
                    raise ValueError(f"bad table row {row!r}") from None
                continue  # header line
    return TabulatedGrowth(rs, ts), f"table:{table}"


def _lemma_function(T, variant: VariantSpec, sigma):
    """Fernandez Arias runs the lemma on T**sigma."""
    if variant.kind is Variant.FERNANDEZ_ARIAS:
        if sigma is None:
            raise click.UsageError("fernandez-arias needs --sigma")
        if not 0 < sigma < 1:
            raise ValueError("sigma must lie in (0, 1)")
        return T**sigma
    return T


def _enclosure_output(fmt, quantity, params, enc):
    if fmt == "csv":
        _emit_csv(["quantity", *params, "lo", "hi", "digits"], [[quantity, *params.values(), enc.lo_str(), enc.hi_str(), enc.digits]])
    else:
        click.echo(dump(QuantityModel, {"quantity": quantity, "parameters": params, "enclosure": enc.to_dict()}))
    return 0


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="borel-lab")
def cli():
    """Exceptional sets of Borel-type growth lemmas, with certified constants."""


@cli.command()
@click.option("--s", "s", required=True, help="Real s > 1 (decimal or constant expression).")
@_common
def zeta(s, fmt, digits):
    """Enclosure of the Riemann zeta function at s."""
    return _enclosure_output(fmt, "zeta", {"s": s}, riemann_zeta(s, digits))


@cli.command()
@click.option("--s", "s", required=True, help="Real s > 1.")
@click.option("--a", "a", required=True, help='Shift a > 0, e.g. 2.5 or "sqrt(2)+1".')
@_common
def hurwitz(s, a, fmt, digits):
    """Enclosure of the Hurwitz zeta function zeta(s, a)."""
    return _enclosure_output(fmt, "hurwitz", {"s": s, "a": a}, hurwitz_zeta(s, a, digits))


@cli.command()
@click.option("--s", "s", required=True, help="Real s > 1.")
@_common
def gap(s, fmt, digits):
    """Enclosure of s/(s-1) - zeta(s) via its integral representation."""
    return _enclosure_output(fmt, "gap", {"s": s}, zeta_gap_quadrature(s, digits))


@cli.command("se-constant")
@_common
def se_constant(fmt, digits):
    """Enclosure of the reciprocal exponential-tower sum S_e (digits <= 50)."""
    return _enclosure_output(fmt, "S_e", {}, tower_constant_Se(digits))


@cli.command("exceptional-set")
@_growth_options
@_variant_options
@click.option("--r0", type=float, required=True)
@click.option("--rmax", type=float, required=True)
@click.option("--grid", type=click.IntRange(min=100), default=10_000, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--refine/--no-refine", default=False, help="Han-Liu only: bound by zeta(s, T(r0)^(1/s)).")
@_common
def exceptional_set(expr, table, variant, s, sigma, r0, rmax, grid, tol, workers, refine, fmt, digits):
    """Intervals of [r0, rmax] where the variant inequality fails."""
    T, label = _load_growth(expr, table)
    spec = VariantSpec.of(variant, s)
    U = _lemma_function(T, spec, sigma)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CoarseGridWarning)
        found = scan_violations(U, spec, r0, rmax, grid=grid, tol=tol, workers=workers)
    notes = [str(w.message) for w in caught if issubclass(w.category, CoarseGridWarning)]
    for note in notes:
        click.echo(f"warning: {note}", err=True)
    start = repr(U(r0)) if refine and spec.kind is Variant.HANLIU else None
    bound = measure_bound(spec, start, digits)
    total = found.total_length
    ok = mpmath.mpf(total) <= bound.hi
    if fmt == "csv":
        _emit_csv(["lo", "hi"], [[repr(lo), repr(hi)] for lo, hi in found])
    else:
        click.echo(
            dump(
                ExceptionalSetModel,
                {
                    "T": label,
                    "variant": str(spec),
                    "r0": repr(r0),
                    "r_max": repr(rmax),
                    "intervals": [(repr(lo), repr(hi)) for lo, hi in found],
                    "measure": repr(total),
                    "bound": bound.to_dict(),
                    "pass": bool(ok),
                    "warnings": notes,
                },
            )
        )
    return 0 if ok else 1


@cli.command()
@_growth_options
@_variant_options
@click.option("--r0", type=float, required=True)
@click.option("--rmax", type=float, required=True)
@click.option("--max-steps", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--grid", type=click.IntRange(min=100), default=10_000, show_default=True)
@_common
def cover(expr, table, variant, s, sigma, r0, rmax, max_steps, grid, fmt, digits):
    """Replay the inductive cover [r_j, r'_j] of the exceptional set."""
    T, label = _load_growth(expr, table)
    spec = VariantSpec.of(variant, s)
    U = _lemma_function(T, spec, sigma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoarseGridWarning)
        seq = build_cover(U, spec, r0, rmax, max_steps=max_steps, grid=grid)
    bound = measure_bound(spec, None, digits)
    ok = all(st.length <= st.certified_length_bound * (1 + 1e-9) for st in seq.steps)
    ok = ok and mpmath.mpf(seq.chain_sum) <= bound.hi
    if fmt == "csv":
        _emit_csv(
            ["r", "r_prime", "length", "certified_length_bound", "bracket_fallback"],
            [[repr(st.r), repr(st.r_prime), repr(st.length), repr(st.certified_length_bound), st.bracket_fallback] for st in seq.steps],
        )
    else:
        click.echo(
            dump(
                CoverModel,
                {
                    "T": label,
                    "variant": str(spec),
                    "r0": repr(r0),
                    "r_max": repr(rmax),
                    "exhausted": seq.exhausted,
                    "steps": [
                        {
                            "r": repr(st.r),
                            "r_prime": repr(st.r_prime),
                            "length": repr(st.length),
                            "certified_length_bound": repr(st.certified_length_bound),
                            "bracket_fallback": st.bracket_fallback,
                        }
                        for st in seq.steps
                    ],
                    "total_length": repr(seq.total_length),
                    "chain_sum": repr(seq.chain_sum),
                    "bound": bound.to_dict(),
                    "pass": bool(ok),
                },
            )
        )
    return 0 if ok else 1


@cli.command("bounds-compare")
@click.option("--s", "s", type=float, required=True, help="Parameter s > 1 shared by the four variants.")
@click.option("--t", "t", type=float, default=1e4, show_default=True, help="Value of T(r) when no --T is given.")
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@click.option("--T", "expr", default=None, help="Evaluate both sides at r for this growth function.")
@click.option("--sigma", type=float, default=None, help="With --T, add a fernandez-arias row.")
@_common
def bounds_compare(s, t, r, expr, sigma, fmt, digits):
    """Compare the upper bounds of the variants, optionally against the error term."""
    rows = []
    all_dominated = None
    if expr is None:
        rep = ordering_report(s, t, r)
        for e in rep.entries:
            rows.append({"variant": e.variant.value, "lhs": "", "bound": repr(float(e.value)), "dominated": ""})
        order = [v.value for v in rep.order]
        expected = [v.value for v in expected_ordering(s)] if rep.asymptotic else None
        matches = rep.matches_expected
        t_label = repr(t)
    else:
        T = parse_growth(expr)
        all_dominated = True
        kinds = [Variant.BOREL, Variant.NEVANLINNA, Variant.HAYMAN, Variant.HANLIU]
        specs = [VariantSpec(k, s) for k in kinds]
        if sigma is not None:
            specs.append(VariantSpec(Variant.FERNANDEZ_ARIAS))
        values = []
        for spec in specs:
            try:
                rep = bound_report(T, spec, r, sigma=sigma, digits=digits)
            except BelowFloorError as exc:
                click.echo(f"warning: {spec.kind.value} skipped: {exc}", err=True)
                continue
            claimed = not rep.in_exceptional_set
            if claimed and not rep.dominated:
                all_dominated = False
            rows.append(
                {
                    "variant": spec.kind.value,
                    "lhs": _num(rep.lhs_eq4),
                    "bound": _num(rep.bound_value),
                    "dominated": "true" if rep.dominated else "false",
                    "in_exceptional_set": "true" if rep.in_exceptional_set else "false",
                }
            )
            values.append((rep.bound_value, spec.kind.value))
        order = [name for _, name in sorted(values)]
        expected = None
        matches = None
        t_label = _num(T.evaluate(r, digits))
    if fmt == "csv":
        _emit_csv(["variant", "lhs", "bound", "dominated"], [[x["variant"], x["lhs"], x["bound"], x["dominated"]] for x in rows])
    else:
        click.echo(
            dump(
                BoundsCompareModel,
                {
                    "s": repr(s),
                    "r": repr(r),
                    "t": t_label,
                    "T": expr,
                    "rows": rows,
                    "order": order,
                    "expected_order": expected,
                    "matches_expected": matches,
                    "all_dominated": all_dominated,
                },
            )
        )
    return 0 if all_dominated is not False else 1


@cli.command()
@click.option("--r0", type=float, default=1.0, show_default=True)
@click.option("--gap", "gap", default=None, help="r0' - r0; defaults to the largest admissible value.")
@click.option("--d", "d", default=None, help="Growth rate d instead of --gap, e.g. 1.556.")
@_common
def example6(r0, gap, d, fmt, digits):
    """The fast-growth scenario T(r) = exp(d (r - r0)) with s = 2."""
    if gap is not None:
        gap = float(gap)
    rep = example6_scenario(r0, gap, digits, d=d)
    data = rep.to_dict()
    if fmt == "csv":
        _emit_csv(["id", "pass", "lhs", "rhs"], [[c["id"], c["pass"], c["lhs"], c["rhs"]] for c in data["checks"]])
    else:
        click.echo(dump(ScenarioModel, data))
    return 0 if rep.all_pass else 1


@cli.command()
@_common
def reproduce(fmt, digits):
    """Check every reference constant; exit 1 if any entry fails."""
    rep = reproduce_all(digits)
    data = rep.to_dict()
    if fmt == "csv":
        cols = ["id", "claim", "computed_lo", "computed_hi", "pass"]
        _emit_csv(cols, [[e[c] for c in cols] for e in data["entries"]])
    else:
        click.echo(dump(ReproReportModel, data))
    return 0 if rep.all_pass else 1


def main(argv: list[str] | None = None) -> int:
    try:
        code = cli.main(args=argv, prog_name="borel-lab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        click.echo("aborted", err=True)
        return 2
    except (ScenarioError, *_INPUT_ERRORS) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    if isinstance(code, int):
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
