"""Command-line front end.

Exit status: 0 on success, 1 when a mathematical identity check comes out
false, 2 on bad usage.  All numbers are printed as exact ``num/den`` strings.
"""

from __future__ import annotations

import os

if os.environ.get("VOA_THREADS"):
    os.environ.setdefault("NUMBA_NUM_THREADS", os.environ["VOA_THREADS"])

import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import bkm

FALSIFIED = 1


class Falsified(click.ClickException):
    exit_code = FALSIFIED


def _fail_usage(msg: str):
    raise click.UsageError(msg)


def _lattice(spec: str):
    from .lattice import build_lattice, lattice_from_json

    try:
        if Path(spec).is_file():
            return lattice_from_json(Path(spec).read_text())
        return build_lattice(spec)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail_usage(f"bad --lattice {spec!r}: {exc}")


def _coords(text: str | None, name: str):
    if text is None:
        _fail_usage(f"--{name} is required")
    try:
        return [Fraction(x) for x in text.replace(",", " ").split()]
    except ValueError:
        _fail_usage(f"--{name} must be a comma-separated list of rationals")


def _matrix(text: str, name: str) -> list[list[int]]:
    try:
        return [[int(x) for x in row.replace(",", " ").split()] for row in text.split(";")]
    except ValueError:
        _fail_usage(f"--{name} must look like '2,-1;-1,2'")


def _fs(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _emit(ctx: click.Context, data, text: str | None = None) -> None:
    if ctx.obj["json"] or text is None:
        click.echo(json.dumps(data, sort_keys=True, indent=1))
    else:
        click.echo(text)


def _series_table(s) -> dict:
    """Coefficients of a one-variable series keyed by exponent string."""
    return {_fs(e): _fs(s[e]) for e in sorted(Fraction(k[0], 2) for k in s.terms)}


def _series_text(table: dict) -> str:
    return "\n".join(f"q^{e}: {c}" for e, c in table.items())


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of plain text.")
@click.option("--budget", type=int, default=None, help="Cap on weights, norms or orders explored.")
@click.pass_context
def cli(ctx, as_json, budget):
    """Exact computations in lattice vertex algebras and their BKM algebras."""
    ctx.obj = {"json": as_json, "budget": budget}


@cli.command()
@click.argument("name", type=click.Choice(["j", "eta24", "e4", "e6", "ns", "tau"]))
@click.option("--order", type=int, default=5, show_default=True, help="Exact below q^order.")
@click.pass_context
def series(ctx, name, order):
    """Print a named q-series: j - 720, 1/eta^24, E4, E6, the NS multiplicity series, or Delta."""
    from . import series as S

    if order < 0:
        _fail_usage("--order must be non-negative")
    s = {
        "j": lambda: S.j_minus_720(order),
        "eta24": lambda: S.partitions_colored(24, order),
        "e4": lambda: S.eisenstein(4, order),
        "e6": lambda: S.eisenstein(6, order),
        "ns": lambda: S.ns_multiplicity_series(order),
        "tau": lambda: S.ExactSeries.from_list([0] + [S.ramanujan_tau(n) for n in range(1, order)], order=order),
    }[name]()
    table = _series_table(s)
    _emit(ctx, {"series": name, "order": order, "coefficients": table}, _series_text(table))


@cli.command()
@click.option("--lattice", "lat", required=True, help="Lattice name (e.g. E8, leech) or JSON file.")
@click.option("--order", type=int, default=3, show_default=True)
@click.pass_context
def theta(ctx, lat, order):
    """Theta series of a positive-definite even lattice."""
    from .lattice import theta_series

    L = _lattice(lat)
    try:
        s = theta_series(L, order)
    except ValueError as exc:
        _fail_usage(str(exc))
    table = _series_table(s)
    _emit(ctx, {"lattice": L.label, "order": order, "coefficients": table}, _series_text(table))


@cli.command()
@click.option("--lattice", "lat", required=True)
@click.option("--alpha", required=True, help="First lattice vector, comma separated.")
@click.option("--beta", required=True, help="Second lattice vector.")
@click.option("--gamma", default=None, help="Optional third vector for the cocycle condition.")
@click.pass_context
def cocycle(ctx, lat, alpha, beta, gamma):
    """Cocycle value eps(alpha, beta) and a check of its defining properties."""
    from .lattice import cocycle as make

    L = _lattice(lat)
    a, b = _coords(alpha, "alpha"), _coords(beta, "beta")
    c = _coords(gamma, "gamma") if gamma else None
    if any(len(v) != L.rank for v in (a, b) + ((c,) if c else ())):
        _fail_usage("vector length does not match the lattice rank")
    eps = make(L)
    ok = eps.check(a, b, c)
    _emit(ctx, {"eps": eps(a, b), "checks": ok}, f"eps = {eps(a, b)}; properties hold: {ok}")
    if not ok:
        raise Falsified("cocycle conditions fail")


@cli.command()
@click.option("--lattice", "lat", required=True)
@click.option("--alpha", required=True)
@click.option("--model", type=click.Choice(["n0", "n1", "n2"]), default="n0", show_default=True)
@click.option("--weight", default=None, help="Conformal weight (default 1 for n0, 1/2 for n1).")
@click.pass_context
def physical(ctx, lat, alpha, model, weight):
    """Dimension of the physical space over e^alpha and of its quotient by the radical."""
    from .fock import physical_basis, quotient_dimension, radical_split
    from .superfock import physical_basis_n2, physical_basis_ns

    L = _lattice(lat)
    a = _coords(alpha, "alpha")
    if len(a) != L.rank:
        _fail_usage("--alpha length does not match the lattice rank")
    try:
        if model == "n0":
            w = Fraction(weight or 1)
            pb = physical_basis(L, a, w)
        elif model == "n1":
            w = Fraction(weight or "1/2")
            pb = physical_basis_ns(L, a, w)
        else:
            w = Fraction(0)
            pb = physical_basis_n2(L, a)
    except ValueError as exc:
        _fail_usage(str(exc))
    quot = radical_split(pb)[0]
    data = {"model": model, "weight": _fs(w), "physical": pb.dim, "quotient": quot}
    if model == "n0" and w == 1:
        alt = quotient_dimension(L, a, 1)
        data["quotient_second_route"] = alt
        if alt != quot:
            _emit(ctx, data)
            raise Falsified("the two quotient-dimension routes disagree")
    _emit(ctx, data, " ".join(f"{k}={v}" for k, v in sorted(data.items())))


@cli.command()
@click.option("--lattice", "lat", required=True)
@click.option("--alpha", required=True, help="Point of the state e^alpha the operator acts on.")
@click.option("--c", "cvec", required=True, help="Isotropic vector c with (c, alpha) = 1.")
@click.option("--a", "avec", required=True, help="Transverse direction a.")
@click.option("--m", "mode", required=True, help="Mode index (half-integer for B in n1).")
@click.option("--model", type=click.Choice(["n0", "n1"]), default="n0", show_default=True)
@click.pass_context
def ddf(ctx, lat, alpha, cvec, avec, mode, model):
    """Apply a DDF operator to the ground state e^alpha."""
    from .fock import FockVector, ddf_A, frame_for
    from .superfock import SuperVector, ddf_A_ns, ddf_B_ns

    fr = frame_for(_lattice(lat))
    a, c, al = _coords(avec, "a"), _coords(cvec, "c"), _coords(alpha, "alpha")
    m = Fraction(mode)
    try:
        if model == "n0":
            if m.denominator != 1:
                _fail_usage("bosonic DDF modes are integers")
            out = ddf_A(a, int(m), c, FockVector.vacuum(fr, al), ctx.obj["budget"])
        elif m.denominator == 1:
            out = ddf_A_ns(a, int(m), c, SuperVector.vacuum(fr, al), ctx.obj["budget"])
        else:
            out = ddf_B_ns(a, m, c, SuperVector.vacuum(fr, al), ctx.obj["budget"])
    except ValueError as exc:  # BudgetError included
        _fail_usage(str(exc))
    _emit(ctx, out.to_dict(), repr(out))


@cli.command()
@click.option("--lattice", "lat", required=True)
@click.option("--x", "xv", required=True, help="Lattice point of the first ground state e^x.")
@click.option("--y", "yv", required=True, help="Lattice point of the second ground state e^y.")
@click.option("--model", type=click.Choice(["n0", "n1", "n2"]), default="n0", show_default=True)
@click.pass_context
def bracket(ctx, lat, xv, yv, model):
    """Bracket of two ground states e^x, e^y in the Fock space."""
    from .fock import FockVector, bracket_p1, frame_for
    from .superfock import SuperVector, n2_bracket, ns_bracket

    fr = frame_for(_lattice(lat))
    x, y = _coords(xv, "x"), _coords(yv, "y")
    try:
        if model == "n0":
            out = bracket_p1(FockVector.vacuum(fr, x), FockVector.vacuum(fr, y), ctx.obj["budget"])
        elif model == "n1":
            out = ns_bracket(SuperVector.vacuum(fr, x), SuperVector.vacuum(fr, y), ctx.obj["budget"])
        else:
            out = n2_bracket(SuperVector.vacuum(fr, x), SuperVector.vacuum(fr, y), ctx.obj["budget"])
    except ValueError as exc:  # BudgetError included
        _fail_usage(str(exc))
    _emit(ctx, out.to_dict(), repr(out))


_N2_TOKEN = re.compile(r"^(-?\d*)([uv]):(-?\d+(?:/\d+)?)$")


def _n2_point(text: str):
    """``u:r`` or ``v:r``, optionally with an integer multiple (``-2u:1/3``), or a matrix ``a,b;c,d``."""
    from .n2algebra import N2Point, ur_vr

    m = _N2_TOKEN.match(text.replace(" ", ""))
    try:
        if m:
            k = {"": 1, "-": -1}.get(m.group(1)) or int(m.group(1))
            u, v = ur_vr(Fraction(m.group(3)))
            return k * (u if m.group(2) == "u" else v)
        return N2Point(_matrix(text, "x"))
    except (ValueError, ZeroDivisionError) as exc:
        _fail_usage(f"bad point {text!r}: {exc}")


@cli.group()
def n2():
    """The N=2 algebra on null vectors of II_{2,2}."""


@n2.command("bracket")
@click.option("--x", "xs", required=True, help="e.g. u:1, v:1/2, -2u:3 or 1,2;0,0")
@click.option("--y", "ys", required=True)
@click.pass_context
def n2_bracket_cmd(ctx, xs, ys):
    """Closed-form bracket [e^x, e^y]."""
    from .n2algebra import N2Element, g2_bracket

    out = g2_bracket(N2Element.basis(_n2_point(xs)), N2Element.basis(_n2_point(ys)))
    _emit(ctx, out.to_dict(), repr(out))


@n2.command("classify")
@click.option("--x", "xs", required=True)
@click.pass_context
def n2_classify(ctx, xs):
    """Which component (center, A0, A_r, Ainf) a null vector lies in."""
    from .n2algebra import classify

    tag = classify(_n2_point(xs))
    data = {"component": "A", "r": _fs(tag[1])} if isinstance(tag, tuple) else {"component": tag}
    _emit(ctx, data, "A_" + data["r"] if "r" in data else tag)


@n2.command("sl2")
@click.option("--x", "xs", required=True)
@click.option("--matrix", "mat", required=True, help="SL(2,Z) matrix 'a,b;c,d'.")
@click.option("--side", type=click.Choice(["left", "right"]), default="left", show_default=True)
@click.pass_context
def n2_sl2(ctx, xs, mat, side):
    """Image of e^x under the left or right SL(2, Z) action."""
    from .n2algebra import N2Element, sl2_left, sl2_right

    x = N2Element.basis(_n2_point(xs))
    try:
        out = (sl2_left if side == "left" else sl2_right)(_matrix(mat, "matrix"), x)
    except ValueError as exc:
        _fail_usage(str(exc))
    _emit(ctx, out.to_dict(), repr(out))


@cli.command("bkm")
@click.option("--matrix", "mat", required=True, help="Square matrix 'a,b;c,d'.")
@click.pass_context
def bkm_cmd(ctx, mat):
    """Decide whether a matrix satisfies the BKM conditions."""
    try:
        ok, problems = bkm.is_bkm_matrix(_matrix(mat, "matrix"))
    except ValueError as exc:
        _fail_usage(str(exc))
    _emit(ctx, {"bkm": ok, "problems": problems}, "BKM matrix" if ok else "not BKM: " + "; ".join(problems))


def _expansion_data(exp: bkm.Expansion) -> dict:
    s = exp.series
    return {
        "vars": list(s.variables),
        "prefactor": {k: _fs(v) for k, v in sorted(exp.prefactor.items())},
        "dropped": exp.dropped,
        "terms": [[_fs(Fraction(e, 2)) for e in k] + [_fs(c)] for k, c in sorted(s.terms.items())],
    }


def _expansion_text(data: dict) -> str:
    pre = " ".join(f"{k}^{v}" for k, v in data["prefactor"].items())
    lines = [f"prefactor {pre}; dropped null factors {data['dropped']}"]
    for t in data["terms"]:
        lines.append(f"{t[-1]} * " + " ".join(f"{v}^{e}" for v, e in zip(data["vars"], t[:-1])))
    return "\n".join(lines)


def _root_system(name: str):
    from .lattice import root_system

    try:
        return root_system(name)
    except (ValueError, KeyError) as exc:
        _fail_usage(f"bad --roots {name!r}: {exc}")


@cli.command()
@click.option("--model", type=click.Choice(["affine", "gritsenko", "fake-monster"]), default="affine",
              show_default=True)
@click.option("--roots", default="A1", show_default=True, help="Root system, e.g. A1 or E8^3.")
@click.option("--v0", "v0", default="0", show_default=True,
              help="Index of a simple root, or explicit coordinates, to specialise along.")
@click.option("--order", type=int, default=4, show_default=True, help="q order.")
@click.option("--s-order", type=int, default=1, show_default=True, help="s order (fake-monster only).")
@click.pass_context
def denominator(ctx, model, roots, v0, order, s_order):
    """Product side of a denominator identity, specialised to (q, xi[, s])."""
    rs = _root_system(roots)
    if "," in v0 or " " in v0.strip():
        vec = _coords(v0, "v0")
    else:
        try:
            vec = rs.simple_roots[int(v0)]
        except (ValueError, IndexError):
            _fail_usage("--v0 must be a simple-root index or a coordinate list")
    try:
        if model == "affine":
            exp = bkm.affine_denominator(rs, order, vec)
        elif model == "gritsenko":
            exp = bkm.gritsenko_psi(rs, vec, order)
        else:
            kw = {"max_norm": ctx.obj["budget"]} if ctx.obj["budget"] else {}
            exp = bkm.borcherds_expand(rs, vec, s_order, order, **kw)
    except ValueError as exc:  # BudgetError included
        _fail_usage(str(exc))
    data = _expansion_data(exp)
    _emit(ctx, data, _expansion_text(data))


@cli.command()
@click.option("--l", "l", type=int, required=True, help="Hecke index l >= 1.")
@click.option("--form", type=click.Choice(["phi-2-1", "theta-quotient"]), default="phi-2-1", show_default=True)
@click.option("--roots", default="E8", show_default=True, help="Root lattice for theta-quotient.")
@click.option("--order", type=int, default=10, show_default=True, help="q order of the input form.")
@click.pass_context
def hecke(ctx, l, form, roots, order):
    """Apply T_l to a Jacobi form, printing weight, index and coefficients."""
    if l < 1 or order < 1:
        _fail_usage("--l and --order must be positive")
    if form == "phi-2-1":
        phi = bkm.phi_minus2_1(order)
    else:
        rs = _root_system(roots)
        phi = bkm.theta_quotient_phi(rs.lattice, rs.simple_roots[0], order)
    out = bkm.hecke_Tl(phi, l)
    data = {"weight": out.weight, "index": _fs(out.index), "order": out.order,
            "coefficients": [[n, r, _fs(c)] for (n, r), c in sorted(out.coeffs.items())]}
    text = "\n".join([f"weight {out.weight}, index {_fs(out.index)}, exact below q^{out.order}"]
                     + [f"c({n},{r}) = {c}" for n, r, c in data["coefficients"]])
    _emit(ctx, data, text)


@cli.command()
@click.option("--order", type=int, default=2, show_default=True)
@click.pass_context
def character(ctx, order):
    """Coefficients c(mn) of j - 720, each confirmed by a Leech-lattice sum."""
    if order < 0:
        _fail_usage("--order must be non-negative")
    try:
        table = bkm.fake_monster_character(max(order, 1))
    except bkm.IdentityFailure as exc:
        raise Falsified(str(exc))
    vals = sorted({m * n: v for (m, n), v in table.items() if m * n <= order}.items())
    data = {"order": order, "coefficients": {str(k): _fs(v) for k, v in vals}}
    _emit(ctx, data, "\n".join(f"c({k}) = {_fs(v)}" for k, v in vals))


@cli.command("verify-all")
@click.option("--level", type=click.Choice(["desk"]), default="desk", show_default=True)
@click.option("--only", default=None, help="Comma-separated criterion numbers to run.")
@click.pass_context
def verify_all(ctx, level, only):
    """Run the acceptance suite, one PASS/FAIL line per criterion."""
    from .acceptance import run_all

    try:
        picked = {int(x) for x in only.split(",")} if only else None
    except ValueError:
        _fail_usage("--only takes numbers like 1,3,10")
    results = run_all(picked, echo=None if ctx.obj["json"] else click.echo)
    if ctx.obj["json"]:
        click.echo(json.dumps([{"criterion": n, "passed": ok, "line": line} for n, ok, line in results],
                              indent=1))
    if not all(ok for _, ok, _ in results):
        sys.exit(FALSIFIED)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="latvoa", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


def run(argv) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
