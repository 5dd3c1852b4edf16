"""Command-line frontend.

Every subcommand builds a report {command, inputs, results, checks} and
writes it as text, JSON or CSV. Exit codes: 0 success, 1 malformed input,
2 precondition violation, 3 failed check.
"""

import argparse
import csv
import io as _io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import alexandrov as al
from . import bodies as bd
from . import cones
from . import exterior as ex
from . import monge_ampere as ma
from . import valuations as va
from .io import (
    MalformedInput,
    fmt,
    load_constform,
    load_max_affine,
    load_polytope,
    load_valuation,
    poly_from_string,
)

__all__ = ["main", "run", "build_parser"]

DEFAULT_SEED = 20240101
EXIT_MALFORMED, EXIT_PRECONDITION, EXIT_CHECK = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInput(message)


def _report(command, inputs):
    return {"command": command, "inputs": inputs, "results": {}, "checks": []}


def _check(report, name, passed, lhs=None, rhs=None, tol=None):
    report["checks"].append({"name": name, "pass": bool(passed), "lhs": _jsonable(lhs), "rhs": _jsonable(rhs), "tol": tol})


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _atoms(measure):
    return [{"point": fmt(list(p)), "mass": fmt(m)} for p, m in measure.atoms]


def _figure_path(args, name):
    base = Path(args.out).parent if args.out else Path(".")
    return base / f"{args.command}-{name}.png"


# ---------------------------------------------------------------------------
# subcommands


def cmd_volume(args):
    p = load_polytope(args.body)
    rep = _report("volume", {"body": args.body})
    rep["results"] = {"volume": str(p.volume), "dim": p.dim, "vertices": len(p.vertices)}
    rep["summary"] = str(p.volume)
    return rep


def cmd_mixed_volume(args):
    ks = [load_polytope(f) for f in args.bodies]
    rep = _report("mixed-volume", {"bodies": args.bodies})
    v = bd.mixed_volume(ks)
    rep["results"] = {"mixed_volume": str(v)}
    rep["summary"] = str(v)
    return rep


def cmd_surface_measure(args):
    p = load_polytope(args.body)
    rep = _report("surface-measure", {"body": args.body})
    m = bd.surface_area_measure(p)
    rep["results"] = {
        "atoms": [
            {"normal": [float(v) for v in u], "mass": float(mass), "area_vector": fmt(list(w))}
            for (u, mass), w in zip(m.atoms, m.area_vectors)
        ],
        "barycenter": fmt(list(m.barycenter())),
    }
    _check(rep, "barycenter_zero", all(c == 0 for c in m.barycenter()), list(m.barycenter()), 0)
    lhs, rhs = bd.minkowski_identity_check(p, p)
    _check(rep, "minkowski_identity", lhs == rhs, lhs, rhs)
    if args.plot and p.n == 2:
        from .plotting import plot_polygon_measure

        rep["figures"] = [plot_polygon_measure(p, m, _figure_path(args, "atoms"))]
    return rep


def cmd_ma(args):
    f = load_max_affine(args.function)
    rep = _report("ma", {"function": args.function, "seed": args.seed})
    m = ma.ma_measure(f)
    total = m.total_mass()
    expected = ma.recession_body(f).volume
    rep["results"] = {"atoms": _atoms(m), "total_mass": str(total), "pieces": len(f.pieces)}
    rep["summary"] = "\n".join(f"({', '.join(map(str, p))}) {q}" for p, q in m.atoms)
    _check(rep, "total_mass_equals_slope_hull_volume", total == expected, total, expected)
    if args.oracle:
        est = ma.ma_oracle(f, samples=args.oracle, seed=args.seed)[0]
        ok = abs(est.mass - float(total)) <= 3 * est.sigma + 1e-12
        rep["results"]["oracle"] = {"mass": est.mass, "sigma": est.sigma}
        _check(rep, "oracle_within_3_sigma", ok, est.mass, float(total), 3 * est.sigma)
    if args.plot and f.n == 2:
        from .plotting import plot_ma

        rep["figures"] = [plot_ma(f, m, _figure_path(args, "atoms"))]
    return rep


def cmd_boundary_ma(args):
    p = load_polytope(args.polytope)
    l = load_polytope(args.body)
    rep = _report("boundary-ma", {"polytope": args.polytope, "body": args.body, "f": args.f})
    m = ma.boundary_ma(p, l)
    rep["results"] = {"atoms": _atoms(m), "total_mass": str(m.total_mass())}
    pairing = m.pair(lambda y: bd.support_eval(l, y))
    _check(rep, "pairing_with_h_L_equals_volume", pairing == l.volume, pairing, l.volume)
    if args.f is not None:
        f = ma.gauge_function(p) if args.f.strip() == "mu" else poly_from_string(args.f, p.n)
        dec = ma.boundary_ma_explicit(p, f)
        rep["results"]["explicit"] = {
            "edges": [{"start": fmt(list(e.start)), "end": fmt(list(e.end)), "density": str(e.density)} for e in dec.edges],
            "atoms": _atoms(dec.atoms),
        }
        rows = []
        for v in p.vertices:
            edge_diff, atom_diff = ma.compare_boundary_definitions(p, f, v)
            rows.append({"vertex": fmt(list(v)), "singular_difference": str(atom_diff), "edge_difference_zero": all(d.is_zero() for d in edge_diff)})
            _check(rep, f"smooth_parts_agree_at_{'_'.join(map(str, v))}", all(d.is_zero() for d in edge_diff))
        rep["results"]["comparison"] = rows
    if args.plot and p.n == 2:
        from .plotting import plot_boundary

        rep["figures"] = [plot_boundary(p, m, _figure_path(args, "atoms"))]
    return rep


def cmd_af_polytope(args):
    rep = _report("af-polytope", {"bodies": args.bodies, "random": args.random, "dim": args.dim, "seed": args.seed})
    if args.bodies:
        ks = [load_polytope(f) for f in args.bodies]
        n = ks[0].n
        if len(ks) != n:
            raise ValueError(f"need exactly {n} bodies")
        triples = [ks]
    else:
        rng = random.Random(args.seed)
        n = args.dim
        triples = [[bd.random_polytope(n, rng, points=n + 3) for _ in range(n)] for _ in range(args.random)]
    violations = 0
    for ks in triples:
        k, l, rest = ks[0], ks[1], ks[2:]
        lhs = bd.mixed_volume([k, l] + rest) ** 2
        rhs = bd.mixed_volume([k, k] + rest) * bd.mixed_volume([l, l] + rest)
        violations += lhs < rhs
        if len(triples) == 1:
            rep["results"] = {"V(K,L,...)^2": str(lhs), "V(K,K,...)V(L,L,...)": str(rhs)}
            _check(rep, "alexandrov_fenchel", lhs >= rhs, lhs, rhs)
    if len(triples) > 1:
        rep["results"] = {"trials": len(triples), "violations": violations}
        _check(rep, "alexandrov_fenchel", violations == 0, violations, 0)
    return rep


def cmd_af_smooth(args):
    rep = _report("af-smooth", {"trials": args.trials, "level": args.level, "dim": args.dim, "seed": args.seed, "tol": args.tol})
    rng = np.random.default_rng(args.seed)
    n = args.dim
    grid = al.SphereGrid.for_level(n, args.level)
    tol = args.tol if args.tol is not None else 1e-6
    failures = 0
    for _ in range(args.trials):
        phis = [al.random_ellipsoid(n, rng) for _ in range(n - 2)]
        failures += not al.af_check(al.random_ellipsoid(n, rng), al.random_ellipsoid(n, rng), phis, grid, tol)
    rep["results"] = {"trials": args.trials, "failures": failures}
    _check(rep, "alexandrov_fenchel_smooth", failures == 0, failures, 0, tol)
    return rep


def cmd_alexandrov_spectrum(args):
    n = args.dim
    rng = np.random.default_rng(args.seed)
    phis = None if args.round or n == 2 else [al.random_ellipsoid(n, rng) for _ in range(n - 2)]
    levels = args.level or [5]
    rep = _report(
        "alexandrov-spectrum",
        {"round": bool(args.round), "levels": levels, "degree": args.degree, "dim": n, "grid": args.grid, "seed": args.seed},
    )
    rows = al.spectrum_report(levels, phis=phis, n=n, max_degree=args.degree, kind=args.grid)
    rep["results"] = {"rows": [_jsonable(r.as_dict()) for r in rows]}
    rep["csv"] = (
        ["level", "n_positive", "n_zero", "n_negative", "min_pos", "max_zero_abs"],
        [[r.level, r.n_positive, r.n_zero, r.n_negative, r.min_pos, r.max_zero_abs] for r in rows],
    )
    for r in rows:
        _check(rep, f"one_positive_level_{r.level}", r.n_positive == 1, r.n_positive, 1)
        _check(rep, f"kernel_level_{r.level}", r.n_zero >= n, r.n_zero, n, r.tol)
        _check(rep, f"symmetry_level_{r.level}", r.symmetry <= 1e-8, r.symmetry, 0, 1e-8)
    if args.plot:
        from .plotting import plot_spectrum

        rep["figures"] = [plot_spectrum([(r.level, r.eigenvalues) for r in rows], [r.tol for r in rows], _figure_path(args, "eigenvalues"))]
    return rep


def cmd_cones_classify(args):
    f = load_constform(args.form)
    rep = _report("cones classify", {"form": args.form, "seed": args.seed})
    sym = cones.is_symmetric(f)
    res = {"n": f.n, "p": f.p, "symmetric": sym}
    if sym:
        res["positive"] = cones.is_positive(f)
        res["strong"] = cones.is_strong(f)
        res["weakly_null"] = cones.is_weakly_null(f)
        w = cones.weak_positivity_search(f, seed=args.seed)
        res["weak_positivity"] = {
            "violation_found": w.violation,
            "certified": w.certified,
            "value": w.value,
            "method": w.method,
            "exact_value": _jsonable(w.exact_value),
        }
        res["trace"] = str(cones.trace(f))
    rep["results"] = res
    return rep


def cmd_valuation(args):
    v = load_valuation(args.valuation)
    rep = _report(f"valuation {args.action}", {"valuation": args.valuation, "bodies": args.bodies})
    bodies = [load_polytope(b) for b in args.bodies]
    if args.action == "eval":
        if len(bodies) != 1:
            raise MalformedInput("valuation eval takes one body")
        value = va.valuation_eval(v, bodies[0])
        rep["results"] = {"value": str(value)}
        rep["summary"] = str(value)
    elif args.action == "decompose":
        if len(bodies) != 1:
            raise MalformedInput("valuation decompose takes one body")
        k = bodies[0]
        parts = va.mcmullen_decompose(v, k)
        doubled = va.mcmullen_decompose(v, k.scale(2))
        rep["results"] = {"theta_p": [str(t) for t in parts]}
        rep["summary"] = " ".join(str(t) for t in parts)
        total = sum(parts, Fraction(0))
        _check(rep, "sum_equals_value", total == va.valuation_eval(v, k), total, va.valuation_eval(v, k))
        for p, (a, b) in enumerate(zip(parts, doubled)):
            _check(rep, f"homogeneity_degree_{p}", b == 2**p * a, b, 2**p * a)
    else:
        if len(bodies) != 2:
            raise MalformedInput("valuation check takes two bodies")
        p, q = bodies
        ok = va.valuation_additivity_check(v, p, q)
        rep["results"] = {"additive": ok}
        _check(rep, "additivity", ok)
        _check(rep, "salee", bd.salee_check(p, q, seed=args.seed))
    return rep


def _selftest_checks(rep, seed):
    rng = random.Random(seed)
    for n in (1, 2, 3):
        a = ex.random_form(n, rng)
        _check(rep, f"d_squared_zero_n{n}", ex.exterior_d(ex.exterior_d(a)).is_zero())
        _check(rep, f"dsharp_squared_zero_n{n}", ex.exterior_dsharp(ex.exterior_dsharp(a)).is_zero())
        lhs = ex.delta(ex.lie_T(a)) - ex.lie_T(ex.delta(a))
        _check(rep, f"delta_T_commutator_n{n}", lhs == ex.delta_sharp(a))
        b = ex.random_form(n, rng, bidegree=(n - 1, n))
        box = ex.Box([Fraction(rng.randint(-2, 0)) for _ in range(n)], [Fraction(rng.randint(1, 3)) for _ in range(n)])
        s1, s2 = ex.super_integrate(ex.exterior_d(b), box), ex.boundary_integrate(b, box)
        _check(rep, f"stokes_n{n}", s1 == s2, s1, s2)
        w = ex.random_form(n, rng, cls=ex.XYForm)
        sign = (-1) ** (n * (n + 1) // 2)
        _check(rep, f"phi_squared_n{n}", ex.phi_inverse(ex.phi_transform(w)) == w and ex._phi_on_superform(ex.phi_transform(w)) == w * sign)
    sq, seg = bd.box([0, 0], [1, 1]), bd.Polytope([[0, 0], [1, 0]])
    _check(rep, "mixed_volume_square_segment", bd.mixed_volume([sq, seg]) == Fraction(1, 2), bd.mixed_volume([sq, seg]), Fraction(1, 2))
    cross = ma.MaxAffine([((1, 1), 0), ((1, -1), 0), ((-1, 1), 0), ((-1, -1), 0)])
    m = ma.ma_measure(cross)
    _check(rep, "ma_of_support_function", m.atoms == [((0, 0), 4)], m.total_mass(), 4)
    t = bd.random_polytope(3, rng)
    _check(rep, "surface_barycenter_zero", all(c == 0 for c in bd.surface_area_measure(t).barycenter()))
    lhs, rhs = bd.minkowski_identity_check(bd.box([0, 0, 0], [1, 1, 1]), t)
    _check(rep, "minkowski_identity", lhs == rhs, lhs, rhs)
    a = bd.box([0, 0], [1, 2])
    lhs = va.valuation_eval(va.valuation_translate(va.lebesgue(2), a), sq)
    rhs = bd.minkowski_sum(sq, a).volume
    _check(rep, "translate_lebesgue", lhs == rhs, lhs, rhs)


def cmd_selftest(args):
    rep = _report("selftest", {"seed": args.seed})
    _selftest_checks(rep, args.seed)
    rep["results"] = {"passed": sum(c["pass"] for c in rep["checks"]), "total": len(rep["checks"])}
    return rep


# ---------------------------------------------------------------------------
# parser and output


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--out", default=None)
    common.add_argument("--plot", action="store_true", help="write matplotlib figures next to --out")

    parser = _Parser(prog="superconvex", description="Superform calculus for convex geometry.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("volume", parents=[common])
    s.add_argument("body")
    s.set_defaults(func=cmd_volume)

    s = sub.add_parser("mixed-volume", parents=[common])
    s.add_argument("bodies", nargs="+")
    s.set_defaults(func=cmd_mixed_volume)

    s = sub.add_parser("surface-measure", parents=[common])
    s.add_argument("body")
    s.set_defaults(func=cmd_surface_measure)

    s = sub.add_parser("ma", parents=[common])
    s.add_argument("function")
    s.add_argument("--oracle", type=int, default=0, metavar="SAMPLES")
    s.set_defaults(func=cmd_ma)

    s = sub.add_parser("boundary-ma", parents=[common])
    s.add_argument("polytope")
    s.add_argument("body")
    s.add_argument("--f", default=None, help="polynomial in x1..xn, or 'mu' for the gauge of P, for the explicit/tropical comparison")
    s.set_defaults(func=cmd_boundary_ma)

    s = sub.add_parser("af-polytope", parents=[common])
    s.add_argument("bodies", nargs="*")
    s.add_argument("--random", type=int, default=20)
    s.add_argument("--dim", type=int, default=2)
    s.set_defaults(func=cmd_af_polytope)

    s = sub.add_parser("af-smooth", parents=[common])
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--level", type=int, default=4)
    s.add_argument("--dim", type=int, default=3)
    s.set_defaults(func=cmd_af_smooth)

    s = sub.add_parser("alexandrov-spectrum", parents=[common])
    s.add_argument("--round", action="store_true")
    s.add_argument("--level", type=int, action="append")
    s.add_argument("--degree", type=int, default=4)
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--grid", choices=["gauss", "icosahedral"], default="gauss")
    s.set_defaults(func=cmd_alexandrov_spectrum)

    s = sub.add_parser("cones", parents=[common])
    csub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("classify", parents=[common])
    c.add_argument("form")
    c.set_defaults(func=cmd_cones_classify, command="cones")

    s = sub.add_parser("valuation", parents=[common])
    s.add_argument("action", choices=["eval", "decompose", "check"])
    s.add_argument("valuation")
    s.add_argument("bodies", nargs="+")
    s.set_defaults(func=cmd_valuation)

    s = sub.add_parser("selftest", parents=[common])
    s.set_defaults(func=cmd_selftest)
    return parser


def render(rep, form):
    if form == "json":
        return json.dumps(_jsonable(rep), indent=2) + "\n"
    if form == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if "csv" in rep:
            header, rows = rep["csv"]
            w.writerow(header)
            w.writerows(rows)
        else:
            w.writerow(["key", "value"])
            for k, v in rep["results"].items():
                w.writerow([k, json.dumps(_jsonable(v))])
            for c in rep["checks"]:
                w.writerow([f"check:{c['name']}", "pass" if c["pass"] else "fail"])
        return buf.getvalue()
    lines = []
    if "summary" in rep:
        lines.append(rep["summary"])
    else:
        for k, v in rep["results"].items():
            lines.append(f"{k}: {json.dumps(_jsonable(v))}")
    for c in rep["checks"]:
        lines.append(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}")
    for fig in rep.get("figures", []):
        lines.append(f"figure: {fig}")
    return "\n".join(lines) + "\n"


def run(argv):
    """Run the CLI; returns (exit code, rendered report or error message)."""
    try:
        args = build_parser().parse_args(argv)
        rep = args.func(args)
    except MalformedInput as exc:
        return EXIT_MALFORMED, f"error: {exc}\n"
    except (ValueError, ZeroDivisionError) as exc:
        return EXIT_PRECONDITION, f"error: {exc}\n"
    text = render(rep, args.format)
    if args.out:
        Path(args.out).write_text(text)
    code = EXIT_CHECK if any(not c["pass"] for c in rep["checks"]) else 0
    return code, text


def main(argv=None):
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code in (EXIT_MALFORMED, EXIT_PRECONDITION) else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
