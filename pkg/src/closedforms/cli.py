"""Command-line entry point.

Exit status: 0 success, 1 verification failure, 2 parse error, 3 precondition failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import exactgen, graph, symmetry
from .field import (
    BUILTIN_FIELDS, VectorField, expansion_to_coeffs, is_closed_coeffs, is_closed_symbolic, parse_coefficient_field,
    parse_vector_field,
)
from .hermite import parse_expansion
from .multiindex import decode, enumerate_orbits
from .transport import (
    LatticeFunction, PreconditionError, approximate_exact_sequence, dft_diagonalization_check, unit_circle_roots,
)

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3

DEFAULT_SCHEDULES = {
    1: [(5, 2048, 512), (10, 8192, 2048), (20, 32768, 8192)],
    2: [(4, 128, 32), (8, 256, 64), (16, 512, 128)],
}


class ParseError(ValueError):
    pass


@dataclass
class Report:
    """Collects output as records; renders to human text or ``key=value`` lines."""

    machine: bool
    lines: list[str] = dc_field(default_factory=list)

    def record(self, kind: str, human: str, **fields):
        if self.machine:
            body = " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())
            self.lines.append(f"record={kind} {body}".rstrip())
        else:
            self.lines.append(human)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(str(t) for t in v) or "()"
    return str(v).replace(" ", "")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def load_field(name: str) -> VectorField:
    """A built-in name (``Y0``, ``X0``, ``d0``, ``d3-d0``) or a ``k a_k`` file.

    A missing file whose stem names a built-in resolves to that built-in.
    """
    if name in BUILTIN_FIELDS:
        return BUILTIN_FIELDS[name]
    path = Path(name)
    if not path.exists() and path.stem in BUILTIN_FIELDS:
        return BUILTIN_FIELDS[path.stem]
    try:
        return parse_vector_field(_read(name), path.stem)
    except ValueError as exc:
        raise ParseError(f"{name}: {exc}") from None


def _parse_with(parser, path):
    try:
        return parser(_read(path))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _root_text(phase: float) -> str:
    z = complex(math.cos(phase), math.sin(phase))
    re, im = round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0
    if im == 0:
        return f"{re:g}"
    return f"{re:g}{im:+g}i"


def cmd_orbits(args, rep: Report) -> int:
    for z in enumerate_orbits(args.degree, args.bound):
        rep.record("orbit", f"{' '.join(map(str, z)) or '()'}\t{decode(z)}",
                   cone=tuple(z), representative=decode(z))
    return EXIT_OK


def cmd_roots(args, rep: Report) -> int:
    vf = load_field(args.field)
    roots = unit_circle_roots(vf, tol=args.tol or 1e-9)
    if not roots:
        rep.record("root", f"{vf}: none", field=vf, root="none")
    for phase, mult in roots:
        rep.record("root", f"{_root_text(phase)} (multiplicity {mult})  phase={phase:.12f}",
                   field=vf, phase=phase, multiplicity=mult, root=_root_text(phase))
    return EXIT_OK


def cmd_check_closed(args, rep: Report) -> int:
    vf = load_field(args.field)
    if args.coeffs:
        cf = _parse_with(parse_coefficient_field, args.coeffs)
        res = is_closed_coeffs(vf, cf, tol=args.tol or 1e-9, assume_zero_outside=args.zero_outside)
        for n, I, diff in res.violations:
            rep.record("violation", f"violation n={n} I={I} lhs-rhs={diff}", n=n, I=I, diff=float(diff))
    elif args.expansion:
        exp = _parse_with(parse_expansion, args.expansion)
        res = is_closed_symbolic(vf, exp, args.window)
        for n, m, diff in res.violations:
            rep.record("violation", f"violation n={n} m={m} terms={len(diff)}", n=n, m=m, terms=len(diff))
    else:
        raise ParseError("check-closed needs --coeffs or --expansion")
    rep.record("summary", f"closed={res.ok} checked={res.checked} violations={len(res.violations)} "
               f"window={res.verified_window}",
               closed=int(res.ok), checked=res.checked, violations=len(res.violations),
               verified_window=res.verified_window)
    return EXIT_OK if res.ok else EXIT_VERIFY


def cmd_gen_exact(args, rep: Report) -> int:
    vf = load_field(args.field)
    c = _parse_with(exactgen.parse_orbit_function, args.orbit_fn)
    if c.degree == 0:
        value = exactgen.gen_exact_degree0(vf) * c.values.get((), 0)
        rep.record("constant", f"constant {value}", value=float(value))
        return EXIT_OK
    try:
        cf = exactgen.gen_exact(vf, c, args.window)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    for z, v in cf.values.items():
        rep.record("coeff", f"{' '.join(map(str, z))} {v}", z=z, value=float(v))
    check = is_closed_coeffs(vf, cf)
    rep.record("summary", f"degree={cf.degree} window={cf.window} closed={check.ok}",
               degree=cf.degree, window=cf.window, closed=int(check.ok))
    if args.out_coeffs:
        Path(args.out_coeffs).write_text(cf.dump())
    return EXIT_OK if check.ok else EXIT_VERIFY


def _parse_schedule(text: str, degree: int):
    if text == "default":
        if degree not in DEFAULT_SCHEDULES:
            raise PreconditionError(f"no default schedule for degree {degree}")
        return DEFAULT_SCHEDULES[degree]
    try:
        return [tuple(int(t) for t in stage.split(",")) for stage in text.split(";") if stage]
    except ValueError:
        raise ParseError(f"bad schedule {text!r}; expected 'n,M,i;n,M,i'") from None


def cmd_approximate(args, rep: Report) -> int:
    vf = load_field(args.field)
    cf = _parse_with(parse_coefficient_field, args.coeffs)
    if args.mask and args.grid and args.truncate:
        schedule = [(args.mask, args.grid, args.truncate)]
    else:
        schedule = _parse_schedule(args.schedule, cf.degree)
    stages = approximate_exact_sequence(vf, cf, schedule)
    for s in stages:
        d = s.diagnostics
        rep.record("stage",
                   f"n_mask={s.n_mask:<5d} M={s.M:<6d} i={s.i_trunc:<5d} residual={s.residual:.6e} "
                   f"spectral={d['spectral_residual']:.6e} defect={d['invariance_defect']:.2e}",
                   n_mask=s.n_mask, M=s.M, i=s.i_trunc, residual=s.residual,
                   **{f"solve_{k}": v for k, v in d.items()})
    res = [s.residual for s in stages]
    decreasing = all(b < a for a, b in zip(res, res[1:]))
    rep.record("summary", f"strictly_decreasing={decreasing}", strictly_decreasing=int(decreasing))
    if args.out_c:
        Path(args.out_c).write_text(stages[-1].c.dump(tol=1e-15))
    return EXIT_OK if decreasing else EXIT_VERIFY


def cmd_graph(args, rep: Report) -> int:
    g = graph.build(args.degree, args.bound)
    if args.coeffs:
        g = graph.assign_weights(g, _parse_with(parse_coefficient_field, args.coeffs))
    if args.dump:
        for line in g.dump().splitlines():
            rep.record("edge", line, edge=line.replace(" ", ""))
    comps = graph.component_count(g)
    bij = graph.edge_bijection_check(g, args.window if args.window is not None else args.bound)
    report = graph.cycle_check(g, tol=args.tol or 1e-9)
    rep.record("graph", f"vertices={len(g.vertices)} edges={len(g.edges)} components={comps} bijection={bij}",
               vertices=len(g.vertices), edges=len(g.edges), components=comps, bijection=int(bij))
    for line in report.lines():
        key, val = line.split("=", 1)
        rep.record("cycles", line, **{key: val})
    return EXIT_OK if report.ok and bij else EXIT_VERIFY


def cmd_region(args, rep: Report) -> int:
    region = symmetry.region_P(args.truncate, args.degree)
    for line in region.dump().splitlines():
        rep.record("region", line, line=line.replace(" ", ","))
    return EXIT_OK


def cmd_validate(args, rep: Report) -> int:
    rng = np.random.default_rng(0)
    ok = True

    def check(name, passed):
        nonlocal ok
        ok &= bool(passed)
        rep.record("check", f"{'PASS' if passed else 'FAIL'} {name}", name=name, ok=int(bool(passed)))

    for N in range(2, 6):
        check(f"group_relations_N{N}", symmetry.verify_group_relations(N).ok)
    expected = {"d0": [], "Y0": [(0, 1)], "X0": [(0, 2)], "d3-d0": [(-2 * math.pi / 3, 1), (0, 1), (2 * math.pi / 3, 1)]}
    for name, want in expected.items():
        got = unit_circle_roots(BUILTIN_FIELDS[name])
        check(f"roots_{name}", len(got) == len(want) and all(
            m == wm and abs(p - wp) <= 1e-9 for (p, m), (wp, wm) in zip(got, want)))
    for name in ("Y0", "X0", "d3-d0"):
        vf = BUILTIN_FIELDS[name]
        for N in (1, 2):
            pts = enumerate_orbits(N, 3)
            vals = {pts[int(j)]: int(rng.integers(-3, 4)) for j in rng.choice(len(pts), 3, replace=False)}
            c = exactgen.OrbitFunction(N, vals)
            lattice = exactgen.gen_exact(vf, c)
            sym = exactgen.gen_exact_symbolic(vf, c)
            same = expansion_to_coeffs(sym, N, max(lattice.window, 1) + 4).values == lattice.values
            check(f"construction_{name}_N{N}", same and is_closed_coeffs(vf, lattice).ok)
    for N, M in ((1, 64), (2, 32)):
        c = LatticeFunction((0,) * N, rng.standard_normal((M,) * N))
        check(f"dft_diagonalization_N{N}", dft_diagonalization_check(BUILTIN_FIELDS["X0"], c, M) <= 1e-10)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("human", "machine"), default="human")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float)

    p = argparse.ArgumentParser(prog="closedforms", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("orbits", parents=[common], help="list cone points (orbits) of a degree")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("roots", parents=[common], help="unit-circle roots of the symbol")
    s.add_argument("--field", required=True)
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("check-closed", parents=[common], help="closedness of coefficients or an expansion")
    s.add_argument("--field", required=True)
    s.add_argument("--coeffs")
    s.add_argument("--expansion")
    s.add_argument("--window", type=int, help="shift range for the symbolic check")
    s.add_argument("--zero-outside", action="store_true", help="treat values outside the window as zero")
    s.set_defaults(func=cmd_check_closed)

    s = sub.add_parser("gen-exact", parents=[common], help="exact function from an orbit function")
    s.add_argument("--field", required=True)
    s.add_argument("--orbit-fn", required=True)
    s.add_argument("--window", type=int)
    s.add_argument("--out-coeffs", help="also write the coefficient file here")
    s.set_defaults(func=cmd_gen_exact)

    s = sub.add_parser("approximate", parents=[common], help="approximate a closed field by exact ones")
    s.add_argument("--field", required=True)
    s.add_argument("--coeffs", required=True)
    s.add_argument("--schedule", default="default", help="'default' or 'n,M,i;n,M,i;...'")
    s.add_argument("--mask", type=int)
    s.add_argument("--grid", type=int)
    s.add_argument("--truncate", type=int)
    s.add_argument("--out-c", help="write the last truncated c here")
    s.set_defaults(func=cmd_approximate)

    s = sub.add_parser("graph", parents=[common], help="orbit graph and cycle sums")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--coeffs")
    s.add_argument("--window", type=int)
    s.add_argument("--dump", action="store_true")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("region", parents=[common], help="dump the truncation region P_i")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--truncate", type=int, required=True)
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("validate", parents=[common], help="run the built-in invariant checks")
    s.set_defaults(func=cmd_validate)
    return p


def _validate_numbers(args):
    for name in ("bound", "mask", "grid", "truncate"):
        v = getattr(args, name, None)
        if v is not None and v <= 0:
            raise PreconditionError(f"--{name} must be positive")
    if getattr(args, "degree", None) is not None and args.degree < 0:
        raise PreconditionError("--degree must be nonnegative")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    rep = Report(machine=args.emit == "machine")
    try:
        _validate_numbers(args)
        status = args.func(args, rep)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.out:
        Path(args.out).write_text(rep.text())
    else:
        sys.stdout.write(rep.text())
    return status


if __name__ == "__main__":
    sys.exit(main())
