"""Command line interface.

Exit codes: 0 ok, 2 parse error, 3 zero form, 4 degenerate input
(a multiple of (x^2+y^2)^(d/2)), 5 invariant violation, 6 search budget
exhausted below the known critical count.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import io
from .critical import (
    GRAD_RTOL,
    BudgetExhausted,
    DegenerateCircle,
    DegenerateInput,
    SearchBudget,
    ZeroForm,
    best_rank_k,
    critical_rank_k,
    eigen_pairs,
)
from .experiments import InvariantViolation, maccioni_sweep, search_table
from .spectral import OddDegree, rez, spectral_decompose

EXIT_OK, EXIT_PARSE, EXIT_ZERO, EXIT_DEGENERATE, EXIT_VIOLATION, EXIT_BUDGET = 0, 2, 3, 4, 5, 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def _common(parser, suppress: bool):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=default("json"))
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text", default=default("json"))
    parser.add_argument("--tol", type=float, default=default(GRAD_RTOL),
                        help="acceptance threshold for gradient and certificate residuals")
    parser.add_argument("--budget", type=int, default=default(None),
                        help="multi-start count (default 200*k)")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False))


def _form_args(parser):
    parser.add_argument("--form", required=True,
                        help="inline JSON (coefficient list c_0..c_d or form object) or a JSON file path")
    parser.add_argument("--degree", type=int, default=None, help="degree, checked against the coefficients")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="binrank", description="Critical rank-k approximations of binary forms.")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("eigen", help="eigenvectors (critical rank-1 tensors)")
    _form_args(s)
    _common(s, True)

    s = sub.add_parser("critical", help="critical rank-k tensors")
    _form_args(s)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--field", choices=("real", "complex"), default="complex")
    _common(s, True)

    s = sub.add_parser("best", help="real critical rank-k tensor nearest to the form")
    _form_args(s)
    s.add_argument("--k", type=int, default=1)
    _common(s, True)

    s = sub.add_parser("spectral", help="decomposition over the critical rank-1 tensors")
    _form_args(s)
    _common(s, True)

    s = sub.add_parser("rez", help="decomposition of (x^2+y^2)^(d/2) over a regular polygon")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--phi", type=float, default=0.0)
    _common(s, True)

    s = sub.add_parser("table", help="search real quartics for the real-count table")
    s.add_argument("--samples", type=int, default=2000, help="random samples (default 2000)")
    s.add_argument("--climb-steps", type=int, default=150)
    s.add_argument("--open-steps", type=int, default=300,
                   help="walk steps spent on each open row")
    s.add_argument("--time-limit", type=float, default=600.0, help="seconds (default 600)")
    s.add_argument("--full", action="store_true", help="use all samples even when every row is found")
    _common(s, True)

    s = sub.add_parser("maccioni", help="real roots versus real eigenvectors sweep")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--d", type=int, default=4)
    _common(s, True)
    return p


# ---------------------------------------------------------------------------
# text rendering


def _num(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}j"


def _lin(l) -> str:
    return f"({_num(l.a)}, {_num(l.b)})"


def _text_eigen(pairs) -> str:
    if isinstance(pairs, DegenerateCircle):
        return f"degenerate circle form: every unit vector is an eigenvector, eigenvalue {pairs.eigenvalue:.10g}"
    lines = [f"{'v':>44}  {'lambda':>22}  mult  real"]
    for e in pairs:
        lines.append(f"{_lin(e.v):>44}  {_num(e.lam):>22}  {e.multiplicity:>4}  {e.is_real}")
    return "\n".join(lines)


def _text_critical(points) -> str:
    lines = []
    for i, c in enumerate(points):
        tag = "boundary" if c.boundary else ("real" if c.is_real else "complex")
        lines.append(f"[{i}] {tag}  distance={c.distance:.10g}  grad={c.grad_residual:.2e}  cert={c.cert_residual:.2e}")
        for mu, l in c.summands:
            lines.append(f"      mu={_num(mu)}  l={_lin(l)}")
        if c.tangent is not None:
            lines.append(f"      tangent nu={_num(c.tangent[0])}  l={_lin(c.tangent[1])}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def _budget(args, k: int) -> SearchBudget:
    return SearchBudget(starts=args.budget, seed=args.seed)


def cmd_eigen(args):
    f = io.load_form(args.form, args.degree)
    pairs = eigen_pairs(f)
    return io.eigen_to_json(pairs), _text_eigen(pairs)


def cmd_critical(args):
    f = io.load_form(args.form, args.degree)
    pts = critical_rank_k(f, args.k, args.field, _budget(args, args.k), tol=args.tol)
    return [io.critical_to_json(c) for c in pts], _text_critical(pts)


def cmd_best(args):
    f = io.load_form(args.form, args.degree)
    c = best_rank_k(f, args.k, _budget(args, args.k), tol=args.tol)
    return io.critical_to_json(c), _text_critical([c])


def cmd_spectral(args):
    f = io.load_form(args.form, args.degree)
    s = spectral_decompose(f)
    obj = {
        "basis": [io.linear_to_json(e.v) for e in s.eigen],
        "eigenvalues": [io.scalar_to_json(e.lam) for e in s.eigen],
        "coeffs": [io.scalar_to_json(c) for c in s.coeffs],
        "residual": s.residual,
        "rank": s.rank,
        "simple": s.simple,
        "hyperplane_residual": s.hyperplane_residual,
    }
    text = "\n".join(
        [f"{'v':>44}  {'coefficient':>22}"]
        + [f"{_lin(e.v):>44}  {_num(c):>22}" for e, c in zip(s.eigen, s.coeffs)]
        + [f"residual {s.residual:.3e}, rank {s.rank}"]
    )
    return obj, text


def cmd_rez(args):
    r = rez(args.d, args.phi)
    obj = {"d": r.d, "phi": r.phi, "c_d": r.c_d,
           "summands": [io.linear_to_json(l) for l in r.summands], "residual": r.residual}
    text = f"c_{r.d} = {r.c_d:.17g} with {len(r.summands)} summands, residual {r.residual:.3e}"
    return obj, text


def cmd_table(args):
    res = search_table(seed=args.seed, samples=args.samples, climb_steps=args.climb_steps,
                       open_steps=args.open_steps, starts=args.budget or 400,
                       time_limit=args.time_limit, stop_when_complete=not args.full)
    rows = []
    lines = [f"{'#real roots':>11} {'#real crit1':>11} {'#real crit2':>11}  known  search"]
    for row in res.rows:
        status = "found" if row.found else f"not found in {res.samples} samples"
        label = row.label()
        rows.append({
            "n_real_roots": row.n_real_roots, "n_real_crit1": row.n_real_crit1,
            "n_real_crit2": row.n_real_crit2, "known": row.known,
            "found": row.found, "status": status,
            "witness": io.form_to_json(row.witness) if row.witness is not None else None,
        })
        lines.append(f"{label[0]:>11} {label[1]:>11} {label[2]:>11}  {'yes' if row.known else '?':>5}  {status}")
    obj = {"rows": rows, "samples": res.samples, "rejected": res.rejected, "time_limited": res.time_limited,
           "other": [{"counts": list(k), "witness": io.form_to_json(v)} for k, v in res.other.items()]}
    lines.append(f"{res.samples} classified samples, {res.rejected} rejected, {res.seconds:.1f} s")
    for k in res.other:
        lines.append(f"also seen: {k}")
    return obj, "\n".join(lines)


def cmd_maccioni(args):
    rep = maccioni_sweep(args.samples, args.seed, args.d)
    obj = {"degree": rep.degree, "samples": rep.samples, "checked": rep.checked, "skipped": rep.skipped,
           "violations": 0,
           "histogram": [{"n_real_roots": a, "n_real_crit1": b, "count": n} for (a, b), n in rep.histogram.items()]}
    text = "\n".join([f"d={rep.degree}: {rep.checked} forms checked, {rep.skipped} skipped, 0 violations"]
                     + [f"  real roots {a}, real eigenvectors {b}: {n}" for (a, b), n in rep.histogram.items()])
    return obj, text


COMMANDS = {
    "eigen": cmd_eigen,
    "critical": cmd_critical,
    "best": cmd_best,
    "spectral": cmd_spectral,
    "rez": cmd_rez,
    "table": cmd_table,
    "maccioni": cmd_maccioni,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = sys.stdout
    try:
        obj, text = COMMANDS[args.cmd](args)
    except io.FormatError as exc:
        print(f"binrank: cannot parse form: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ZeroForm as exc:
        print(f"binrank: {exc}", file=sys.stderr)
        return EXIT_ZERO
    except DegenerateInput as exc:
        print(f"binrank: {exc}", file=sys.stderr)
        if args.fmt == "json":
            out.write(io.dumps({"error": "degenerate_circle", "message": str(exc)}) + "\n")
        return EXIT_DEGENERATE
    except InvariantViolation as exc:
        print(f"binrank: invariant violated: {exc}", file=sys.stderr)
        out.write(io.dumps({"error": "invariant_violation", "message": str(exc),
                            "counterexample": io.form_to_json(exc.form)}) + "\n")
        return EXIT_VIOLATION
    except BudgetExhausted as exc:
        print(f"binrank: {exc}", file=sys.stderr)
        if args.fmt == "json":
            out.write(io.dumps({"budget_exhausted": True, "expected": exc.expected,
                                "points": [io.critical_to_json(c) for c in exc.partial]}) + "\n")
        else:
            out.write(_text_critical(exc.partial) + "\n")
        return EXIT_BUDGET
    except (OddDegree, ValueError) as exc:
        print(f"binrank: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.fmt == "json":
        out.write(io.dumps(obj) + "\n")
    else:
        out.write(text + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
