"""Command-line front end.

Exit codes: 0 when every check is satisfied, 1 when a violation was
confirmed (expected for ``--force`` and remark runs), 2 for usage or domain
errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction

from . import families as fam
from . import numerics as nm
from . import propositions as props
from . import search
from .errors import BracketInvalid, DegenerateGamma, HypothesisViolated, NonPositiveInput
from .numerics import Verdict
from .propositions import PredicateId
from .reports import RunReport

CSV_HEADER = ["n", "alpha", "predicate", "min_margin", "violations", "evaluations"]


class UsageError(Exception):
    pass


def parse_exact(text: str) -> Fraction:
    """A decimal or a rational such as ``3/2``, kept exact."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_number(text: str) -> float:
    return float(parse_exact(text))


def parse_list(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    if ":" not in text:
        return parse_list(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (parse_number(p) for p in parts)
    if step <= 0 or stop < start:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def parse_ints(text: str) -> list[int]:
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _margin_line(label, m):
    return f"{label}: margin {m.value:.12g} ({m.verdict.value}, {m.precision})"


# --- subcommands -------------------------------------------------------------------


def cmd_eval(args) -> tuple[RunReport, int]:
    exact = [parse_exact(t) for t in args.x.split(",") if t.strip()]
    p = nm.make_point(exact)
    values = [float(v) for v in exact]
    alpha = parse_number(args.alpha)
    terms = [nm.eval_term(p, i, alpha) for i in range(p.n)]
    total = nm.eval_sum(p, alpha)
    feasible = nm.is_feasible(p)
    result = {
        "x": values,
        "alpha": alpha,
        "terms": terms,
        "sum": total,
        "log_product": nm.log_product(p),
        "feasible": feasible,
    }
    for i, t in enumerate(terms):
        print(f"term[{i}] = {t:.15g}")
    print(f"sum = {total:.15g}")
    print(f"feasible = {feasible}")
    code = 0
    try:
        m = props.check_prop1(p, alpha, force=args.force, precision=_precision(args))
    except HypothesisViolated as exc:
        result["prop1"] = {"skipped": str(exc)}
        print(f"Prop1: not applicable ({exc})")
    else:
        result["prop1"] = m.to_dict()
        print(_margin_line("Prop1", m))
        code = 1 if m.verdict is Verdict.VIOLATED else 0
    return RunReport("eval", {"x": values, "alpha": alpha}, [result]), code


def _precision(args):
    return "extended" if args.precision == "extended" else "auto"


def _predicate_from_args(args) -> PredicateId:
    if args.pred:
        return PredicateId.parse(args.pred)
    return PredicateId.PROP2 if args.prop == 2 else PredicateId.PROP1


def _chain_cells(n, alpha):
    """Predicates (with their parameter) that the proof uses at this alpha."""
    split = nm.case_split(n)
    beta = 2.0 - alpha
    cells = []
    if n >= 2 and alpha <= split:
        cells += [(PredicateId.INEQ2, alpha), (PredicateId.INEQ3, beta)]
        if 0 <= beta <= 1:
            cells += [(PredicateId.INEQ4, beta), (PredicateId.INEQ5, beta)]
        if 1.0 / (1 - n) <= beta <= 0:
            cells += [(PredicateId.INEQ6, beta), (PredicateId.INEQ7, beta)]
    if n >= 2 and alpha >= split:
        cells += [(PredicateId.INEQ8, alpha), (PredicateId.INEQ9, alpha),
                  (PredicateId.AMGM_AGEG, alpha)]
    return cells


def cmd_verify(args) -> tuple[RunReport, int]:
    pred = _predicate_from_args(args)
    param_name = props.get_predicate(pred).param
    if args.beta is not None:
        params = parse_grid(args.beta)
        if param_name != "beta":
            raise UsageError(f"{pred.value} takes --alpha, not --beta")
    elif args.alpha is not None:
        params = parse_grid(args.alpha)
        if param_name != "alpha":
            raise UsageError(f"{pred.value} takes --beta, not --alpha")
    else:
        raise UsageError("give --alpha or --beta")
    if not params:
        raise UsageError("empty parameter grid")
    results = []
    violations = 0
    for k, param in enumerate(params):
        cells = [(pred, param)]
        if args.chain:
            if pred is not PredicateId.PROP1:
                raise UsageError("--chain applies to Proposition 1")
            cells = _chain_cells(args.n, param) + cells
        for pid, value in cells:
            summary = search.fuzz(
                pid, args.n, value, count=args.count, seed=args.seed + k,
                log_range=args.log_range, mode=args.mode, force=args.force,
                extra_points=search.family_seeds(pid, args.n, value),
                precision=_precision(args),
            )
            violations += summary.violations
            results.append(summary)
            print(f"{pid.value} n={args.n} {props.get_predicate(pid).param}={value:g}: "
                  f"min margin {summary.min_margin.value:.6g}, "
                  f"{summary.violations} confirmed violations over {summary.evaluations} evaluations")
    config = {"n": args.n, "predicate": pred.value, "params": params, "count": args.count,
              "chain": args.chain, "mode": args.mode, "log_range": args.log_range}
    return RunReport("verify", config, results), 1 if violations else 0


def cmd_family(args) -> tuple[RunReport, int]:
    remark = args.remark
    results = []
    code = 0
    if remark == "a":
        n = args.n or 3
        beta = parse_number(args.beta) if args.beta is not None else -1.0
        xs = parse_list(args.x) if args.x else [0.5, 2.0]
        for x in xs:
            f = fam.RemarkAFamily(n, x, beta)
            d = fam.remark_a_difference(f)
            results.append({"n": n, "beta": beta, "x": x, "difference": d})
            print(f"D(n={n}, beta={beta:g}, x={x:g}) = {d:.15g}")
        dirs = fam.remark_a_limit_direction(n, beta)
        results.append({"limit_directions": [d.value for d in dirs]})
        print("limits: " + ", ".join(d.value for d in dirs))
    elif remark == "b":
        n = args.n or 3
        alphas = parse_list(args.alpha) if args.alpha else [1.2, 1.1, 1.05]
        A, G = fam.remark_b_constants(n)
        print(f"A = {A:.15g}, G = {G:.15g}")
        for a in alphas:
            m = fam.remark_b_violation(n, a, precision=_precision(args))
            results.append({"n": n, "alpha": a, "A": A, "G": G, "margin9": m.to_dict()})
            print(_margin_line(f"(9) at alpha={a:g}", m) + f"; left {m.lhs:.6g}, right {m.rhs:.6g}")
            if m.verdict is Verdict.VIOLATED:
                code = 1
    elif remark == "c":
        n = args.n or 3
        alpha = nm.case_split(n)
        print(f"alpha = {alpha:.15g}, gamma = {nm.gamma_of(n, alpha):.15g}")
        for pid in (PredicateId.INEQ8, PredicateId.INEQ2):
            s = search.fuzz(pid, n, alpha, count=args.count, seed=args.seed, force=args.force,
                            precision=_precision(args))
            results.append(s)
            print(f"{pid.value}: {s.violations} confirmed violations over {s.evaluations} points")
            if s.violations:
                code = 1
    else:
        n = args.n or 3
        x = parse_number(args.x) if args.x else 1.2
        alphas = parse_list(args.alpha) if args.alpha else [-10.0, -20.0, -40.0]
        limit = fam.remark_d_limit(n, x)
        table = fam.remark_d_convergence(n, x, alphas)
        print(f"limit n - 1 - x^n/(n-1) = {limit:.15g}")
        for a, v in table:
            print(f"alpha = {a:g}: sum = {v:.15g}, gap = {v - limit:.3e}")
        results.append({"n": n, "x": x, "limit": limit,
                        "table": [{"alpha": a, "sum": v, "gap": v - limit} for a, v in table]})
        if any(v > 0 for _, v in table):
            code = 1
    return RunReport("family", {"remark": remark, "n": args.n}, results), code


def cmd_bisect(args) -> tuple[RunReport, int]:
    if args.case == "2":
        if args.n < 3:
            raise UsageError("for n = 2, (8) holds for every alpha >= 1; there is no threshold")
        est = search.bisect_alpha_n_case2(args.n, args.tol, args.budget, args.seed,
                                          restarts=args.restarts, workers=args.workers)
    else:
        if args.n < 3:
            raise UsageError("the reverse threshold needs n >= 3")
        est = search.bisect_alpha_n_reverse(args.n, args.tol, args.budget, args.seed,
                                            restarts=args.restarts, workers=args.workers)
    lo, hi = est.bracket
    print(f"n = {args.n}: bracket [{lo:.6f}, {hi:.6f}] (width {hi - lo:.2e}); "
          f"{est.evaluations} evaluations")
    config = {"n": args.n, "case": args.case, "tol": args.tol, "budget": args.budget,
              "restarts": args.restarts}
    return RunReport("bisect", config, [est]), 0


def cmd_sweep(args) -> tuple[RunReport, int]:
    pred = _predicate_from_args(args)
    ns = parse_ints(args.n)
    alphas = parse_grid(args.alpha)
    if not alphas or not ns:
        raise UsageError("empty grid")
    try:
        handle = open(args.out, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    results = []
    total = 0
    with handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for n in ns:
            for k, a in enumerate(alphas):
                s = search.fuzz(pred, n, a, count=args.count, seed=args.seed + k, force=True,
                                log_range=args.log_range,
                                extra_points=search.family_seeds(pred, n, a),
                                precision=_precision(args))
                writer.writerow([n, repr(a), pred.value, repr(s.min_margin.value),
                                 s.violations, s.evaluations])
                results.append(s)
                total += s.violations
    print(f"wrote {len(ns) * len(alphas)} rows to {args.out}; {total} confirmed violations")
    config = {"n": ns, "alphas": alphas, "predicate": pred.value, "count": args.count,
              "out": args.out}
    return RunReport("sweep", config, results), 1 if total else 0


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--precision", choices=["fast", "extended"], default=argparse.SUPPRESS)
    common.add_argument("--json", metavar="PATH", default=argparse.SUPPRESS,
                        help="write the run report here ('-' for stdout)")
    common.add_argument("--force", action="store_true", default=argparse.SUPPRESS,
                        help="evaluate outside the stated hypotheses")

    parser = argparse.ArgumentParser(prog="cyclicineq", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate the cyclic sum at one point")
    p.add_argument("--x", required=True, help="comma-separated positive numbers")
    p.add_argument("--alpha", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="fuzz one predicate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--pred")
    p.add_argument("--prop", type=int, choices=[1, 2], default=1)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--chain", action="store_true")
    p.add_argument("--mode", choices=["mixed", "boundary", "interior"], default="mixed")
    p.add_argument("--log-range", type=float, default=5.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("family", parents=[common], help="reproduce a remark")
    p.add_argument("--remark", choices=["a", "b", "c", "d"], required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--x")
    p.add_argument("--beta")
    p.add_argument("--alpha", "--alphas", dest="alpha")
    p.add_argument("--count", type=int, default=10_000)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("bisect", parents=[common], help="bracket a threshold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--case", choices=["2", "reverse"], required=True)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--budget", type=int, default=search.DEFAULT_BUDGET)
    p.add_argument("--restarts", type=int, default=search.DEFAULT_RESTARTS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bisect)

    p = sub.add_parser("sweep", parents=[common], help="min margins over an (n, alpha) grid")
    p.add_argument("--n", required=True, help="list like 2,3,4 or range 2:4")
    p.add_argument("--alpha", "--alphas", dest="alpha", required=True,
                   help="start:stop:step or a list")
    p.add_argument("--pred")
    p.add_argument("--prop", type=int, choices=[1, 2], default=1)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--log-range", type=float, default=5.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


_VALUE_OPTIONS = {"--x", "--alpha", "--alphas", "--beta"}


def _glue_negative_values(argv):
    """Let ``--alphas -10,-20`` through; argparse would read the value as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
            else:
                out += [tok, nxt]
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    for name, default in (("seed", 0), ("precision", "fast"), ("json", None), ("force", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except (UsageError, NonPositiveInput, HypothesisViolated, DegenerateGamma, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except BracketInvalid as exc:
        print(f"error: BracketInvalid: {exc}", file=sys.stderr)
        report = RunReport(args.command, {}, [{"error": "BracketInvalid", "detail": str(exc)}])
        code = 1
    report.wall_time = time.perf_counter() - start
    report.seed = args.seed
    report.precision_mode = args.precision
    if args.json:
        text = report.dumps()
        if args.json == "-":
            print(text)
        else:
            with open(args.json, "w") as fh:
                fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
