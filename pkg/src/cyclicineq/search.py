"""Fuzzing, adversarial margin minimisation and threshold bisection.

Search runs in log-coordinates. On the boundary ``prod x = 1`` the walker
moves in the zero-sum subspace (dimension n - 1), where the constraint is
linear and held exactly; the interior mode adds one coordinate for a
nonnegative log-product. Rest-form predicates (Ineq9, A >= G) take any
positive x_2..x_n, so they are searched without a constraint.

Every reported violation has been re-evaluated in extended precision.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from . import numerics as nm
from . import propositions as props
from .errors import BracketInvalid, BudgetExhausted, DegenerateGamma, PrecisionExhausted
from .families import (
    RemarkAFamily,
    RemarkBFamily,
    RemarkDFamily,
    remark_a_point,
    remark_b_full_point,
    remark_b_point,
    remark_d_point,
)
from .numerics import EPS, EvalPoint, Margin, Verdict
from .propositions import PredicateId
from .reports import encode_logx

DEFAULT_BUDGET = 100_000
DEFAULT_RESTARTS = 20
_CHUNK = 50_000
_MAX_CONFIRM = 32


@dataclass(frozen=True)
class SampleConfig:
    n: int
    log_range: float = 5.0
    project: bool = True
    count: int = 1000
    seed: int = 0


def sample_logx(cfg: SampleConfig) -> np.ndarray:
    """(count, n) log-coordinates, uniform in [-L, L] and made feasible.

    Unprojected draws with a negative log-product get twice the deficit added
    to one random coordinate, which flips the sign of the log-product.
    """
    if cfg.log_range <= 0 or cfg.count < 1:
        raise ValueError("log_range must be positive and count at least 1")
    rng = np.random.default_rng(cfg.seed)
    L = rng.uniform(-cfg.log_range, cfg.log_range, size=(cfg.count, cfg.n))
    pick = rng.integers(0, cfg.n, size=cfg.count)
    if cfg.project:
        return L - L.mean(axis=1, keepdims=True)
    s = L.sum(axis=1)
    bad = s < 0
    L[bad, pick[bad]] -= 2.0 * s[bad]
    return L


def sample_points(cfg: SampleConfig) -> Iterator[EvalPoint]:
    for row in sample_logx(cfg):
        yield EvalPoint(row)


def sample_mixed(n: int, count: int, seed: int, log_range: float = 5.0) -> np.ndarray:
    """Half projected onto prod x = 1, half interior."""
    half = count // 2
    a = sample_logx(SampleConfig(n, log_range, True, max(half, 1), seed))
    b = sample_logx(SampleConfig(n, log_range, False, max(count - half, 1), seed + 1))
    return np.concatenate([a[:half], b[: count - half]])


# --- family seeds -----------------------------------------------------------------


def family_seeds(pred, n: int, param: float) -> list[EvalPoint]:
    """Known counterexample shapes for a predicate, in its search space."""
    pid = props.get_predicate(pred).id
    out: list[EvalPoint] = []
    try:
        if pid is PredicateId.INEQ9 and n >= 3 and param > 1:
            out.append(remark_b_point(RemarkBFamily(n, param)))
        elif pid is PredicateId.INEQ8 and n >= 3 and param > 1:
            out.append(remark_b_full_point(RemarkBFamily(n, param)))
    except DegenerateGamma:
        pass
    if pid in (PredicateId.INEQ3, PredicateId.INEQ3_REV) and n >= 3:
        out += [remark_a_point(RemarkAFamily(n, x)) for x in (0.5, 2.0, 0.1, 10.0)]
    if pid in (PredicateId.PROP1, PredicateId.PROP2, PredicateId.PROP2_STEP) and n >= 2:
        for x in np.linspace(1.02, 2.0, 50):
            p = remark_d_point(RemarkDFamily(n, float(x)))
            if abs(param) * np.max(np.abs(p.logx)) <= 700:
                out.append(p)
    return out


# --- fuzzing --------------------------------------------------------------------------


@dataclass
class FuzzSummary:
    predicate: PredicateId
    n: int
    param: float
    count: int
    evaluations: int
    min_margin: Optional[Margin]
    witness: Optional[EvalPoint] = None
    index: Optional[int] = None
    violations: int = 0
    unconfirmed: int = 0
    escalated: int = 0
    seed: int = 0

    @property
    def cleared(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "kind": "fuzz",
            "predicate": self.predicate.value,
            "n": self.n,
            "param": self.param,
            "count": self.count,
            "evaluations": self.evaluations,
            "min_margin": None if self.min_margin is None else self.min_margin.to_dict(),
            "witness": None if self.witness is None else encode_logx(self.witness.logx),
            "index": self.index,
            "violations": self.violations,
            "unconfirmed": self.unconfirmed,
            "escalated": self.escalated,
            "seed": self.seed,
        }


def _rotations(L: np.ndarray) -> np.ndarray:
    """Every normalised rotation x_j / x_k (j != k) of each row, stacked."""
    m, n = L.shape
    out = np.empty((m * n, n - 1))
    for k in range(n):
        out[k::n] = np.delete(L, k, axis=1) - L[:, [k]]
    return out


def fuzz(
    pred,
    n: int,
    param: float,
    *,
    count: int = 10_000,
    seed: int = 0,
    log_range: float = 5.0,
    mode: str = "mixed",
    index: Optional[int] = None,
    extra_points: Sequence[EvalPoint] = (),
    force: bool = False,
    tol: float = EPS,
    precision: str = "auto",
) -> FuzzSummary:
    """Evaluate a predicate over random feasible points and confirm failures.

    ``mode`` is ``"boundary"``, ``"interior"`` or ``"mixed"`` (half each).
    Rest-form predicates are evaluated on every normalised rotation of the
    sampled points. The worst candidates are adjudicated in extended
    precision; only those confirmed there count as violations.
    """
    p = props.get_predicate(pred)
    hyp = p.hypotheses(n, param)
    if not force:
        hyp.validate(param)
    if hyp.requires_boundary:
        mode = "boundary"
    if mode == "mixed":
        L = sample_mixed(n, count, seed, log_range)
    else:
        L = sample_logx(SampleConfig(n, log_range, mode == "boundary", count, seed))
    if p.rest_form:
        L = _rotations(L)
    if extra_points:
        L = np.concatenate([L, np.stack([q.logx for q in extra_points])])

    values, bands, ks = [], [], []
    for start in range(0, L.shape[0], _CHUNK):
        v, b, k = props.margins_batch(p, L[start:start + _CHUNK], param, index)
        values.append(v)
        bands.append(b)
        ks.append(k if k is not None else np.full(v.shape, -1))
    value = np.concatenate(values)
    band = np.concatenate(bands)
    kk = np.concatenate(ks)
    with np.errstate(invalid="ignore"):
        rel = np.where(np.isnan(value), -np.inf, value / band)

    suspects = np.flatnonzero(~(value >= -tol * band))
    order = suspects[np.argsort(rel[suspects], kind="stable")]
    examined = order[:_MAX_CONFIRM] if precision != "fast" else order[:0]

    worst_idx = int(np.argmin(rel))
    violations = 0
    escalated = 0
    best: Optional[tuple] = None
    for r in examined:
        i = None if index is None and not p.indexed else (index if index is not None else int(kk[r]))
        point = EvalPoint(L[r])
        try:
            m = props.check(p, point, param, i, force=True, tol=tol, precision="extended")
        except PrecisionExhausted:
            continue
        escalated += 1
        if m.verdict is Verdict.VIOLATED:
            violations += 1
            if best is None or m.value / (1 + abs(m.lhs) + abs(m.rhs)) < best[0]:
                best = (m.value / (1 + abs(m.lhs) + abs(m.rhs)), m, point, i)
    unconfirmed = len(order) - len(examined)
    if precision == "fast":
        violations = 0

    if best is not None:
        _, margin, witness, widx = best
    else:
        r = worst_idx
        widx = None if not p.indexed else (index if index is not None else int(kk[r]))
        witness = EvalPoint(L[r])
        lhs, rhs = (float(np.ravel(s)[0]) for s in props.sides_batch(p, L[r], param, widx))
        verdict = nm.classify(lhs, rhs, tol)
        if verdict is not Verdict.SATISFIED and r in set(examined.tolist()):
            verdict = Verdict.SATISFIED  # cleared by extended precision
        margin = Margin(lhs - rhs, verdict, tol, lhs, rhs, "fast", False)
    return FuzzSummary(
        predicate=p.id,
        n=n,
        param=float(param),
        count=count,
        evaluations=int(L.shape[0]),
        min_margin=margin,
        witness=witness,
        index=widx,
        violations=violations,
        unconfirmed=unconfirmed,
        escalated=escalated,
        seed=seed,
    )


# --- local descent ------------------------------------------------------------------


@dataclass
class SearchOutcome:
    best_point: EvalPoint
    best_margin: Margin
    restarts_used: int
    evaluations: int
    index: Optional[int] = None
    predicate: Optional[PredicateId] = None
    param: float = math.nan
    by_mode: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.best_margin.verdict is Verdict.VIOLATED and self.best_margin.confirmed

    def to_dict(self) -> dict:
        return {
            "kind": "search",
            "predicate": None if self.predicate is None else self.predicate.value,
            "param": self.param,
            "best_point": encode_logx(self.best_point.logx),
            "best_margin": self.best_margin.to_dict(),
            "index": self.index,
            "restarts_used": self.restarts_used,
            "evaluations": self.evaluations,
            "by_mode": self.by_mode,
        }


class _Space:
    """Maps unconstrained search vectors to log-coordinates."""

    def __init__(self, n: int, mode: str, rest_form: bool):
        self.mode = mode
        self.rest_form = rest_form
        if rest_form:
            self.dim = n - 1
            self.basis = None
        else:
            self.basis = null_space(np.ones((1, n))) if n > 1 else np.zeros((1, 0))
            self.dim = self.basis.shape[1] + (1 if mode == "interior" else 0)
        self.n = n

    def to_logx(self, z: np.ndarray) -> np.ndarray:
        if self.rest_form:
            return np.asarray(z, dtype=float)
        k = self.basis.shape[1]
        L = self.basis @ z[:k]
        if self.mode == "interior":
            L = L + abs(z[k]) / self.n
        return L

    def from_logx(self, L: np.ndarray) -> np.ndarray:
        if self.rest_form:
            return np.asarray(L, dtype=float)
        s = float(np.sum(L))
        y = self.basis.T @ (L - s / self.n)
        if self.mode == "interior":
            y = np.append(y, max(s, 0.0))
        return y


def _objective(pred, space, param, index, log_bound):
    def f(z):
        L = space.to_logx(z)
        if np.max(np.abs(L), initial=0.0) > log_bound:
            return 1e300
        v, _, _ = props.margins_batch(pred, L, param, index)
        val = float(v[0])
        return val if math.isfinite(val) else 1e300

    return f


def _descend(task):
    """One restart: Nelder-Mead from a start vector. Returns (value, logx, nfev)."""
    pred_id, n, mode, param, index, z0, maxfev, seed, k, log_bound = task
    pred = props.get_predicate(pred_id)
    space = _Space(n, mode, pred.rest_form)
    f = _objective(pred, space, param, index, log_bound)
    if space.dim == 0:
        return f(z0), tuple(space.to_logx(z0)), 1, True
    rng = np.random.default_rng([seed, k])
    simplex = z0 + np.vstack([np.zeros(space.dim), rng.normal(0.0, 0.5, (space.dim, space.dim))])
    res = minimize(
        f, z0, method="Nelder-Mead",
        options=dict(maxfev=max(maxfev, space.dim + 2), initial_simplex=simplex,
                     xatol=1e-12, fatol=1e-15),
    )
    z = res.x if res.fun <= f(z0) else z0
    return float(min(res.fun, f(z0))), tuple(space.to_logx(z)), int(res.nfev) + 1, bool(res.success)


def _run_mode(pred, n, param, mode, budget, seed, restarts, seeds, index, workers, log_bound):
    space = _Space(n, mode, pred.rest_form)
    sample_budget = max(budget // 2, 1)
    if pred.rest_form:
        L = np.random.default_rng(seed).uniform(-5.0, 5.0, size=(sample_budget, n - 1))
    else:
        L = sample_logx(SampleConfig(n, 5.0, mode == "boundary", sample_budget, seed))
    starts = [q.logx for q in seeds if mode == "interior" or pred.rest_form or nm.on_boundary(q)]
    v, b, _ = props.margins_batch(pred, L, param, index)
    rel = np.where(np.isfinite(v), v / b, np.inf)
    top = np.argsort(rel, kind="stable")[: max(restarts - len(starts), 1)]
    starts += [L[r] for r in top]
    cand = [(float(v[r]), tuple(L[r])) for r in top]
    per = max((budget - sample_budget) // len(starts), 1)
    tasks = [(pred.id, n, mode, param, index, space.from_logx(np.asarray(s)), per, seed, k,
              max(log_bound, float(np.max(np.abs(s)))))
             for k, s in enumerate(starts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_descend, tasks))
    else:
        results = [_descend(t) for t in tasks]
    evals = sample_budget + sum(r[2] for r in results)
    cand += [(r[0], r[1]) for r in results]
    converged = any(r[3] for r in results)
    return cand, evals, len(tasks), converged


def minimize_margin(
    pred,
    param: float,
    n: int,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    *,
    restarts: int = DEFAULT_RESTARTS,
    mode: str = "both",
    seeds: Optional[Sequence[EvalPoint]] = None,
    index: Optional[int] = None,
    force: bool = False,
    tol: float = EPS,
    workers: int = 1,
    log_bound: float = 50.0,
    strict_budget: bool = False,
) -> SearchOutcome:
    """Most negative margin found by multistart Nelder-Mead.

    Half of the budget goes to random sampling; the best samples together with
    the family seeds start the local descents, which share the rest. Descents
    stay inside ``|ln x_i| <= log_bound`` (widened to reach any seed). With
    ``mode="both"`` the budget is split between the boundary and interior
    searches and the minimum of each is reported in ``by_mode``. The outcome
    depends only on the arguments, not on ``workers``.
    """
    p = props.get_predicate(pred)
    hyp = p.hypotheses(n, param)
    if not force:
        hyp.validate(param)
    if p.rest_form:
        props._check_gamma(n, param)
    if seeds is None:
        seeds = family_seeds(p, n, param)
    if p.rest_form or hyp.requires_boundary:
        modes = ["boundary"]
    elif mode == "both":
        modes = ["boundary", "interior"]
    else:
        modes = [mode]

    cand_all = []
    evals = 0
    used = 0
    by_mode = {}
    any_converged = False
    for j, md in enumerate(modes):
        cand, e, r, conv = _run_mode(
            p, n, param, md, budget // len(modes), seed + 7919 * j, restarts,
            list(seeds), index, workers, log_bound,
        )
        by_mode[md] = min(c[0] for c in cand)
        cand_all += cand
        evals += e
        used += r
        any_converged |= conv

    # total order: margin first, then the coordinates themselves
    cand_all.sort(key=lambda c: (c[0], c[1]))
    margin = None
    best = None
    best_i = None
    for value, logx in cand_all[:5]:
        point = EvalPoint(logx)
        i = index
        if p.indexed and i is None:
            _, _, k = props.margins_batch(p, point.logx, param, None)
            i = int(k[0])
        try:
            m = props.check(p, point, param, i, force=True, tol=tol)
        except PrecisionExhausted:
            continue
        if margin is None or (m.verdict is Verdict.VIOLATED and margin.verdict is not Verdict.VIOLATED):
            margin, best, best_i = m, point, i
        if m.verdict is Verdict.VIOLATED:
            break
    if margin is None:
        value, logx = cand_all[0]
        best = EvalPoint(logx)
        margin = Margin(value, Verdict.INCONCLUSIVE, tol)
    outcome = SearchOutcome(best, margin, used, evals, best_i, p.id, float(param), by_mode)
    if strict_budget and not any_converged:
        raise BudgetExhausted("no local descent converged within its budget", outcome)
    return outcome


# --- threshold bisection -----------------------------------------------------------


@dataclass
class ThresholdEstimate:
    n: int
    predicate: PredicateId
    bracket: tuple
    witness_lo: SearchOutcome
    clearance_hi: SearchOutcome
    tolerance: float
    probes: list = field(default_factory=list)
    budget_per_probe: int = DEFAULT_BUDGET
    evaluations: int = 0
    note: str = (
        "a probe counts as violating only if the search confirmed a violation; "
        "the bracket bounds the threshold from above, not exactly"
    )

    def to_dict(self) -> dict:
        return {
            "kind": "threshold",
            "n": self.n,
            "predicate": self.predicate.value,
            "bracket": list(self.bracket),
            "width": self.bracket[1] - self.bracket[0],
            "witness_lo": self.witness_lo.to_dict(),
            "clearance_hi": self.clearance_hi.to_dict(),
            "tolerance": self.tolerance,
            "probes": self.probes,
            "budget_per_probe": self.budget_per_probe,
            "evaluations": self.evaluations,
            "note": self.note,
        }


def _bisect(pred, n, lo, hi, lo_outcome, hi_outcome, tolerance, probe):
    probes = [
        {"alpha": lo, "violated": True, "margin": lo_outcome.best_margin.value},
        {"alpha": hi, "violated": False, "margin": hi_outcome.best_margin.value},
    ]
    evals = lo_outcome.evaluations + hi_outcome.evaluations
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        out = probe(mid)
        evals += out.evaluations
        probes.append({"alpha": mid, "violated": out.violated, "margin": out.best_margin.value})
        if out.violated:
            lo, lo_outcome = mid, out
        else:
            hi, hi_outcome = mid, out
    return lo, hi, lo_outcome, hi_outcome, probes, evals


def bisect_alpha_n_case2(
    n: int,
    tolerance: float = 0.01,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    *,
    lo: float = 1.05,
    restarts: int = DEFAULT_RESTARTS,
    workers: int = 1,
) -> ThresholdEstimate:
    """Bracket the least alpha above which (8) holds everywhere."""
    if n < 3:
        raise ValueError("for n = 2, (8) holds for every alpha >= 1; nothing to bracket")
    if tolerance < 1e-3:
        raise ValueError("tolerance must be at least 1e-3")
    hi = nm.case_split(n)

    def probe(a):
        return minimize_margin(PredicateId.INEQ8, a, n, budget, seed, restarts=restarts,
                               force=True, workers=workers)

    lo_out = probe(lo)
    if not lo_out.violated:
        raise BracketInvalid(f"no violation of (8) found at alpha = {lo} for n = {n}")
    hi_out = probe(hi)
    if hi_out.violated:
        raise BracketInvalid(f"violation of (8) found at alpha = {hi}, where none should exist")
    lo, hi, lo_out, hi_out, probes, evals = _bisect(
        PredicateId.INEQ8, n, lo, hi, lo_out, hi_out, tolerance, probe)
    return ThresholdEstimate(n, PredicateId.INEQ8, (lo, hi), lo_out, hi_out, tolerance,
                             probes, budget, evals)


def bisect_alpha_n_reverse(
    n: int,
    tolerance: float = 0.01,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    *,
    lo: float = -40.0,
    restarts: int = DEFAULT_RESTARTS,
    workers: int = 1,
) -> ThresholdEstimate:
    """Bracket where the reversed inequality (sum <= 0) starts to fail below 1/(1-n)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    hi = 1.0 / (1 - n)

    def probe(a):
        return minimize_margin(PredicateId.PROP2, a, n, budget, seed, restarts=restarts,
                               force=True, workers=workers)

    lo_out = probe(lo)
    # family points need |alpha ln x| within the log budget; x >= 1.02 bounds |alpha|
    while not lo_out.violated:
        if abs(lo) * 2 * (n - 1) * math.log(1.02) > 700:
            raise BracketInvalid(f"no violation of the reversed inequality down to alpha = {lo}")
        lo *= 2
        lo_out = probe(lo)
    hi_out = probe(hi)
    if hi_out.violated:
        raise BracketInvalid(f"violation found at alpha = {hi}, where none should exist")
    lo, hi, lo_out, hi_out, probes, evals = _bisect(
        PredicateId.PROP2, n, lo, hi, lo_out, hi_out, tolerance, probe)
    return ThresholdEstimate(n, PredicateId.PROP2, (lo, hi), lo_out, hi_out, tolerance,
                             probes, budget, evals)
