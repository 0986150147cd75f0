"""Log-domain evaluation of the cyclic sum and its terms.

Points are stored as natural logarithms of their coordinates, so a power
``x**alpha`` is the product ``alpha * log(x)`` and never overflows on its own.
Every term is evaluated after factoring out the largest exponent that appears
in its denominator.

Two precision modes are provided:

* fast: float64 arrays, vectorised over many points at once;
* extended: mpmath at ``HP_DPS`` significant digits, evaluated from the
  direct (non log-domain) formulas. It is used to adjudicate margins that the
  fast mode cannot sign with confidence.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.special import logsumexp

from .errors import NonPositiveInput, PrecisionExhausted

EPS = 1e-9
ESCALATION = 1e4
FEASIBILITY_SLACK = 1e-12
HP_DPS = 40

# expm1 form loses nothing below this; above it the plain difference is exact enough
_EXPM1_CUTOFF = 30.0
_BELOW_ONE = np.nextafter(1.0, 0.0)


class EvalPoint:
    """A point of the positive orthant, kept as ``logx[i] = ln(x_i)``.

    Points built by :func:`make_point` also remember the exact input values
    (as Fractions), which the extended-precision route uses in place of
    ``exp(logx)``.
    """

    __slots__ = ("logx", "exact")

    def __init__(self, logx, exact=None):
        arr = np.array(logx, dtype=float).reshape(-1)
        if arr.size < 1:
            raise NonPositiveInput("a point needs at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise NonPositiveInput(f"log-coordinates must be finite, got {arr!r}")
        arr.setflags(write=False)
        self.logx = arr
        self.exact = None if exact is None else tuple(exact)

    @property
    def n(self) -> int:
        return self.logx.size

    @property
    def x(self) -> np.ndarray:
        return np.exp(self.logx)

    def permuted(self, order) -> "EvalPoint":
        order = np.asarray(order)
        exact = None if self.exact is None else [self.exact[k] for k in order]
        return EvalPoint(self.logx[order], exact)

    def __eq__(self, other):
        if not isinstance(other, EvalPoint):
            return NotImplemented
        return np.array_equal(self.logx, other.logx)

    def __hash__(self):
        return hash(self.logx.tobytes())

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"EvalPoint(x={np.array2string(self.x, precision=6)})"


@dataclass(frozen=True)
class Exponents:
    """The exponent alpha with its companions beta and gamma for a given n."""

    n: int
    alpha: float

    @property
    def beta(self) -> float:
        return 2.0 - self.alpha

    @property
    def gamma(self) -> float:
        return gamma_of(self.n, self.alpha)


def gamma_of(n: int, alpha: float) -> float:
    return (n - 1) * (alpha - 1) / n


def case_split(n: int) -> float:
    """The alpha separating the two proof regimes, ``2 + 1/(n-1)``."""
    return math.inf if n < 2 else 2.0 + 1.0 / (n - 1)


class Verdict(str, enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Margin:
    """Signed gap ``lhs - rhs`` of one inequality at one point."""

    value: float
    verdict: Verdict
    tolerance: float = EPS
    lhs: float = 0.0
    rhs: float = 0.0
    precision: str = "fast"
    confirmed: bool = False

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.SATISFIED

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "precision": self.precision,
            "confirmed": self.confirmed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Margin":
        return cls(
            value=d["value"],
            verdict=Verdict(d["verdict"]),
            tolerance=d["tolerance"],
            lhs=d["lhs"],
            rhs=d["rhs"],
            precision=d["precision"],
            confirmed=d["confirmed"],
        )


# --- points ------------------------------------------------------------------


def make_point(values: Sequence[float]) -> EvalPoint:
    """Build a point from positive reals (floats, ints or Fractions)."""
    vals = list(values)
    if not vals:
        raise NonPositiveInput("a point needs at least one coordinate")
    logs = []
    exact = []
    for v in vals:
        try:
            fv = float(v)
        except (TypeError, ValueError) as exc:
            raise NonPositiveInput(f"not a real number: {v!r}") from exc
        if not math.isfinite(fv) or fv <= 0.0:
            raise NonPositiveInput(f"coordinates must be positive and finite, got {v!r}")
        logs.append(math.log(fv))
        exact.append(v if isinstance(v, Fraction) else Fraction(fv))
    return EvalPoint(logs, exact)


def log_product(p: EvalPoint) -> float:
    return math.fsum(p.logx)


def is_feasible(p: EvalPoint, slack: float = FEASIBILITY_SLACK) -> bool:
    return log_product(p) >= -slack


def on_boundary(p: EvalPoint, slack: float = FEASIBILITY_SLACK) -> bool:
    return abs(log_product(p)) <= slack


def project_to_boundary(p: EvalPoint) -> EvalPoint:
    """Rescale every coordinate by the same factor so that the product is 1."""
    return EvalPoint(p.logx - log_product(p) / p.n)


# --- fast (vectorised) evaluation ---------------------------------------------


def _as_batch(L) -> np.ndarray:
    L = np.asarray(L, dtype=float)
    return L[None, :] if L.ndim == 1 else L


def neumaier_sum(X, axis=-1) -> np.ndarray:
    """Compensated (Neumaier) summation along ``axis``."""
    X = np.moveaxis(np.asarray(X, dtype=float), axis, -1)
    s = np.zeros(X.shape[:-1])
    c = np.zeros(X.shape[:-1])
    with np.errstate(invalid="ignore", over="ignore"):
        for k in range(X.shape[-1]):
            v = X[..., k]
            t = s + v
            c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
            s = t
        out = s + c
    # the correction is meaningless once an infinity entered
    return np.where(np.isfinite(s), out, s)


def log_rest(L) -> np.ndarray:
    """``log(sum_{j != i} exp(L[:, j]))`` for every column ``i``."""
    L = _as_batch(L)
    m, n = L.shape
    if n == 1:
        return np.full((m, 1), -np.inf)
    B = np.repeat(L[:, None, :], n, axis=1)
    idx = np.arange(n)
    B[:, idx, idx] = -np.inf
    return logsumexp(B, axis=-1)


def _scaled_power_diff(L, D, d):
    """``(exp(L + d) - exp(L)) / exp(D)`` without cancellation near ``d = 0``."""
    with np.errstate(over="ignore", invalid="ignore"):
        small = np.exp(L - D) * np.expm1(np.minimum(d, _EXPM1_CUTOFF))
        large = np.exp(L + d - D) - np.exp(L - D)
    return np.where(d > _EXPM1_CUTOFF, large, small)


def terms_batch(L, alpha: float) -> np.ndarray:
    """All n terms of the cyclic sum for each row of ``L`` (shape (m, n))."""
    L = _as_batch(L)
    if alpha == 1.0:
        return np.zeros_like(L)
    a = alpha * L
    D = np.logaddexp(a, log_rest(L))
    t = _scaled_power_diff(L, D, (alpha - 1.0) * L)
    # the exact value is below 1; keep rounding from reaching it
    return np.minimum(t, _BELOW_ONE)


def eval_sum_batch(L, alpha: float) -> np.ndarray:
    return neumaier_sum(terms_batch(L, alpha))


def eval_term(p: EvalPoint, i: int, alpha: float) -> float:
    """``(x_i**a - x_i) / (x_i**a + sum_{j != i} x_j)``."""
    if not 0 <= i < p.n:
        raise IndexError(f"term index {i} out of range for n={p.n}")
    return float(terms_batch(p.logx, alpha)[0, i])


def eval_sum(p: EvalPoint, alpha: float) -> float:
    return math.fsum(terms_batch(p.logx, alpha)[0])


# --- extended precision ---------------------------------------------------------


def to_mpf(v) -> mpmath.mpf:
    """Exact conversion of floats, ints and Fractions at the current precision."""
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def hp_coords(p) -> tuple[list, list]:
    """(log x, x) as mpf lists; uses the exact inputs when the point has them."""
    if isinstance(p, EvalPoint) and p.exact is not None:
        xs = [to_mpf(v) for v in p.exact]
        return [mpmath.log(x) for x in xs], xs
    logx = p.logx if isinstance(p, EvalPoint) else p
    ls = [mpmath.mpf(float(v)) for v in logx]
    return ls, [mpmath.exp(v) for v in ls]


def hp_terms(p, alpha, dps: int = HP_DPS) -> list:
    """Terms of the cyclic sum in mpmath; ``p`` is a point or its log-coordinates."""
    with mpmath.workdps(dps):
        ls, xs = hp_coords(p)
        if alpha == 1:
            return [mpmath.mpf(0)] * len(xs)
        a = to_mpf(alpha)
        out = []
        for i, (li, xi) in enumerate(zip(ls, xs)):
            rest = mpmath.fsum(xs[:i] + xs[i + 1:])
            num = xi * mpmath.expm1((a - 1) * li)
            out.append(num / (xi ** a + rest))
        return out


def eval_sum_hp(p: EvalPoint, alpha, dps: int = HP_DPS) -> mpmath.mpf:
    """The cyclic sum at ``dps`` significant digits (direct formula)."""
    with mpmath.workdps(dps):
        return mpmath.fsum(hp_terms(p, alpha, dps))


# --- tolerance policy -------------------------------------------------------------


def tolerance_band(lhs, rhs, tol: float = EPS):
    """Absolute threshold ``tol * (1 + |lhs| + |rhs|)``."""
    return tol * (1.0 + np.abs(lhs) + np.abs(rhs))


def classify(lhs, rhs, tol: float = EPS, escalation: float = ESCALATION) -> Verdict:
    """Fast-mode three-way verdict; Violated here is still unconfirmed."""
    value = lhs - rhs
    band = tolerance_band(lhs, rhs, tol)
    if value >= -band:
        return Verdict.SATISFIED
    if value < -escalation * band:
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


def adjudicate(
    hp_sides: Callable[[int], tuple],
    tol: float = EPS,
    dps: int = HP_DPS,
) -> Margin:
    """Settle a margin in extended precision.

    ``hp_sides(dps)`` must return ``(lhs, rhs)`` as mpf numbers. The margin is
    computed at ``dps`` and again at twice that; if the two disagree by more
    than a tenth of the distance to the tolerance threshold the sign cannot be
    trusted and :class:`PrecisionExhausted` is raised.
    """
    with mpmath.workdps(2 * dps):
        lhs1, rhs1 = hp_sides(dps)
        lhs2, rhs2 = hp_sides(2 * dps)
        v1 = lhs1 - rhs1
        v2 = lhs2 - rhs2
        band = tol * (1 + abs(lhs2) + abs(rhs2))
        gap = abs(v2 + band)
        if abs(v1 - v2) > gap / 10 and abs(v1 - v2) > 0:
            raise PrecisionExhausted(
                f"margin {mpmath.nstr(v2, 12)} not separable from -{mpmath.nstr(band, 3)}"
            )
        verdict = Verdict.SATISFIED if v2 >= -band else Verdict.VIOLATED
        return Margin(
            value=float(v2),
            verdict=verdict,
            tolerance=tol,
            lhs=float(lhs2),
            rhs=float(rhs2),
            precision="extended",
            confirmed=True,
        )
