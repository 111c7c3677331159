"""Weil-Petersson volume polynomials, classical bounds, and genus asymptotics.

Builds boundary-length polynomials V_{g,n}(x) out of exact brackets, checks
the classical two-sided volume bounds and the sinh-quotient bound in exact
arithmetic, and measures the large-genus behaviour of the volume ratios
V_{g,n+1}/(8 pi^2 g V_{g,n}) and V_{g-1,n+2}/V_{g,n} against their known
1/g expansions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exactpi import BoundaryPolynomial, PiGraded, poly_eval, poly_eval_exact
from .intersections import (
    MemoStore,
    TauIndex,
    _PI2_FRAC,
    _partitions_le,
    default_store,
    tau,
    volume,
)

__all__ = [
    "AsymptoticReport",
    "VolumeTable",
    "build_cache",
    "volume_polynomial",
    "slice_polynomial",
    "ratio_r1",
    "ratio_r2",
    "slope_fit",
    "classical_bounds",
    "sinh_bounds",
    "f1_correction",
    "expansion_check",
    "r1_slope_target",
    "r2_slope_target",
    "B0",
    "B1",
]

# Rational enclosure of pi^2 used for proofs of strict inequalities.
_PI2_LO = _PI2_FRAC
_PI2_HI = _PI2_FRAC + Fraction(1, 10 ** 118)

# Classical sandwich constants.
B0 = math.pi ** 2 / 3 - math.pi ** 4 / 30
B1 = math.cosh(math.pi) - math.sinh(math.pi) / math.pi


@dataclass
class AsymptoticReport:
    """Measured quantity vs. its predicted main term over a (g,n) range."""

    grange: tuple
    n: int
    measured: float
    predicted: float
    residual: float
    envelope: float
    details: dict = field(default_factory=dict)


def _enclose(v: PiGraded) -> tuple[Fraction, Fraction]:
    """Exact rational lower/upper bounds of the real number v."""
    lo = Fraction(0)
    hi = Fraction(0)
    for m, q in v.terms.items():
        if q >= 0:
            lo += q * _PI2_LO ** m
            hi += q * _PI2_HI ** m
        else:
            lo += q * _PI2_HI ** m
            hi += q * _PI2_LO ** m
    return lo, hi


def _weight(alpha) -> Fraction:
    w = Fraction(1)
    for a in alpha:
        w /= 4 ** a * math.factorial(2 * a + 1)
    return w


def volume_polynomial(g: int, n: int,
                      store: MemoStore | None = None) -> BoundaryPolynomial:
    """Exact V_{g,n}(x_1,...,x_n) as an even symmetric polynomial."""
    return slice_polynomial(g, n, n, store=store)


def slice_polynomial(g: int, n: int, k: int,
                     store: MemoStore | None = None) -> BoundaryPolynomial:
    """Exact V_{g,n}(x_1,...,x_k,0,...,0) as a polynomial in k variables.

    The remaining n-k boundary lengths are pinned to zero; for k = n this is
    the full volume polynomial.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if n == 0:
        if k != 0:
            raise ValueError("k must be 0 when n is 0")
        return BoundaryPolynomial(0, {(): volume(g, 0, store=store)})
    dim = 3 * g - 3 + n
    coeffs = {}
    for tot in range(0, dim + 1):
        for part in _partitions_le(tot, k):
            alpha = part + (0,) * (k - len(part))
            val = tau(TauIndex.of(g, n, part + (0,) * (n - len(part))),
                      store=store)
            if not val.is_zero():
                coeffs[alpha] = _weight(alpha) * val
    return BoundaryPolynomial(k, coeffs)


class VolumeTable:
    """Cached map (g,n) -> volume polynomial with a provenance tag."""

    def __init__(self, store: MemoStore | None = None):
        self.store = store if store is not None else default_store()
        self.provenance = self.store.path or "memory"
        self._polys: dict = {}

    def polynomial(self, g: int, n: int) -> BoundaryPolynomial:
        key = (g, n)
        if key not in self._polys:
            p = volume_polynomial(g, n, store=self.store)
            const = p.constant_term()
            if const != volume(g, n, store=self.store):
                raise AssertionError("constant term mismatch at %s" % (key,))
            self._polys[key] = p
        return self._polys[key]

    def constant(self, g: int, n: int) -> PiGraded:
        return volume(g, n, store=self.store)


# ---------------------------------------------------------------------------
# Cache building
# ---------------------------------------------------------------------------

# Full polynomials kept exact for the sinh-bound certification.
_SINH_SET = ((1, 2), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2), (5, 2))

# (k, g range, n): boundary slices used by the expectation quadratures.
_SLICE_SET = (
    (1, range(6, 15), 1),
    (1, range(5, 15), 3),
    (1, range(7, 14), 5),
    (2, range(5, 15), 2),
    (2, range(5, 14), 3),
    (2, range(7, 14), 4),
    (2, range(7, 14), 5),
    (3, range(4, 9), 3),
    (3, range(8, 9), 4),
    (3, range(4, 13), 5),
    (3, range(8, 9), 6),
    (3, range(6, 13), 7),
)


def build_cache(store: MemoStore, progress=None) -> dict:
    """Populate a store with every value the standard check battery queries.

    Covers the bracket lattice up to dimension 12, constant volumes for the
    large-genus ratio sweeps, full polynomials for the sinh-bound sample set,
    and the boundary slices consumed by the expectation quadratures.  Safe to
    re-run; existing entries are reused.
    """

    def note(msg):
        if progress:
            progress(msg)

    from .intersections import bracket_lattice

    for idx in bracket_lattice(12):
        tau(idx, store=store)
    note("lattice dim<=12: %d entries" % len(store))

    vol_targets = []
    for n in range(3, 7):
        vol_targets.append((0, n))
    for g in range(1, 15):
        for n in range(0, 6):
            if 2 * g - 2 + n <= 0 or (g == 14 and n == 5):
                continue
            vol_targets.append((g, n))
    for g, n in vol_targets:
        volume(g, n, store=store)
        note("volume(%d,%d)" % (g, n))

    for g, n in _SINH_SET:
        volume_polynomial(g, n, store=store)
        note("polynomial(%d,%d)" % (g, n))

    for k, grange, n in _SLICE_SET:
        for g in grange:
            slice_polynomial(g, n, k, store=store)
            note("slice(%d,%d,k=%d) entries=%d" % (g, n, k, len(store)))

    return {"entries": len(store)}


# ---------------------------------------------------------------------------
# Volume ratios and their 1/g expansions
# ---------------------------------------------------------------------------


def r1_slope_target(n: int) -> float:
    """Predicted 1/g coefficient of V_{g,n+1}/(8 pi^2 g V_{g,n})."""
    return (0.5 - 1.0 / math.pi ** 2) * n - 1.25 + 2.0 / math.pi ** 2


def r2_slope_target(n: int) -> float:
    """Predicted 1/g coefficient of V_{g-1,n+2}/V_{g,n}."""
    return (3.0 - 2.0 * n) / math.pi ** 2


def _vol_coeff(g: int, n: int, store) -> Fraction:
    v = volume(g, n, store=store)
    m = v.single_grade()
    if m is None:
        raise AssertionError("volume is not single-grade")
    return v.coeff(m)


def ratio_r1(g: int, n: int, store: MemoStore | None = None) -> AsymptoticReport:
    """V_{g,n+1}/(8 pi^2 g V_{g,n}): exact rational ratio vs 1 + c1(n)/g."""
    if store is None:
        store = default_store()
    num = _vol_coeff(g, n + 1, store)
    den = _vol_coeff(g, n, store)
    measured = float(num / (8 * g * den))  # pi powers cancel exactly
    predicted = 1.0 + r1_slope_target(n) / g
    return AsymptoticReport(
        grange=(g, g), n=n, measured=measured, predicted=predicted,
        residual=measured - predicted, envelope=(1.0 + n * n) / g ** 2,
        details={"kind": "r1", "exact_ratio": num / (8 * g * den)},
    )


def ratio_r2(g: int, n: int, store: MemoStore | None = None) -> AsymptoticReport:
    """V_{g-1,n+2}/V_{g,n}: measured ratio vs 1 + (3-2n)/(pi^2 g)."""
    if store is None:
        store = default_store()
    if g < 1:
        raise ValueError("need g >= 1")
    num = _vol_coeff(g - 1, n + 2, store)
    den = _vol_coeff(g, n, store)
    # dim(g-1,n+2) = dim(g,n) - 1, so the true ratio carries one pi^-2.
    measured = float(num / den) / math.pi ** 2
    predicted = 1.0 + r2_slope_target(n) / g
    return AsymptoticReport(
        grange=(g, g), n=n, measured=measured, predicted=predicted,
        residual=measured - predicted, envelope=(1.0 + n * n) / g ** 2,
        details={"kind": "r2", "rational_part": num / den},
    )


def slope_fit(n: int, which: str = "r1", gs=tuple(range(8, 15)),
              store: MemoStore | None = None) -> AsymptoticReport:
    """Richardson-extrapolated 1/g slope of a volume ratio over a g sweep.

    For each g the scaled deviation t(g) = g*(ratio - 1) equals the slope up
    to O(1/g); extrapolation in 1/g through the three largest g removes the
    next two orders.
    """
    if store is None:
        store = default_store()
    gs = sorted(gs)
    fn = ratio_r1 if which == "r1" else ratio_r2
    pts = {g: fn(g, n, store=store).measured for g in gs}
    top = gs[-3:]
    xs = [1.0 / g for g in top]
    ts = [g * (pts[g] - 1.0) for g in top]
    est = 0.0
    for i in range(3):
        li = ts[i]
        for j in range(3):
            if j != i:
                li *= xs[j] / (xs[j] - xs[i])
        est += li
    target = r1_slope_target(n) if which == "r1" else r2_slope_target(n)
    return AsymptoticReport(
        grange=(gs[0], gs[-1]), n=n, measured=est, predicted=target,
        residual=est - target,
        envelope=abs(target) * 0.1,
        details={"kind": which, "ratios": pts, "extrapolation_points": top},
    )


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


def classical_bounds(g: int, n: int, store: MemoStore | None = None,
                     samples: int = 5, seed: int = 7) -> dict:
    """Check the classical volume bounds at (g,n); returns a pass/fail report.

    Parts: the two-sided bound b0 <= 4 pi^2 (2g-2+n) V_{g,n}/V_{g,n+1} <= b1;
    the sandwich V <= V(x) <= e^(sum x/2) V at sampled x; and the genus-drop
    comparison V_{g-1,n+4} <= V_{g,n+2}.
    """
    if store is None:
        store = default_store()
    rep: dict = {"g": g, "n": n, "b0": B0, "b1": B1}
    q = 4 * (2 * g - 2 + n) * _vol_coeff(g, n, store) / _vol_coeff(g, n + 1,
                                                                   store)
    rep["pinch_ratio"] = float(q)  # already includes the 4 pi^2 factor
    rep["two_sided_ok"] = B0 <= float(q) <= B1
    rng = random.Random(seed)
    poly = volume_polynomial(g, n, store=store) if n else None
    v0 = float(volume(g, n, store=store))
    ok = True
    worst = 0.0
    for _ in range(samples):
        if n == 0:
            break
        x = [rng.uniform(0.0, 3.0) for _ in range(n)]
        vx = poly_eval(poly, x)
        hi = math.exp(sum(x) / 2.0) * v0
        if not (v0 * (1 - 1e-12) <= vx <= hi * (1 + 1e-12)):
            ok = False
        worst = max(worst, vx / hi)
    rep["sandwich_ok"] = ok
    rep["sandwich_worst_fraction"] = worst
    if g >= 1:
        lhs = float(volume(g - 1, n + 4, store=store))
        rhs = float(volume(g, n + 2, store=store))
        rep["genus_drop_ok"] = lhs <= rhs * (1 + 1e-12)
    else:
        rep["genus_drop_ok"] = None
    rep["ok"] = bool(rep["two_sided_ok"] and ok
                     and rep["genus_drop_ok"] is not False)
    return rep


def _sinh_truncation(x: Fraction, terms: int) -> Fraction:
    """Partial sum of sinh(x/2)/(x/2) = sum (x^2/4)^k/(2k+1)!."""
    y = Fraction(x) ** 2 / 4
    acc = Fraction(0)
    p = Fraction(1)
    for k in range(terms + 1):
        acc += p / math.factorial(2 * k + 1)
        p *= y
    return acc


def sinh_bounds(g: int, n: int, x=None, store: MemoStore | None = None,
                samples: int = 100, seed: int = 11) -> dict:
    """Certify V_{g,n}(x)/V_{g,n} <= prod sinh(x_i/2)/(x_i/2) exactly.

    Sample points are rational; the right side is replaced by a truncated
    series that it dominates termwise, and both sides are compared through a
    rational enclosure of pi^2, so a reported pass is a proof at that point.
    Also reports the smallest admissible constant c in the companion lower
    bound  ratio >= (1 - c n |x|^2/g) * prod sinh(x_i/2)/(x_i/2)  over the
    sampled points.
    """
    if store is None:
        store = default_store()
    if n < 1:
        raise ValueError("need n >= 1")
    dim = 3 * g - 3 + n
    poly = volume_polynomial(g, n, store=store)
    v_lo, v_hi = _enclose(volume(g, n, store=store))
    rng = random.Random(seed)
    if x is not None:
        pts = [tuple(Fraction(v).limit_denominator(64) for v in x)]
    else:
        pts = [tuple(Fraction(rng.randrange(1, 129), 32) for _ in range(n))
               for _ in range(samples)]
    violations = 0
    min_slack = None
    c_min = 0.0
    for pt in pts:
        vx_lo, vx_hi = _enclose(poly_eval_exact(poly, pt))
        bound = v_lo
        for xi in pt:
            bound *= _sinh_truncation(xi, dim)
        if vx_hi > bound:
            violations += 1
        slack = float(bound - vx_hi)
        min_slack = slack if min_slack is None else min(min_slack, slack)
        # lower-bound constant (numeric; the sharp c is not pinned down)
        ratio = float(vx_lo / v_hi)
        prod = 1.0
        for xi in pt:
            t = float(xi)
            prod *= math.sinh(t / 2) / (t / 2) if t else 1.0
        defect = 1.0 - ratio / prod
        norm = n * sum(float(xi) ** 2 for xi in pt) / g
        if norm > 0:
            c_min = max(c_min, defect / norm)
    return {
        "g": g, "n": n, "points": len(pts), "violations": violations,
        "min_upper_slack": min_slack, "lower_bound_c": c_min,
    }


# ---------------------------------------------------------------------------
# First-order correction of the sinh expansion
# ---------------------------------------------------------------------------


def _sinhc(t: float) -> float:
    return math.sinh(t / 2.0) / (t / 2.0) if t else 1.0


def f1_correction(x, n: int | None = None) -> float:
    """First 1/g correction term of V_{g,n}(x)/V_{g,n} at boundary lengths x."""
    x = list(x)
    if n is None:
        n = len(x)
    if len(x) < n:
        x = x + [0.0] * (n - len(x))
    if len(x) != n:
        raise ValueError("x longer than n")
    s = [_sinhc(t) for t in x]
    total = 0.0
    pi2 = math.pi ** 2
    for i in range(n):
        term = math.cosh(x[i] / 2.0) + 1.0 - (x[i] ** 2 / 16.0 + 2.0) * s[i]
        prod = 1.0
        for l in range(n):
            if l != i:
                prod *= s[l]
        total += term * prod / pi2
    for i in range(n):
        for j in range(i + 1, n):
            term = (math.cosh(x[i] / 2.0) * math.cosh(x[j] / 2.0) + 1.0
                    - 2.0 * s[i] * s[j])
            prod = 1.0
            for l in range(n):
                if l != i and l != j:
                    prod *= s[l]
            total -= term * prod / (2.0 * pi2)
    return total


def expansion_check(g: int, n: int, x,
                    store: MemoStore | None = None) -> AsymptoticReport:
    """Residual of V_{g,n}(x)/V_{g,n} against sinh product + f1/g."""
    if store is None:
        store = default_store()
    x = list(x)
    if len(x) < n:
        x = x + [0.0] * (n - len(x))
    k = sum(1 for t in x if t)
    xs = sorted(x, reverse=True)
    poly = slice_polynomial(g, n, max(k, 1), store=store)
    ratio = poly_eval(poly, xs[:max(k, 1)]) / float(volume(g, n, store=store))
    main = 1.0
    for t in x:
        main *= _sinhc(t)
    predicted = main + f1_correction(x, n) / g
    sx = sum(x)
    env = (1.0 + sx) ** 4 * math.exp(sx / 2.0) / g ** 2
    return AsymptoticReport(
        grange=(g, g), n=n, measured=ratio, predicted=predicted,
        residual=ratio - predicted, envelope=env,
        details={"x": x, "n_cubed_factor": (1 + n) ** 3},
    )
