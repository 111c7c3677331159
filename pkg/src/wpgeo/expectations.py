"""Average counts of short curves and subsurfaces on random surfaces.

This module integrates geometric weight functions over moduli space using
the covering-space unfolding identity: for a family of disjoint simple
closed curves cut out along a prescribed topological pattern, the
Weil-Petersson average of a sum over the mapping-class-group orbit equals
a constant times an integral of the weight against the volume polynomials
of the complementary pieces,

    E[sum F]  =  weight / V_{g,n} * int F(x) * prod_i V_i(x) * prod_j x_j dx.

The building blocks are:

* :class:`MulticurveType` -- the topological pattern: ambient surface,
  complement pieces, how the curves are wired to piece boundaries, and the
  unfolding constant together with orientation and labeling multiplicities.
  The constant is always supplied explicitly; it is never inferred.
* :class:`IntegrandSpec` -- the weight applied to the curve lengths: a
  length-weighted kernel factor x/(2 sinh(kx/2)) f_T(kx), joint or
  per-curve length windows, monomials, or monomials times e^{x/2}.
* :func:`expectation` -- the engine.  The default strategy expands the
  complement volume polynomials into monomials and integrates each term in
  closed form (windows) or by cached one-dimensional quadrature (kernel
  moments); ``method="direct"`` instead runs iterated adaptive quadrature
  over the full domain, which serves as an independent cross-check.

On top of the engine sit the closed-form comparisons: the main term for
the kernel-weighted count of non-separating simple geodesics, the exact
second-order cancellation between that main term and the non-simple
total, the reduction of the figure-eight triple integral to a single
integral, a one-sided convergent sum identity, the expected number of
small subsurfaces below a boundary-length threshold, the leading-order
count of cusp-pair pants families, and the truncated inclusion-exclusion
identity for vanishing counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .intersections import MemoStore, default_store
from .spectral import TestFunction, fourier_imag, make_f1
from .volumes import poly_eval, slice_polynomial, volume

__all__ = [
    "Piece",
    "MulticurveType",
    "IntegrandSpec",
    "expectation",
    "nonseparating_curve",
    "cusp_pair_pants",
    "single_cusp_pants",
    "cuspless_pants",
    "one_holed_torus",
    "window_family",
    "nsep_main_term",
    "second_order_mains",
    "cancellation_check",
    "CancellationReport",
    "figure_eight_length",
    "figure_eight_reduction_check",
    "figure_eight_expectation",
    "one_sided_term",
    "one_sided_sum_identity",
    "ONE_SIDED_TARGET",
    "expected_subsurface_count",
    "leading_type_count",
    "weighted_leading_type_count",
    "inclusion_exclusion_identity",
    "inclusion_exclusion_remainder",
    "MIN_FIGURE_EIGHT_LENGTH",
]

QUAD_LIMIT = 200

#: Smallest possible value of 2*arccosh(2*cosh(x/2)*cosh(y/2) + cosh(z/2)),
#: attained as the three boundary lengths shrink to zero.
MIN_FIGURE_EIGHT_LENGTH = 2.0 * math.acosh(3.0)

#: Value of the convergent one-sided sum: ln 2 - 1/2.
ONE_SIDED_TARGET = math.log(2.0) - 0.5


# --------------------------------------------------------------------------
# Topological patterns
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """One connected piece of the complement of the curve family.

    ``slots`` lists, with multiplicity, the indices of the curves that
    appear as boundary components of this piece; a curve whose two sides
    both face the piece is listed twice.  ``cusps`` counts the punctures
    of the ambient surface carried by this piece.
    """

    genus: int
    slots: tuple[int, ...]
    cusps: int

    def __post_init__(self) -> None:
        if self.genus < 0 or self.cusps < 0:
            raise ValueError("piece genus and cusp count must be nonnegative")
        object.__setattr__(self, "slots", tuple(self.slots))
        b = len(self.slots) + self.cusps
        if 2 * self.genus - 2 + b <= 0:
            raise ValueError(
                f"unstable piece: genus {self.genus} with {b} marked points")


@dataclass(frozen=True)
class MulticurveType:
    """A labeled family of disjoint simple closed curves on S_{g,n}.

    ``curves`` is the number of curves (integration variables).  The
    multiplicities are kept separate so each can be validated on its own:
    ``constant`` is the unfolding constant in (0, 1], ``orientation`` the
    number of markings per unoriented curve configuration (1 or 2), and
    ``orbit_count`` the number of mapping-class-group orbits summed over
    (for labeled cusps this is a multinomial; it may carry a 1/k! from
    counting unordered tuples, hence a Fraction).
    """

    genus: int
    cusps: int
    curves: int
    pieces: tuple[Piece, ...]
    constant: Fraction
    orientation: int = 1
    orbit_count: Fraction = Fraction(1)
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "constant", Fraction(self.constant))
        object.__setattr__(self, "orbit_count", Fraction(self.orbit_count))
        if self.curves < 1:
            raise ValueError("need at least one curve")
        if not 0 < self.constant <= 1:
            raise ValueError("unfolding constant must lie in (0, 1]")
        if self.orientation not in (1, 2):
            raise ValueError("orientation multiplicity must be 1 or 2")
        if self.orbit_count <= 0:
            raise ValueError("orbit count must be positive")
        sides = [0] * self.curves
        for p in self.pieces:
            for s in p.slots:
                if not 0 <= s < self.curves:
                    raise ValueError(f"slot index {s} out of range")
                sides[s] += 1
        if any(c != 2 for c in sides):
            raise ValueError(
                "every curve must appear on exactly two boundary slots")
        if sum(p.cusps for p in self.pieces) != self.cusps:
            raise ValueError("piece cusps must account for all ambient cusps")
        chi = sum(2 - 2 * p.genus - len(p.slots) - p.cusps
                  for p in self.pieces)
        if chi != 2 - 2 * self.genus - self.cusps:
            raise ValueError(
                "Euler characteristics of the pieces do not sum to the "
                "ambient Euler characteristic")

    @property
    def weight(self) -> float:
        """Net multiplicity: constant x orientation x orbit count."""
        return float(self.constant * self.orientation * self.orbit_count)


def nonseparating_curve(g: int, n: int) -> MulticurveType:
    """A single non-separating simple closed curve on S_{g,n}.

    The complement is S_{g-1,n+2} with both sides of the curve on its
    boundary.  Two orientations per curve, unfolding constant 1/2.
    """
    return MulticurveType(
        genus=g, cusps=n, curves=1,
        pieces=(Piece(g - 1, (0, 0), n),),
        constant=Fraction(1, 2), orientation=2,
        name="nonseparating")


def cusp_pair_pants(g: int, n: int) -> MulticurveType:
    """A curve bounding a pair of pants containing two of the n cusps.

    One orbit per unordered pair of cusps: n(n-1)/2 labelings.
    """
    if n < 2:
        raise ValueError("needs at least two cusps")
    return MulticurveType(
        genus=g, cusps=n, curves=1,
        pieces=(Piece(0, (0,), 2), Piece(g, (0,), n - 2)),
        constant=Fraction(1), orbit_count=Fraction(n * (n - 1), 2),
        name="cusp-pair pants")


def single_cusp_pants(g: int, n: int) -> MulticurveType:
    """Two curves bounding a pair of pants containing one cusp.

    Swapping the two boundary curves is a symmetry, so the unfolding
    constant is 1/2; one orbit per choice of cusp.
    """
    if n < 1:
        raise ValueError("needs at least one cusp")
    return MulticurveType(
        genus=g, cusps=n, curves=2,
        pieces=(Piece(0, (0, 1), 1), Piece(g - 1, (0, 1), n - 1)),
        constant=Fraction(1, 2), orbit_count=Fraction(n),
        name="single-cusp pants")


def cuspless_pants(g: int, n: int) -> MulticurveType:
    """Three curves bounding an embedded pair of pants with no cusps.

    The symmetric group on the three boundary curves gives constant 1/6.
    """
    return MulticurveType(
        genus=g, cusps=n, curves=3,
        pieces=(Piece(0, (0, 1, 2), 0), Piece(g - 2, (0, 1, 2), n)),
        constant=Fraction(1, 6),
        name="cuspless pants")


def one_holed_torus(g: int, n: int) -> MulticurveType:
    """A curve bounding an embedded one-holed torus.

    The elliptic involution of the one-holed torus gives constant 1/2.
    """
    return MulticurveType(
        genus=g, cusps=n, curves=1,
        pieces=(Piece(1, (0,), 0), Piece(g - 1, (0,), n)),
        constant=Fraction(1, 2),
        name="one-holed torus")


def _cusp_pair_orbits(n: int, k: int) -> Fraction:
    """Orbits of k unordered disjoint cusp-pair pants: n!/(2^k (n-2k)! k!)."""
    if n < 2 * k:
        raise ValueError("needs at least 2k cusps")
    return Fraction(math.factorial(n),
                    (2 ** k) * math.factorial(n - 2 * k) * math.factorial(k))


def window_family(g: int, n: int, k: int,
                  weighted: bool = False) -> MulticurveType:
    """k disjoint cusp-pair pants, optionally plus a non-separating curve.

    Without the extra curve the complement of the k pants is S_{g,n-k};
    with it (``weighted=True``) the extra curve cuts that complement into
    S_{g-1,n-k+2} and both of its sides face that piece.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    orbits = _cusp_pair_orbits(n, k)
    pants = tuple(Piece(0, (i,), 2) for i in range(k))
    if not weighted:
        return MulticurveType(
            genus=g, cusps=n, curves=k,
            pieces=pants + (Piece(g, tuple(range(k)), n - 2 * k),),
            constant=Fraction(1), orbit_count=orbits,
            name=f"{k} cusp-pair pants")
    big = Piece(g - 1, tuple(range(k)) + (k, k), n - 2 * k)
    return MulticurveType(
        genus=g, cusps=n, curves=k + 1,
        pieces=pants + (big,),
        constant=Fraction(1, 2), orientation=2, orbit_count=orbits,
        name=f"{k} cusp-pair pants + nonseparating curve")


# --------------------------------------------------------------------------
# Integrands
# --------------------------------------------------------------------------

_KINDS = ("kernel", "window", "window_each", "monomial", "exp_monomial",
          "window_each_kernel")


@dataclass
class IntegrandSpec:
    """Weight function applied to the curve lengths.

    kind:
      ``"kernel"``        -- x/(2 sinh(k x/2)) f_T(k x) on one curve;
      ``"window"``        -- indicator of x_1 + ... + x_m <= ell;
      ``"window_each"``   -- indicator of x_i <= ell for every curve;
      ``"monomial"``      -- x^power on [0, ell], one curve;
      ``"exp_monomial"``  -- x^power e^{x/2} on [0, ell], one curve;
      ``"window_each_kernel"`` -- windows on all curves but the last,
                             kernel factor on the last curve.
    ``scale`` multiplies the whole weight.
    """

    kind: str
    horizon: float | None = None
    ell: float | None = None
    power: int = 0
    iterate: int = 1
    tf: TestFunction | None = None
    scale: float = 1.0

    def validate(self, curves: int) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unsupported integrand kind {self.kind!r}")
        if self.kind in ("kernel", "monomial", "exp_monomial") and curves != 1:
            raise ValueError(f"{self.kind!r} weight applies to one curve")
        if self.kind == "window_each_kernel" and curves < 2:
            raise ValueError("needs at least two curves")
        if self.kind in ("kernel", "window_each_kernel"):
            if self.horizon is None or self.horizon <= 0:
                raise ValueError("kernel weight needs a positive horizon")
            if self.tf is None:
                raise ValueError("kernel weight needs a test function")
            if self.iterate < 1:
                raise ValueError("kernel iterate must be >= 1")
        if self.kind != "kernel":
            if self.ell is None or self.ell <= 0:
                raise ValueError("window bound ell must be positive")
        if self.power < 0:
            raise ValueError("monomial power must be nonnegative")


# --------------------------------------------------------------------------
# Engine
# --------------------------------------------------------------------------

_SLICE_FLOAT_CACHE: dict[tuple[int, int, int], list[tuple[tuple[int, ...], float]]] = {}


def _slice_terms(g: int, nn: int, k: int,
                 store: MemoStore) -> list[tuple[tuple[int, ...], float]]:
    """Slice polynomial of (g, nn) in k variables, expanded monomial by
    monomial: list of (exponents of x_i^2, float coefficient)."""
    key = (g, nn, k)
    hit = _SLICE_FLOAT_CACHE.get(key)
    if hit is not None:
        return hit
    poly = slice_polynomial(g, nn, k, store=store)
    out: list[tuple[tuple[int, ...], float]] = []
    for alpha, c in poly.coeffs.items():
        cf = float(c)
        for perm in set(permutations(alpha)):
            out.append((perm, cf))
    _SLICE_FLOAT_CACHE[key] = out
    return out


def _joint_terms(mt: MulticurveType,
                 store: MemoStore) -> list[tuple[tuple[int, ...], float]]:
    """Product of the complement volume polynomials as monomials in the
    curve lengths: list of (exponents of x_j^2 per curve, coefficient)."""
    m = mt.curves
    acc: dict[tuple[int, ...], float] = {(0,) * m: 1.0}
    for p in mt.pieces:
        terms = _slice_terms(p.genus, len(p.slots) + p.cusps, len(p.slots),
                             store)
        nxt: dict[tuple[int, ...], float] = {}
        for vec, c in acc.items():
            for perm, pc in terms:
                new = list(vec)
                for slot, a in zip(p.slots, perm):
                    new[slot] += a
                key = tuple(new)
                nxt[key] = nxt.get(key, 0.0) + c * pc
        acc = nxt
    return list(acc.items())


def _kernel_moment(tf: TestFunction, T: float, iterate: int,
                   power: int) -> float:
    """int_0^{T/k} x^power / (2 sinh(k x / 2)) * f_T(k x) dx, cached."""
    cache = tf.__dict__.setdefault("_kernel_moments", {})
    key = (T, iterate, power)
    if key in cache:
        return cache[key]
    tfT = tf.with_horizon(T)
    k = iterate

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        return x ** power / (2.0 * math.sinh(0.5 * k * x)) * tfT.f(k * x)

    val, _ = quad(integrand, 0.0, T / k, limit=QUAD_LIMIT)
    cache[key] = val
    return val


def _int_power_exp_half(p: int, ell: float) -> float:
    """int_0^ell x^p e^{x/2} dx by the closed-form antiderivative."""
    # F(x) = e^{x/2} * sum_{i=0}^{p} (-1)^i 2^{i+1} p!/(p-i)! x^{p-i}
    def F(x: float) -> float:
        s = 0.0
        coef = 2.0
        for i in range(p + 1):
            s += coef * x ** (p - i)
            coef *= -2.0 * (p - i)
        return math.exp(0.5 * x) * s

    return F(ell) - F(0.0)


def _term_factor(spec: IntegrandSpec, vec: tuple[int, ...]) -> float:
    """Integral of the weight times prod x_j^{2 a_j + 1} over the domain."""
    if spec.kind == "window":
        # Simplex sum x_j <= ell: Dirichlet integral
        #   ell^{2|a|+2m} * prod (2a_j+1)! / (2|a| + 2m)!
        tot = sum(vec)
        m = len(vec)
        num = 1.0
        for a in vec:
            num *= math.factorial(2 * a + 1)
        return spec.ell ** (2 * tot + 2 * m) * num / math.factorial(
            2 * tot + 2 * m)
    if spec.kind == "window_each":
        out = 1.0
        for a in vec:
            out *= spec.ell ** (2 * a + 2) / (2 * a + 2)
        return out
    if spec.kind == "kernel":
        (a,) = vec
        return _kernel_moment(spec.tf, spec.horizon, spec.iterate, 2 * a + 2)
    if spec.kind == "monomial":
        (a,) = vec
        p = 2 * a + 1 + spec.power
        return spec.ell ** (p + 1) / (p + 1)
    if spec.kind == "exp_monomial":
        (a,) = vec
        return _int_power_exp_half(2 * a + 1 + spec.power, spec.ell)
    if spec.kind == "window_each_kernel":
        out = 1.0
        for a in vec[:-1]:
            out *= spec.ell ** (2 * a + 2) / (2 * a + 2)
        return out * _kernel_moment(spec.tf, spec.horizon, spec.iterate,
                                    2 * vec[-1] + 2)
    raise ValueError(spec.kind)


def _direct_value(mt: MulticurveType, spec: IntegrandSpec,
                  terms: list[tuple[tuple[int, ...], float]]) -> float:
    """Iterated adaptive quadrature over the full domain (m <= 3 in scope).

    The innermost variable is integrated against a collapsed univariate
    polynomial assembled from the monomial expansion at each outer point.
    """
    m = mt.curves

    if spec.kind in ("kernel", "monomial", "exp_monomial"):
        upper = (spec.horizon / spec.iterate if spec.kind == "kernel"
                 else spec.ell)
        tfT = spec.tf.with_horizon(spec.horizon) if spec.kind == "kernel" \
            else None
        kk = spec.iterate

        def weight(x: float) -> float:
            if spec.kind == "kernel":
                if x <= 0.0:
                    return 0.0
                return x / (2.0 * math.sinh(0.5 * kk * x)) * tfT.f(kk * x)
            if spec.kind == "monomial":
                return x ** spec.power
            return x ** spec.power * math.exp(0.5 * x)

        def integrand(x: float) -> float:
            pv = 0.0
            for vec, c in terms:
                pv += c * x ** (2 * vec[0])
            return pv * x * weight(x)

        val, _ = quad(integrand, 0.0, upper, limit=QUAD_LIMIT)
        return val

    # Multi-variable windows.  Collapse the innermost variable: group the
    # monomial expansion by its exponent in the last coordinate.
    deg_last = max(vec[-1] for vec, _ in terms)
    grouped: list[list[tuple[tuple[int, ...], float]]] = [
        [] for _ in range(deg_last + 1)]
    for vec, c in terms:
        grouped[vec[-1]].append((vec[:-1], c))

    kernel_last = spec.kind == "window_each_kernel"
    tfT = spec.tf.with_horizon(spec.horizon) if kernel_last else None
    kk = spec.iterate

    def inner(outer: tuple[float, ...], upper: float) -> float:
        coeffs = []
        for bucket in grouped:
            s = 0.0
            for vec, c in bucket:
                t = c
                for x, a in zip(outer, vec):
                    t *= x ** (2 * a)
                s += t
            coeffs.append(s)

        def integrand(y: float) -> float:
            pv = 0.0
            y2 = y * y
            for d in range(deg_last, -1, -1):
                pv = pv * y2 + coeffs[d]
            if kernel_last:
                if y <= 0.0:
                    return 0.0
                return pv * y * y / (2.0 * math.sinh(0.5 * kk * y)) \
                    * tfT.f(kk * y)
            return pv * y

        val, _ = quad(integrand, 0.0, upper, limit=QUAD_LIMIT)
        return val

    def outer_int(depth: int, outer: tuple[float, ...]) -> float:
        used = sum(outer)
        if depth == m - 1:
            if kernel_last:
                upper = spec.horizon / kk
            elif spec.kind == "window":
                upper = spec.ell - used
            else:
                upper = spec.ell
            return inner(outer, max(upper, 0.0))
        if spec.kind == "window":
            upper = spec.ell - used
        else:
            upper = spec.ell
        if upper <= 0.0:
            return 0.0
        val, _ = quad(lambda x: x * outer_int(depth + 1, outer + (x,)),
                      0.0, upper, limit=QUAD_LIMIT)
        return val

    return outer_int(0, ())


def expectation(mt: MulticurveType, spec: IntegrandSpec,
                store: MemoStore | None = None,
                method: str = "moments") -> float:
    """Weil-Petersson average of the summed weight over the orbit family.

    ``method="moments"`` (default) integrates the monomial expansion of
    the complement volume product in closed form; ``method="direct"``
    runs iterated adaptive quadrature and serves as a cross-check.
    """
    spec.validate(mt.curves)
    store = store or default_store()
    terms = _joint_terms(mt, store)
    if method == "moments":
        total = sum(c * _term_factor(spec, vec) for vec, c in terms)
    elif method == "direct":
        total = _direct_value(mt, spec, terms)
    else:
        raise ValueError(f"unknown method {method!r}")
    denom = float(volume(mt.genus, mt.cusps, store=store))
    return mt.weight * spec.scale * total / denom


# --------------------------------------------------------------------------
# Shared spectral moments
# --------------------------------------------------------------------------

_DEFAULT_TF: TestFunction | None = None


def _default_tf() -> TestFunction:
    global _DEFAULT_TF
    if _DEFAULT_TF is None:
        _DEFAULT_TF = make_f1()
    return _DEFAULT_TF


def _exp_half_moments(tf: TestFunction, T: float,
                      powers: Sequence[int]) -> dict[int, float]:
    """J_p = int_0^T f_T(x) x^p e^{x/2} dx for the requested powers."""
    tfT = tf.with_horizon(T)
    out = {}
    for p in powers:
        val, _ = quad(lambda x: tfT.f(x) * x ** p * math.exp(0.5 * x),
                      0.0, T, limit=QUAD_LIMIT)
        out[p] = val
    return out


# --------------------------------------------------------------------------
# Non-separating main term and the second-order cancellation
# --------------------------------------------------------------------------

def second_order_mains(g: int, n: int, T: float,
                       tf: TestFunction | None = None) -> tuple[float, float]:
    """The two closed-form main terms whose sum cancels exactly.

    Returns (non-separating main, non-simple total main):

        (1/pi^2 g) int f_T(x) ((1-n/2) x - x^2/4) e^{x/2} dx
        (1/pi^2 g) int f_T(t) (t^2/4 + (n/2-1) t) e^{t/2} dt

    Both are assembled from the same two quadratures so the cancellation
    is exact in floating point, not merely to quadrature accuracy.
    """
    tf = tf or _default_tf()
    J = _exp_half_moments(tf, T, (1, 2))
    c1 = 1.0 - 0.5 * n
    core = c1 * J[1] - 0.25 * J[2]
    denom = math.pi ** 2 * g
    return core / denom, -core / denom


def nsep_main_term(g: int, n: int, T: float,
                   tf: TestFunction | None = None,
                   store: MemoStore | None = None,
                   method: str = "moments") -> tuple[float, float, float]:
    """Kernel-weighted count of non-separating simple closed geodesics.

    Returns (lhs, main, residual) where lhs is the engine value minus the
    imaginary-argument Fourier value at 1/2 (the constant-eigenfunction
    contribution), main is the closed-form first-order term

        (1/pi^2 g) int_0^T f_T(x) ((1 - n/2) x - x^2/4) e^{x/2} dx,

    and residual = lhs - main.
    """
    tf = tf or _default_tf()
    spec = IntegrandSpec("kernel", horizon=T, iterate=1, tf=tf)
    value = expectation(nonseparating_curve(g, n), spec, store=store,
                        method=method)
    lhs = value - fourier_imag(tf.with_horizon(T), 0.5)
    main, _ = second_order_mains(g, n, T, tf=tf)
    return lhs, main, lhs - main


@dataclass(frozen=True)
class CancellationReport:
    """Exact-rational check that the two main-term integrands cancel.

    Polynomials in x with coefficients a + b*n are stored as maps
    power -> (a, b) over exact rationals.
    """

    first: dict[int, tuple[Fraction, Fraction]]
    second: dict[int, tuple[Fraction, Fraction]]
    total: dict[int, tuple[Fraction, Fraction]]
    n_part_total: dict[int, Fraction]

    @property
    def is_zero(self) -> bool:
        return not self.total

    @property
    def n_part_is_zero(self) -> bool:
        return not self.n_part_total

    def evaluate(self, x: Fraction | int, n: Fraction | int) -> Fraction:
        x = Fraction(x)
        n = Fraction(n)
        return sum(((a + b * n) * x ** p for p, (a, b) in self.total.items()),
                   start=Fraction(0))


def _poly_add(p: dict[int, tuple[Fraction, Fraction]],
              q: dict[int, tuple[Fraction, Fraction]]
              ) -> dict[int, tuple[Fraction, Fraction]]:
    out: dict[int, tuple[Fraction, Fraction]] = {}
    for src in (p, q):
        for k, (a, b) in src.items():
            pa, pb = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (pa + a, pb + b)
    return {k: v for k, v in out.items()
            if v != (Fraction(0), Fraction(0))}


def cancellation_check(n: int | None = None) -> CancellationReport:
    """Exact second-order cancellation of the two main-term integrands.

    The non-separating main integrand (1 - n/2) x - x^2/4 and the
    non-simple total main integrand x^2/4 + (n/2 - 1) x sum to the zero
    polynomial over the rationals in the variables (x, n).  The
    n-dependent parts -(n/2) x and (n/2) x cancel on their own.

    If ``n`` is given, the coefficient pairs are specialized numerically;
    the result is identically zero either way.
    """
    first = {1: (Fraction(1), Fraction(-1, 2)),
             2: (Fraction(-1, 4), Fraction(0))}
    second = {2: (Fraction(1, 4), Fraction(0)),
              1: (Fraction(-1), Fraction(1, 2))}
    total = _poly_add(first, second)
    n_first = {k: b for k, (a, b) in first.items() if b != 0}
    n_second = {k: b for k, (a, b) in second.items() if b != 0}
    n_total: dict[int, Fraction] = {}
    for src in (n_first, n_second):
        for k, b in src.items():
            n_total[k] = n_total.get(k, Fraction(0)) + b
    n_total = {k: v for k, v in n_total.items() if v != 0}
    if n is not None:
        nf = Fraction(n)
        spec_first = {k: (a + b * nf, Fraction(0))
                      for k, (a, b) in first.items()}
        spec_second = {k: (a + b * nf, Fraction(0))
                       for k, (a, b) in second.items()}
        return CancellationReport(spec_first, spec_second,
                                  _poly_add(spec_first, spec_second), n_total)
    return CancellationReport(first, second, total, n_total)


# --------------------------------------------------------------------------
# Figure-eight reduction
# --------------------------------------------------------------------------

def figure_eight_length(x: float, y: float, z: float) -> float:
    """Length of the figure-eight geodesic filling a pair of pants with
    boundary lengths (x, y, z): 2 arccosh(2 cosh(x/2) cosh(y/2) + cosh(z/2))."""
    return 2.0 * math.acosh(
        2.0 * math.cosh(0.5 * x) * math.cosh(0.5 * y) + math.cosh(0.5 * z))


def _kernel_bar(t: float, tfT: TestFunction) -> float:
    """t / (2 sinh(t/2)) * f_T(t); the figure-eight lengths keep t away
    from zero so no limit handling is needed."""
    return t / (2.0 * math.sinh(0.5 * t)) * tfT.f(t)


def figure_eight_reduction_check(
        T: float, tf: TestFunction | None = None
) -> tuple[float, float, float]:
    """Triple integral of the figure-eight kernel versus its reduction.

    Left side: int over x, y, z >= 0 with figure_eight_length <= T of
    kernel_bar(L) sinh(x/2) sinh(y/2) sinh(z/2).  Right side: the same
    quantity after integrating out the level sets,

        int_{2 arccosh 3}^T (t/2) f_T(t)
            [4 sinh^2(t/4) log(sinh^2(t/4)) - 4 sinh^2(t/4) + 4] dt.

    Returns (triple, single, |triple - single|).  Both sides vanish when
    T <= 2 arccosh 3.
    """
    tf = tf or _default_tf()
    if T <= MIN_FIGURE_EIGHT_LENGTH:
        return 0.0, 0.0, 0.0
    tfT = tf.with_horizon(T)
    ch = math.cosh(0.25 * T) ** 2 * 2.0 - 1.0  # cosh(T/2)

    def z_int(x: float, y: float) -> float:
        zc = ch - 2.0 * math.cosh(0.5 * x) * math.cosh(0.5 * y)
        if zc <= 1.0:
            return 0.0
        zmax = 2.0 * math.acosh(zc)

        def integrand(z: float) -> float:
            t = figure_eight_length(x, y, z)
            return _kernel_bar(t, tfT) * math.sinh(0.5 * z)

        val, _ = quad(integrand, 0.0, zmax, limit=QUAD_LIMIT)
        return val

    def y_int(x: float) -> float:
        yc = (ch - 1.0) / (2.0 * math.cosh(0.5 * x))
        if yc <= 1.0:
            return 0.0
        ymax = 2.0 * math.acosh(yc)
        val, _ = quad(lambda y: z_int(x, y) * math.sinh(0.5 * y),
                      0.0, ymax, limit=QUAD_LIMIT)
        return val

    xc = (ch - 1.0) / 2.0
    xmax = 2.0 * math.acosh(xc)
    triple, _ = quad(lambda x: y_int(x) * math.sinh(0.5 * x), 0.0, xmax,
                     limit=QUAD_LIMIT)

    def bracket(t: float) -> float:
        s2 = math.sinh(0.25 * t) ** 2
        return 4.0 * s2 * math.log(s2) - 4.0 * s2 + 4.0

    single, _ = quad(lambda t: 0.5 * t * tfT.f(t) * bracket(t),
                     MIN_FIGURE_EIGHT_LENGTH, T, limit=QUAD_LIMIT)
    return triple, single, abs(triple - single)


def figure_eight_expectation(g: int, n: int, T: float,
                             tf: TestFunction | None = None,
                             store: MemoStore | None = None) -> float:
    """Average of the kernel over figure-eight geodesics filling a pants.

    Unfolds over the boundary multicurve of the filled pair of pants:

        int_{L(x,y,z) <= T} kernel_bar(L) V_{g-2,n+3}(x,y,z,0^n)/V_{g,n}
            x y z dx dy dz

    (the orientation, symmetry, and placement multiplicities multiply to
    one).  Its first-order behavior in 1/g is

        (1/pi^2 g) int f_T(t) e^{t/2} (t^2/4 - (1/2 + ln 2) t) dt.
    """
    tf = tf or _default_tf()
    if T <= MIN_FIGURE_EIGHT_LENGTH:
        return 0.0
    store = store or default_store()
    tfT = tf.with_horizon(T)
    terms = _slice_terms(g - 2, n + 3, 3, store)
    deg_last = max(vec[2] for vec, _ in terms)
    grouped: list[list[tuple[tuple[int, ...], float]]] = [
        [] for _ in range(deg_last + 1)]
    for vec, c in terms:
        grouped[vec[2]].append((vec[:2], c))
    ch = math.cosh(0.5 * T)

    def z_int(x: float, y: float) -> float:
        zc = ch - 2.0 * math.cosh(0.5 * x) * math.cosh(0.5 * y)
        if zc <= 1.0:
            return 0.0
        zmax = 2.0 * math.acosh(zc)
        coeffs = []
        x2, y2 = x * x, y * y
        for bucket in grouped:
            s = 0.0
            for (a1, a2), c in bucket:
                s += c * x2 ** a1 * y2 ** a2
            coeffs.append(s)

        def integrand(z: float) -> float:
            pv = 0.0
            z2 = z * z
            for d in range(deg_last, -1, -1):
                pv = pv * z2 + coeffs[d]
            t = figure_eight_length(x, y, z)
            return pv * z * _kernel_bar(t, tfT)

        val, _ = quad(integrand, 0.0, zmax, limit=QUAD_LIMIT)
        return val

    def y_int(x: float) -> float:
        yc = (ch - 1.0) / (2.0 * math.cosh(0.5 * x))
        if yc <= 1.0:
            return 0.0
        ymax = 2.0 * math.acosh(yc)
        val, _ = quad(lambda y: z_int(x, y) * y, 0.0, ymax,
                      limit=QUAD_LIMIT)
        return val

    xmax = 2.0 * math.acosh((ch - 1.0) / 2.0)
    total, _ = quad(lambda x: y_int(x) * x, 0.0, xmax, limit=QUAD_LIMIT)
    return total / float(volume(g, n, store=store))


# --------------------------------------------------------------------------
# One-sided sum identity
# --------------------------------------------------------------------------

def one_sided_term(k: int, scheme: str = "direct") -> float:
    """int_0^inf sinh^3(y/2) / (sinh(k y/2) sinh((k+1) y/2)) dy.

    ``scheme="direct"`` integrates over [0, inf); ``scheme="log"``
    substitutes u = e^{-y} and integrates over (0, 1].
    """
    if k < 2:
        raise ValueError("terms start at k = 2")

    def log_sinh(t: float) -> float:
        # log sinh t = t + log(1 - e^{-2t}) - log 2, stable for large t
        return t + math.log1p(-math.exp(-2.0 * t)) - math.log(2.0)

    def f(y: float) -> float:
        if y <= 0.0:
            return 0.0
        lf = (3.0 * log_sinh(0.5 * y) - log_sinh(0.5 * k * y)
              - log_sinh(0.5 * (k + 1) * y))
        return math.exp(lf) if lf > -745.0 else 0.0

    if scheme == "direct":
        val, _ = quad(f, 0.0, np.inf, limit=QUAD_LIMIT)
        return val
    if scheme == "log":
        def g(u: float) -> float:
            if u <= 0.0 or u >= 1.0:
                return 0.0
            y = -math.log(u)
            return f(y) / u

        val, _ = quad(g, 0.0, 1.0, limit=QUAD_LIMIT)
        return val
    raise ValueError(f"unknown scheme {scheme!r}")


def one_sided_sum_identity(K: int) -> tuple[float, float]:
    """Partial sum over k = 2..K of the one-sided integrals, with target
    ln 2 - 1/2.  The terms are positive and decay like 1/k^4."""
    if K < 2:
        raise ValueError("K must be at least 2")
    partial = sum(one_sided_term(k) for k in range(2, K + 1))
    return partial, ONE_SIDED_TARGET


# --------------------------------------------------------------------------
# Expected subsurface counts
# --------------------------------------------------------------------------

def _simplex_sinh_integral(m: int, ell: float) -> float:
    """int over x_1 + ... + x_m <= ell, x_i >= 0 of prod sinh(x_i/2)."""
    if m == 1:
        return 2.0 * (math.cosh(0.5 * ell) - 1.0)

    def rest(budget: float, depth: int) -> float:
        if depth == m - 1:
            return 2.0 * (math.cosh(0.5 * budget) - 1.0)
        val, _ = quad(lambda x: math.sinh(0.5 * x) * rest(budget - x,
                                                          depth + 1),
                      0.0, budget, limit=QUAD_LIMIT)
        return val

    return rest(ell, 0)


def expected_subsurface_count(g: int, n: int, ell: float,
                              store: MemoStore | None = None,
                              method: str = "moments"
                              ) -> tuple[float, float, float]:
    """Average number of embedded subsurfaces of Euler characteristic -1
    with total boundary length below ell.

    Four orbit families contribute: pants containing two cusps, pants
    containing one cusp, pants containing no cusp, and one-holed tori.
    Returns (engine_value, main_term, residual) where the main term is

        (1/pi^2 g) [ n(n-1)/4 (cosh(ell/2) - 1)
                     + n/4 int_{x1+x2<=ell} sinh(x1/2) sinh(x2/2)
                     + 1/6 int_{x1+x2+x3<=ell} prod sinh(x_i/2)
                     + 1/8 int_0^ell (pi^2/12 + x^2/48) sinh(x/2) dx ].
    """
    if ell <= 0:
        raise ValueError("ell must be positive")
    store = store or default_store()
    spec = IntegrandSpec("window", ell=ell)
    engine = 0.0
    if n >= 2:
        engine += expectation(cusp_pair_pants(g, n), spec, store=store,
                              method=method)
    if n >= 1 and g >= 1:
        engine += expectation(single_cusp_pants(g, n), spec, store=store,
                              method=method)
    if g >= 2:
        engine += expectation(cuspless_pants(g, n), spec, store=store,
                              method=method)
        engine += expectation(one_holed_torus(g, n), spec, store=store,
                              method=method)

    torus_piece, _ = quad(
        lambda x: (math.pi ** 2 / 12.0 + x * x / 48.0) * math.sinh(0.5 * x),
        0.0, ell, limit=QUAD_LIMIT)
    main = (n * (n - 1) / 4.0 * (math.cosh(0.5 * ell) - 1.0)
            + n / 4.0 * _simplex_sinh_integral(2, ell)
            + 1.0 / 6.0 * _simplex_sinh_integral(3, ell)
            + 0.125 * torus_piece) / (math.pi ** 2 * g)
    return engine, main, engine - main


def leading_type_count(g: int, n: int, ell: float, k: int,
                       store: MemoStore | None = None,
                       method: str = "moments") -> tuple[float, float]:
    """Average number of unordered k-tuples of disjoint cusp-pair pants
    with each boundary below ell, versus its closed-form leading term

        (1/k!) n!/(2^k (n-2k)!) ((cosh(ell/2) - 1) / (2 pi^2 g))^k.

    Requires n >= 2k.
    """
    if n < 2 * k:
        raise ValueError("needs n >= 2k cusps")
    engine = expectation(window_family(g, n, k),
                         IntegrandSpec("window_each", ell=ell),
                         store=store, method=method)
    mult = float(_cusp_pair_orbits(n, k) * math.factorial(k))
    main = (mult / math.factorial(k)
            * ((math.cosh(0.5 * ell) - 1.0) / (2.0 * math.pi ** 2 * g)) ** k)
    return engine, main


def weighted_leading_type_count(g: int, n: int, ell: float, k: int, T: float,
                                tf: TestFunction | None = None,
                                store: MemoStore | None = None
                                ) -> tuple[float, float]:
    """Same count additionally weighted by the kernel on a disjoint
    non-separating curve; the leading term gains the factor
    int_0^T 2 sinh(y/2) f_T(y) dy."""
    if n < 2 * k:
        raise ValueError("needs n >= 2k cusps")
    tf = tf or _default_tf()
    engine = expectation(window_family(g, n, k, weighted=True),
                         IntegrandSpec("window_each_kernel", ell=ell,
                                       horizon=T, iterate=1, tf=tf),
                         store=store)
    tfT = tf.with_horizon(T)
    sinh_int, _ = quad(lambda y: 2.0 * math.sinh(0.5 * y) * tfT.f(y),
                       0.0, T, limit=QUAD_LIMIT)
    base = ((math.cosh(0.5 * ell) - 1.0) / (2.0 * math.pi ** 2 * g)) ** k
    main = float(_cusp_pair_orbits(n, k)) * base * sinh_int
    return engine, main


# --------------------------------------------------------------------------
# Inclusion-exclusion identity
# --------------------------------------------------------------------------

def inclusion_exclusion_identity(k0: int, j: int) -> int:
    """Exact alternating partial sum 1 + sum_{k=1}^{j} (-1)^k C(k0, k).

    For a count variable equal to k0, the falling-factorial averages
    (count choose k) telescope: the full alternating sum is (1-1)^{k0},
    i.e. 1 when k0 = 0 and 0 otherwise.  The partial sum returned here
    deviates from that limit by at most C(k0, j+1) in absolute value.
    """
    if k0 < 0 or j < 0:
        raise ValueError("k0 and j must be nonnegative")
    return sum((-1) ** k * math.comb(k0, k) for k in range(0, j + 1))


def inclusion_exclusion_remainder(k0: int, j: int) -> int:
    """Truncation envelope C(k0, j+1) for the alternating partial sum."""
    if k0 < 0 or j < 0:
        raise ValueError("k0 and j must be nonnegative")
    return math.comb(k0, j + 1)
