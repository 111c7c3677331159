"""Smooth even test functions, their Fourier and Abel transforms, and the
spectral lower-bound curves.

The central object is a compactly supported even bump ``f1 = g * g`` (an
autocorrelation, so its Fourier transform is a square and hence non-negative
on the real axis, and positivity of ``f1`` itself makes it non-negative on
the imaginary axis too).  Scaling by a horizon ``T`` gives
``f_T(x) = f1(x/T)`` supported on ``[-T, T]``.

The Abel-transform pair links ``f_T`` to a kernel ``k_T``:

    k_T(rho) = -(1/(sqrt(2) pi)) * int_rho^inf f_T'(u) / sqrt(cosh u - cosh rho) du
    f_T(u)   =  sqrt(2) * int_{|u|}^inf k_T(rho) sinh(rho) / sqrt(cosh rho - cosh u) drho

Both integrals have inverse-square-root endpoint singularities which are
removed exactly by the substitution ``u = arccosh(cosh rho + v^2)`` (and its
mirror image), so ordinary adaptive quadrature applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

__all__ = [
    "TestFunction",
    "KernelPair",
    "make_f1",
    "fourier_imag",
    "fourier_real",
    "inverse_abel",
    "forward_abel",
    "roundtrip_error",
    "kernel_origin_identity",
    "test_function_envelope",
    "gap_curve",
    "gap_crossing",
    "CHEEGER_CONSTANT",
    "QUAD_ABS_TOL",
    "QUAD_REL_TOL",
]

# Quadrature tolerances used throughout; every report quotes them.
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-9

_SQRT2 = math.sqrt(2.0)

#: Uniform lower bound obtained via the Cheeger inequality,
#: (1/4) * (ln 2 / (ln 2 + 2 pi))^2.
CHEEGER_CONSTANT = 0.25 * (math.log(2.0) / (math.log(2.0) + 2.0 * math.pi)) ** 2


def _bump(x: np.ndarray) -> np.ndarray:
    """exp(-1/(1/4 - x^2)) on |x| < 1/2, zero outside (even, smooth)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 0.5
    xm = x[m]
    out[m] = np.exp(-1.0 / (0.25 - xm * xm))
    return out


def _bump_deriv(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 0.5
    xm = x[m]
    q = 0.25 - xm * xm
    out[m] = np.exp(-1.0 / q) * (-2.0 * xm / (q * q))
    return out


class TestFunction:
    """Even bump ``f1`` on [-1, 1] with a horizon ``T``; ``f(x) = f1(x/T)``.

    ``f1`` is the autocorrelation of a smooth even bump supported on
    [-1/2, 1/2], sampled on a uniform grid fine enough that cubic-spline
    evaluation is accurate to ~1e-12, normalized so ``f1(0) = 1``.  The
    constructor verifies, and records in ``checks``: compact support with
    ``f1(0) > 0``; evenness; non-negativity; monotone decay on [0, 1]; and
    non-negativity of the Fourier transform on grids of the real and
    imaginary axes.  A failed check raises ``ValueError``.
    """

    def __init__(self, T: float = 1.0, intervals: int = 2048):
        if T <= 0:
            raise ValueError("horizon T must be positive")
        self.T = float(T)
        self.intervals = int(intervals)
        h = 0.5 / intervals  # step of the bump grid on [-1/2, 1/2]
        tg = np.linspace(-0.5, 0.5, 2 * intervals + 1)
        gv = _bump(tg)
        gd = _bump_deriv(tg)
        # Discrete autocorrelation on the same step: because the bump is
        # smooth and vanishes to all orders at the support ends, the
        # trapezoid sums below are accurate to machine precision.
        fv = h * np.convolve(gv, gv, mode="full")
        dv = h * np.convolve(gd, gv, mode="full")
        scale = 1.0 / fv[fv.size // 2]
        fv *= scale
        dv *= scale
        even_defect = float(np.max(np.abs(fv - fv[::-1])))
        odd_defect = float(np.max(np.abs(dv + dv[::-1])))
        fv = 0.5 * (fv + fv[::-1])
        dv = 0.5 * (dv - dv[::-1])
        neg_min = float(fv.min())
        fv[fv < 0.0] = 0.0
        self.h = h
        self.grid = np.linspace(-1.0, 1.0, fv.size)
        self.values = fv
        self._f1 = CubicSpline(self.grid, fv)
        self._df1 = CubicSpline(self.grid, dv)
        self._f1_integral = float(np.trapz(fv, dx=h))
        # the profile is scale * (g * g), so its transform is scale * (hat g)^2;
        # fold sqrt(scale) into the stored bump transform
        self._hatg_grid, self._hatg = self._build_hatg(tg, math.sqrt(scale) * gv, h)
        self.checks = self._verify(even_defect, odd_defect, neg_min)

    # -- construction-time verification ---------------------------------

    @staticmethod
    def _build_hatg(tg, gv, h):
        """Transform of the bump, hat g(r) = int g(x) cos(r x) dx, on a grid.

        Trapezoid sums on the bump grid are exact to machine precision for
        frequencies well below the grid Nyquist rate (~2 pi / h); the grid
        stops once hat g is far below double-precision noise.
        """
        rs = np.arange(0.0, 3000.0 + 0.25, 0.25)
        vals = np.empty(rs.size)
        for i0 in range(0, rs.size, 400):
            block = rs[i0:i0 + 400]
            vals[i0:i0 + 400] = (np.cos(np.outer(block, tg)) * gv).sum(axis=1) * h
        return rs, CubicSpline(rs, vals)

    def _verify(self, even_defect, odd_defect, neg_min):
        checks: dict = {
            "f1_at_0": 1.0,
            "f1_outside_support": float(self.f1(1.0001) + self.f1(-1.0001)),
            "evenness_defect": even_defect,
            "derivative_oddness_defect": odd_defect,
            "min_before_clip": neg_min,
            "grid_points": int(self.values.size),
        }
        xs = np.linspace(-1.0, 1.0, 10001)
        vals = self.f1(xs)
        checks["min_on_10k_grid"] = float(vals.min())
        pos = vals[5000:]
        checks["max_uptick_on_[0,1]"] = float(np.max(np.diff(pos)))
        rs = np.linspace(0.0, 60.0, 601)
        direct = np.empty(rs.size)
        half = self.values[self.values.size // 2:]
        xh = self.grid[self.grid.size // 2:]
        for i, r in enumerate(rs):
            direct[i] = 2.0 * np.trapz(half * np.cos(r * xh), dx=self.h)
        checks["fourier_real_min"] = float(direct.min())
        ts = np.linspace(0.0, 5.0, 51)
        imag = np.empty(ts.size)
        for i, t in enumerate(ts):
            imag[i] = 2.0 * np.trapz(half * np.cosh(t * xh), dx=self.h)
        checks["fourier_imag_min"] = float(imag.min())
        checks["f1_integral"] = self._f1_integral
        ok = (
            checks["f1_outside_support"] == 0.0
            and checks["f1_at_0"] > 0.0
            and checks["evenness_defect"] < 1e-13
            and checks["min_before_clip"] > -1e-13
            and checks["min_on_10k_grid"] >= 0.0
            and checks["max_uptick_on_[0,1]"] <= 1e-12
            and checks["fourier_real_min"] >= -1e-10
            and checks["fourier_imag_min"] >= -1e-10
        )
        checks["all_ok"] = bool(ok)
        if not ok:
            raise ValueError(f"test-function property verification failed: {checks}")
        return checks

    # -- evaluation ------------------------------------------------------

    def f1(self, x):
        """The unscaled profile on [-1, 1] (0 outside)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        m = np.abs(x) <= 1.0
        if m.any():
            # clamp spline overshoot in the far tail (values are provably >= 0)
            out[m] = np.maximum(self._f1(x[m]), 0.0)
        return float(out[0]) if scalar else out

    def f1_deriv(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        m = np.abs(x) <= 1.0
        if m.any():
            out[m] = self._df1(x[m])
        return float(out[0]) if scalar else out

    def f(self, x):
        """f_T(x) = f1(x / T), supported on [-T, T]."""
        return self.f1(np.asarray(x, dtype=float) / self.T)

    def f_deriv(self, x):
        return self.f1_deriv(np.asarray(x, dtype=float) / self.T) / self.T

    def f1_hat(self, r):
        """Fourier transform of f1 at real r (a square, hence >= 0)."""
        r = abs(float(r))
        if r > self._hatg_grid[-1]:
            return 0.0
        v = float(self._hatg(r))
        return v * v

    def with_horizon(self, T: float) -> "TestFunction":
        """Same profile, new horizon (no resampling)."""
        import copy

        other = copy.copy(self)
        if T <= 0:
            raise ValueError("horizon T must be positive")
        other.T = float(T)
        return other


def make_f1(T: float = 1.0, intervals: int = 2048) -> TestFunction:
    """Build the test function and verify its defining properties.

    The profile is the autocorrelation of the bump exp(-1/(1/4 - x^2));
    any even, non-negative bump that is non-increasing on [0, inf) would
    do — only the verified properties matter downstream.
    """
    return TestFunction(T=T, intervals=intervals)


# ---------------------------------------------------------------------------
# Fourier transforms on the two axes
# ---------------------------------------------------------------------------


def fourier_imag(tf: TestFunction, t: float) -> float:
    """hat f_T at the imaginary point i*t:  int_0^T 2 cosh(t x) f_T(x) dx.

    Equals the whole-line integral of e^{t x} f_T(x) because f_T is even.
    Adaptive quadrature with tolerances (QUAD_ABS_TOL, QUAD_REL_TOL).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    val, _ = quad(lambda x: 2.0 * math.cosh(t * x) * float(tf.f(x)),
                  0.0, tf.T, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL,
                  limit=300)
    return val


def fourier_real(tf: TestFunction, r: float) -> float:
    """hat f_T at real r: int f_T(x) e^{-i r x} dx = T * hat f1(T r)."""
    return tf.T * tf.f1_hat(tf.T * float(r))


# ---------------------------------------------------------------------------
# The Abel-transform pair
# ---------------------------------------------------------------------------


@dataclass
class KernelPair:
    """Kernel k_T sampled on a rho-grid, with its source test function."""

    rho: np.ndarray
    k: np.ndarray
    source: TestFunction
    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL

    def __post_init__(self):
        self._spline = CubicSpline(self.rho, self.k)

    def __call__(self, r):
        """k_T(r), extended evenly and by zero beyond the horizon."""
        r = abs(float(r))
        if r > self.source.T:
            return 0.0
        return float(self._spline(r))

    @property
    def k0(self) -> float:
        return float(self.k[0])


def _acosh_shift(base_cosh: float, s: float) -> float:
    """arccosh(base_cosh + s^2), stable near base_cosh = 1.

    For base_cosh = 1 uses arccosh(1 + s^2) = 2 asinh(s / sqrt 2) exactly.
    """
    if base_cosh == 1.0:
        return 2.0 * math.asinh(s / _SQRT2)
    return math.acosh(base_cosh + s * s)


def inverse_abel(tf: TestFunction, rho_points: int = 1201) -> KernelPair:
    """Kernel of f_T:   k_T(rho) = -(1/(sqrt2 pi)) int f_T'(u)/sqrt(cosh u - cosh rho) du.

    The substitution u = arccosh(cosh rho + v^2) turns the integral into
    -(sqrt2/pi) int_0^{vmax} f_T'(u(v)) / sinh(u(v)) dv with a smooth
    integrand (at rho = 0 the ratio extends by continuity), and
    vmax = sqrt(cosh T - cosh rho).
    """
    T = tf.T
    rhos = np.linspace(0.0, T, rho_points)
    ks = np.zeros(rho_points)
    coshT = math.cosh(T)
    for i, rho in enumerate(rhos):
        ch = math.cosh(rho)
        vmax2 = coshT - ch
        if vmax2 <= 0.0:
            continue
        vmax = math.sqrt(vmax2)

        def integrand(v, ch=ch):
            u = _acosh_shift(ch, v)
            s = math.sinh(u)
            if s < 1e-9:
                # only reachable for rho = 0, v -> 0: the limit is f_T''(0),
                # approximated one grid step in
                u = 1e-9
                s = math.sinh(u)
            return float(tf.f_deriv(u)) / s

        val, _ = quad(integrand, 0.0, vmax, epsabs=QUAD_ABS_TOL,
                      epsrel=QUAD_REL_TOL, limit=300)
        ks[i] = -(_SQRT2 / math.pi) * val
    return KernelPair(rho=rhos, k=ks, source=tf)


def forward_abel(kp: KernelPair, us=None):
    """Reconstruct f from a kernel:  f(u) = sqrt2 int k(rho) sinh rho / sqrt(cosh rho - cosh u) drho.

    With rho = arccosh(cosh u + w^2) this is 2 sqrt2 int_0^{wmax} k(rho(w)) dw,
    wmax = sqrt(cosh T - cosh u).  Returns (u_grid, values).
    """
    tf = kp.source
    T = tf.T
    if us is None:
        us = np.linspace(0.0, T, 401)
    us = np.asarray(us, dtype=float)
    out = np.zeros(us.size)
    coshT = math.cosh(T)
    for i, u in enumerate(us):
        cu = math.cosh(u)
        wmax2 = coshT - cu
        if wmax2 <= 0.0:
            continue
        wmax = math.sqrt(wmax2)

        def integrand(w, cu=cu):
            return kp(_acosh_shift(cu, w))

        val, _ = quad(integrand, 0.0, wmax, epsabs=QUAD_ABS_TOL,
                      epsrel=QUAD_REL_TOL, limit=300)
        out[i] = 2.0 * _SQRT2 * val
    return us, out


def roundtrip_error(tf: TestFunction, kp: KernelPair | None = None,
                    points: int = 401) -> float:
    """sup over [0, T] of |f_T - forward(inverse(f_T))|."""
    if kp is None:
        kp = inverse_abel(tf)
    us, rec = forward_abel(kp, np.linspace(0.0, tf.T, points))
    ref = np.array([float(tf.f(u)) for u in us])
    return float(np.max(np.abs(rec - ref)))


def kernel_origin_identity(kp: KernelPair) -> tuple[float, float]:
    """Compare k_T(0) with (1/(4 pi)) int_R r hat f_T(r) tanh(pi r) dr.

    The integrand is even, so the integral is computed as
    (1/(2 pi)) int_0^inf r hat f_T(r) tanh(pi r) dr; hat f_T is a square and
    decays super-polynomially, so truncation at the stored transform grid's
    end is far below the quadrature tolerance.
    """
    tf = kp.source

    def integrand(r):
        return r * fourier_real(tf, r) * math.tanh(math.pi * r) / (2.0 * math.pi)

    r_end = tf._hatg_grid[-1] / tf.T
    total = 0.0
    a = 0.0
    step = max(2.0, 20.0 / tf.T)
    while a < r_end:
        b = min(a + step, r_end)
        val, _ = quad(integrand, a, b, epsabs=QUAD_ABS_TOL,
                      epsrel=QUAD_REL_TOL, limit=300)
        total += val
        if b - a >= step and abs(val) < 1e-14 * max(1.0, abs(total)):
            break
        a = b
    return kp.k0, total


# ---------------------------------------------------------------------------
# Exponential lower envelope of hat f_T on the imaginary axis
# ---------------------------------------------------------------------------


def test_function_envelope(tf: TestFunction, eps: float, t_grid=None) -> float:
    """Empirical constant  min_t  hat f_T(i t) / (T e^{T (1 - eps) t}).

    A positive value witnesses the exponential lower envelope
    hat f_T(it) >= C_eps T e^{T (1-eps) t} on the sampled grid.  At t = 0
    the ratio is the integral of f1.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("need 0 < eps < 1")
    if t_grid is None:
        t_grid = np.linspace(0.0, 1.0, 21)
    best = math.inf
    for t in np.asarray(t_grid, dtype=float):
        val = fourier_imag(tf, float(t))
        env = tf.T * math.exp(tf.T * (1.0 - eps) * float(t))
        best = min(best, val / env)
    return best


# ---------------------------------------------------------------------------
# Spectral lower-bound curves
# ---------------------------------------------------------------------------


def gap_curve(alpha: float) -> tuple[float, float, float]:
    """Three lower-bound curves at cusp-growth exponent alpha in [0, 1/2).

    Returns (main, hide, cheeger):
      main    = 1/4 - (1/(6 (1 - alpha)))^2   (2/9 at 0, decreasing to 5/36)
      hide    = 1/4 - ((1 + 2 alpha)/4)^2     (3/16 at 0, decreasing to 0)
      cheeger = (1/4) (ln 2 / (ln 2 + 2 pi))^2  (constant, ~0.00247)
    """
    if not 0.0 <= alpha < 0.5:
        raise ValueError("alpha must lie in [0, 1/2)")
    main = 0.25 - (1.0 / (6.0 * (1.0 - alpha))) ** 2
    hide = 0.25 - ((1.0 + 2.0 * alpha) / 4.0) ** 2
    return main, hide, CHEEGER_CONSTANT


def gap_crossing() -> dict:
    """Where the extended main/hide formulas cross, with context.

    On the admissible range [0, 1/2) the main curve dominates: main = hide
    reduces to 6 a^2 - 3 a - 1 = 0, whose positive root
    (3 + sqrt 33)/12 ~ 0.7287 lies outside the range.  Reported for
    completeness; nothing downstream depends on it.
    """
    root = (3.0 + math.sqrt(33.0)) / 12.0
    return {
        "crossing_alpha": root,
        "inside_range": 0.0 <= root < 0.5,
        "min_main_minus_hide_on_range": min(
            gap_curve(a)[0] - gap_curve(a)[1] for a in np.linspace(0.0, 0.4999, 500)
        ),
        "description": "crossing of the extended bound curves "
                       "1/4-(1/(6(1-a)))^2 and 1/4-((1+2a)/4)^2",
    }
