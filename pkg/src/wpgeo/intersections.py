"""Exact psi/kappa_1 intersection brackets on moduli of curves.

The central object is the normalized bracket  [tau_{d_1} ... tau_{d_n}]_{g,n},
a single-grade element of Q[pi^2] whose grade is d0 = 3g-3+n - |d|.  Brackets
are computed by a memoized topological recursion that reduces the largest
index; a point-insertion identity changes n and serves both as the route to
n = 0 and as an independent cross-check; a splitting identity ties genus g to
genus g-1 and provides a second cross-check.

Internally every bracket is held as a plain rational c with value c*pi^(2*d0),
which is exact because all recursion steps are grade-homogeneous.  The hot
engine uses gmpy2.mpq when available and fractions.Fraction otherwise; results
are identical either way.

A MemoStore persists queried brackets in a line-oriented text cache (format
"WPTAU v1") with a sha256 integrity footer.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import os
import sys
import threading
from dataclasses import dataclass
from fractions import Fraction

from .exactpi import PiGraded

try:  # optional fast rationals
    from gmpy2 import mpq as _rat
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _rat = Fraction

__all__ = [
    "TauIndex",
    "MemoStore",
    "CacheCorruption",
    "zeta_even",
    "a_coeff",
    "tau",
    "volume",
    "weight_coefficient_checks",
    "insertion_consistency",
    "splitting_consistency",
    "consistency_sweep",
    "bracket_lattice",
    "default_store",
    "default_cache_path",
]

CACHE_ENV = "WPGEO_CACHE"
CACHE_HEADER = "WPTAU v1"

sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))


# ---------------------------------------------------------------------------
# Exact zeta values at even integers and the recursion weight coefficients
# ---------------------------------------------------------------------------

_ZETA_RAT = [None, Fraction(1, 6)]  # zeta(2i) = _ZETA_RAT[i] * pi^(2i)


def _zeta_rat(i: int) -> Fraction:
    while len(_ZETA_RAT) <= i:
        m = len(_ZETA_RAT)
        # Euler's recurrence: (m + 1/2) q_m = sum_{j=1}^{m-1} q_j q_{m-j}
        s = sum(_ZETA_RAT[j] * _ZETA_RAT[m - j] for j in range(1, m))
        _ZETA_RAT.append(Fraction(2, 2 * m + 1) * s)
    return _ZETA_RAT[i]


def zeta_even(i: int) -> PiGraded:
    """Exact zeta(2i) as a rational multiple of pi^(2i), for i >= 1."""
    if i < 1:
        raise ValueError("zeta_even requires i >= 1")
    return PiGraded.term(i, _zeta_rat(i))


def a_coeff(i: int) -> PiGraded:
    """Weight coefficient a_i: a_0 = 1/2, a_i = zeta(2i)(1 - 2^(1-2i))."""
    if i < 0:
        raise ValueError("a_coeff requires i >= 0")
    if i == 0:
        return PiGraded.from_rational(Fraction(1, 2))
    return PiGraded.term(i, _zeta_rat(i) * (1 - Fraction(1, 2 ** (2 * i - 1))))


def _a_rat(i: int) -> Fraction:
    """Rational part of a_i (the multiplier of pi^(2i))."""
    if i == 0:
        return Fraction(1, 2)
    return _zeta_rat(i) * (1 - Fraction(1, 2 ** (2 * i - 1)))


# 120-digit rational approximation of pi^2: the a_i gaps shrink like 4^-i, so
# they must be evaluated in exact arithmetic and floated only at the end.
_PI2_FRAC = Fraction(
    9869604401089358618834490999876151135313699407240790626413349376220044822419205243001773403718552231824025913774023144077,  # noqa: E501
    10 ** 120,
)


def weight_coefficient_checks(imax: int) -> dict:
    """Numeric sanity report on the weight coefficients a_i.

    Returns the partial sum of i*(a_{i+1} - a_i) up to imax (which telescopes
    to 1/4 in the limit), the value a_imax (which tends to 1), the remainder
    envelope 4^(-imax) scale, and the smallest admissible constant C with
    1/(C*4^i) <= a_{i+1} - a_i <= C/4^i over the computed range.
    """
    if imax < 2:
        raise ValueError("imax must be at least 2")
    if imax > 180:
        raise ValueError("imax beyond the supported precision range")
    pw = [_PI2_FRAC ** i for i in range(imax + 2)]
    vals = [_a_rat(i) * pw[i] for i in range(imax + 2)]
    gaps = [vals[i + 1] - vals[i] for i in range(imax + 1)]
    partial = float(sum(i * gaps[i] for i in range(imax + 1)))
    c_lo = max(float(gaps[i] * 4 ** i) for i in range(imax + 1))
    c_hi = max(1.0 / float(gaps[i] * 4 ** i) for i in range(imax + 1))
    return {
        "imax": imax,
        "partial_sum": partial,
        "partial_sum_target": 0.25,
        "limit_value": float(vals[imax]),
        "limit_target": 1.0,
        "remainder_envelope": 4.0 ** (-imax),
        "gap_constant": max(c_lo, c_hi),
    }


# ---------------------------------------------------------------------------
# Bracket indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TauIndex:
    """Canonical index (g, n, d) of a bracket; d non-increasing, length n."""

    g: int
    n: int
    d: tuple

    def __post_init__(self):
        if self.g < 0 or self.n < 1:
            raise ValueError("need g >= 0 and n >= 1")
        if 2 * self.g - 2 + self.n <= 0:
            raise ValueError("unstable index (2g-2+n <= 0)")
        d = tuple(int(x) for x in self.d)
        if len(d) != self.n:
            raise ValueError("d must have length n")
        if any(x < 0 for x in d):
            raise ValueError("d entries must be non-negative")
        object.__setattr__(self, "d", tuple(sorted(d, reverse=True)))

    @classmethod
    def of(cls, g: int, n: int, d) -> "TauIndex":
        return cls(g, n, tuple(d))

    @property
    def dim(self) -> int:
        return 3 * self.g - 3 + self.n

    @property
    def d0(self) -> int:
        return self.dim - sum(self.d)

    @property
    def vanishes(self) -> bool:
        """True when |d| exceeds the dimension, forcing the bracket to 0."""
        return sum(self.d) > self.dim

    @property
    def nonzero(self) -> tuple:
        return tuple(x for x in self.d if x)


# ---------------------------------------------------------------------------
# Persistent store
# ---------------------------------------------------------------------------


class CacheCorruption(ValueError):
    """Raised when a cache file fails its integrity or format checks."""


class MemoStore:
    """Thread-safe map TauIndex -> PiGraded with an optional text cache file.

    Entries are immutable once inserted; `put` is insert-if-absent and returns
    the stored value.  `flush` writes the canonical serialization (sorted
    entries, sha256 footer) so that a reload reproduces identical values.
    """

    def __init__(self, path: str | None = None):
        self.path = path
        self.dirty = False
        self._data: dict = {}
        self._lock = threading.Lock()
        self._engine = None

    # -- mapping interface -------------------------------------------------

    def get(self, idx: TauIndex):
        return self._data.get((idx.g, idx.n, idx.d))

    def put(self, idx: TauIndex, value: PiGraded) -> PiGraded:
        key = (idx.g, idx.n, idx.d)
        with self._lock:
            cur = self._data.get(key)
            if cur is not None:
                if cur != value:
                    raise CacheCorruption(
                        "conflicting values for %s" % (key,))
                return cur
            self._data[key] = value
            self.dirty = True
            return value

    def __len__(self):
        return len(self._data)

    def __contains__(self, idx: TauIndex):
        return (idx.g, idx.n, idx.d) in self._data

    def items(self):
        return self._data.items()

    # -- persistence -------------------------------------------------------

    def flush(self, path: str | None = None) -> str:
        path = path or self.path
        if path is None:
            raise ValueError("no cache path configured")
        lines = []
        for (g, n, d) in sorted(self._data):
            val = self._data[(g, n, d)]
            lines.append("%d %d %s %s\n" % (g, n, ",".join(map(str, d)),
                                            val.serialize()))
        body = "".join(lines)
        digest = hashlib.sha256(body.encode()).hexdigest()
        tmp = path + ".tmp"
        os.makedirs(os.path.dirname(os.path.abspath(path)) or ".", exist_ok=True)
        with open(tmp, "w") as fh:
            fh.write(CACHE_HEADER + "\n")
            fh.write(body)
            fh.write("#sha256 %s\n" % digest)
        os.replace(tmp, path)
        self.dirty = False
        return path

    def load(self, path: str | None = None) -> int:
        """Merge entries from a cache file; returns the number read."""
        path = path or self.path
        if path is None:
            raise ValueError("no cache path configured")
        with open(path) as fh:
            text = fh.read()
        return self.loads(text)

    def loads(self, text: str) -> int:
        lines = text.splitlines(keepends=True)
        if not lines or lines[0].strip() != CACHE_HEADER:
            raise CacheCorruption("bad or missing cache header")
        if not lines[-1].startswith("#sha256 "):
            raise CacheCorruption("missing integrity footer")
        body = "".join(lines[1:-1])
        want = lines[-1].split()[1]
        got = hashlib.sha256(body.encode()).hexdigest()
        if got != want:
            raise CacheCorruption("cache checksum mismatch: %s != %s"
                                  % (got, want))
        count = 0
        for line in lines[1:-1]:
            parts = line.split()
            if len(parts) != 4:
                raise CacheCorruption("malformed cache line: %r" % line)
            g, n = int(parts[0]), int(parts[1])
            d = tuple(int(x) for x in parts[2].split(","))
            val = PiGraded.parse(parts[3])
            key = (g, n, tuple(sorted(d, reverse=True)))
            with self._lock:
                cur = self._data.get(key)
                if cur is None:
                    self._data[key] = val
                elif cur != val:
                    raise CacheCorruption("conflicting cache entry %s" % (key,))
            count += 1
        if self._engine is not None:
            self._engine.absorb(self._data)
        return count

    # -- engine binding ----------------------------------------------------

    @property
    def engine(self) -> "_Engine":
        if self._engine is None:
            self._engine = _Engine()
            self._engine.absorb(self._data)
        return self._engine


# ---------------------------------------------------------------------------
# The recursion engine (rational c-values; value = c * pi^(2 d0))
# ---------------------------------------------------------------------------

_A_RAT = [_rat(1, 2)]  # a_i rational parts, extended on demand


def _a_fast(i: int):
    while len(_A_RAT) <= i:
        f = _a_rat(len(_A_RAT))
        _A_RAT.append(_rat(f.numerator, f.denominator))
    return _A_RAT[i]


def _ins1(lst, w):
    """Insert w into the descending list lst; return a tuple."""
    out = []
    placed = False
    for x in lst:
        if not placed and w >= x:
            out.append(w)
            placed = True
        out.append(x)
    if not placed:
        out.append(w)
    return tuple(out)


def _ins2(lst, k1, k2):
    """Insert k2 >= k1 into the descending list lst; return a tuple."""
    out = []
    p2 = p1 = False
    for x in lst:
        if not p2 and k2 >= x:
            out.append(k2)
            p2 = True
        if p2 and not p1 and k1 >= x:
            out.append(k1)
            p1 = True
        out.append(x)
    if not p2:
        out.append(k2)
    if not p1:
        out.append(k1)
    return tuple(out)


def _submultisets(vals, mults):
    """Ordered sub-multiset splits of a multiset given as values/multiplicities.

    Yields (I_nonzero, |I|, J_nonzero, |J|, multiplicity) over all ways to take
    a sub-multiset I, with J the complement.
    """
    total = sum(mults)
    for take in itertools.product(*[range(m + 1) for m in mults]):
        w = 1
        nI = 0
        Inz = []
        Jnz = []
        for v, m, t in zip(vals, mults, take):
            w *= math.comb(m, t)
            nI += t
            if v:
                Inz.extend([v] * t)
                Jnz.extend([v] * (m - t))
        Inz.sort(reverse=True)
        Jnz.sort(reverse=True)
        yield tuple(Inz), nI, tuple(Jnz), total - nI, w


class _Engine:
    """Memoized recursion on rational bracket coefficients.

    Keys are (g, n, nz) with nz the non-increasing tuple of nonzero indices.
    Two auxiliary caches hold aggregates shared by sibling brackets (same
    remainder indices, varying distinguished index): diagonal sums over pairs
    of free indices, and genus-splitting convolutions.  Both are cheap to
    rebuild from the main memo, so they are discarded under memory pressure.
    """

    # Aggregate-cache bounds; beyond these the caches are cleared (values are
    # recomputable from the main memo by plain lookups).
    D_LIMIT = 1_500_000
    E_LIMIT = 5_000_000

    def __init__(self):
        self.M = {
            (0, 3, ()): _rat(1),
            (1, 1, ()): _rat(1, 12),
            (1, 1, (1,)): _rat(1, 2),
        }
        self.DM = {}
        self.EM = {}

    def absorb(self, data: dict) -> None:
        """Seed the rational memo from PiGraded store entries."""
        for (g, n, d), val in data.items():
            nz = tuple(x for x in d if x)
            key = (g, n, nz)
            if key in self.M:
                continue
            d0 = 3 * g - 3 + n - sum(d)
            c = val.coeff(d0)
            self.M[key] = _rat(c.numerator, c.denominator)

    # -- public ------------------------------------------------------------

    def c(self, g: int, n: int, nz: tuple):
        """Bracket coefficient; assumes (g,n) stable, sum(nz) <= 3g-3+n."""
        v = self.M.get((g, n, nz))
        if v is None:
            v = self._compute(g, n, nz)
            self.M[(g, n, nz)] = v
        return v

    def c_checked(self, g: int, n: int, d) -> object:
        """Bracket coefficient with the vanishing/stability conventions."""
        if 2 * g - 2 + n <= 0:
            return _rat(0)
        if any(x < 0 for x in d):
            return _rat(0)
        if sum(d) > 3 * g - 3 + n:
            return _rat(0)
        return self.c(g, n, tuple(sorted((x for x in d if x), reverse=True)))

    # -- aggregates --------------------------------------------------------

    def _dcell(self, g, n, R, s):
        """Sum of c(g,n, R + {k1,k2}) over k1+k2 = s (R descending)."""
        key = (g, n, R, s)
        v = self.DM.get(key)
        if v is not None:
            return v
        if len(self.DM) > self.D_LIMIT:
            self.DM.clear()
        Mget = self.M.get
        M = self.M
        lr = list(R)
        tot = _rat(0)
        for k1 in range(0, s // 2 + 1):
            k2 = s - k1
            if k1 == 0:
                child = R if k2 == 0 else _ins1(lr, k2)
            else:
                child = _ins2(lr, k1, k2)
            ck = (g, n, child)
            bv = Mget(ck)
            if bv is None:
                bv = self._compute(g, n, child)
                M[ck] = bv
            tot += bv if k1 == k2 else (bv + bv)
        self.DM[key] = tot
        return tot

    def _ecell(self, g, nI, Inz, nJ, Jnz, s):
        """Genus-split convolution sum over g1+g2 = g and k1+k2 = s."""
        key = (g, nI, Inz, nJ, Jnz, s)
        v = self.EM.get(key)
        if v is not None:
            return v
        if len(self.EM) > self.E_LIMIT:
            self.EM.clear()
        sI = sum(Inz)
        sJ = sum(Jnz)
        lI = list(Inz)
        lJ = list(Jnz)
        Mget = self.M.get
        M = self.M
        tot = _rat(0)
        for g1 in range(0, g + 1):
            g2 = g - g1
            if (g1 == 0 and nI < 2) or (g2 == 0 and nJ < 2):
                continue
            cap1 = 3 * g1 - 2 + nI - sI
            cap2 = 3 * g2 - 2 + nJ - sJ
            if cap1 < 0 or cap2 < 0:
                continue
            lo = s - cap2
            if lo < 0:
                lo = 0
            hi = cap1 if cap1 < s else s
            for k1 in range(lo, hi + 1):
                c1k = (g1, nI + 1, Inz if k1 == 0 else _ins1(lI, k1))
                b1 = Mget(c1k)
                if b1 is None:
                    b1 = self._compute(*c1k)
                    M[c1k] = b1
                if not b1:
                    continue
                c2k = (g2, nJ + 1, Jnz if k1 == s else _ins1(lJ, s - k1))
                b2 = Mget(c2k)
                if b2 is None:
                    b2 = self._compute(*c2k)
                    M[c2k] = b2
                tot += b1 * b2
        self.EM[key] = tot
        return tot

    # -- the recursion -----------------------------------------------------

    def _compute(self, g, n, nz):
        dim = 3 * g - 3 + n
        if nz:
            d1 = nz[0]
            rest = nz[1:]
        else:
            d1 = 0
            rest = ()
        srest = sum(rest)
        d0 = dim - d1 - srest
        m0 = n - 1 - len(rest)  # zeros among the remaining indices
        acc = _rat(0)
        Mget = self.M.get
        M = self.M
        a = _a_fast
        a(d0)

        # Merge the distinguished index with one remaining index.
        if n >= 2:
            restl = list(rest)
            seen = set()
            for i, v in enumerate(rest):
                if v in seen:
                    continue
                seen.add(v)
                mv = rest.count(v)
                base = restl[:i] + restl[i + 1:]
                sub = _rat(0)
                w0 = d1 + v - 1
                for L in range(0 if w0 >= 0 else -w0, d0 + 1):
                    w = w0 + L
                    ck = (g, n - 1, tuple(base) if w == 0 else _ins1(base, w))
                    bv = Mget(ck)
                    if bv is None:
                        bv = self._compute(*ck)
                        M[ck] = bv
                    sub += _A_RAT[L] * bv
                acc += (8 * mv * (2 * v + 1)) * sub
            if m0 > 0:
                sub = _rat(0)
                w0 = d1 - 1
                for L in range(0 if w0 >= 0 else -w0, d0 + 1):
                    w = w0 + L
                    ck = (g, n - 1, rest if w == 0 else _ins1(restl, w))
                    bv = Mget(ck)
                    if bv is None:
                        bv = self._compute(*ck)
                        M[ck] = bv
                    sub += _A_RAT[L] * bv
                acc += (8 * m0) * sub

        # Pinch a handle: pairs of new indices at genus g-1.
        if g >= 1 and (g >= 2 or n >= 2):
            sub = _rat(0)
            lo = 2 - d1
            if lo < 0:
                lo = 0
            for L in range(lo, d0 + 1):
                sub += _A_RAT[L] * self._dcell(g - 1, n + 1, rest, L + d1 - 2)
            acc += 16 * sub

        # Separating splittings.
        lo0 = 2 - d1
        if lo0 < 0:
            lo0 = 0
        if rest or m0:
            vals = []
            mults = []
            for v in rest:
                if v not in vals:
                    vals.append(v)
                    mults.append(rest.count(v))
            if m0:
                vals.append(0)
                mults.append(m0)
            for Inz, nI, Jnz, nJ, wI in _submultisets(vals, mults):
                keyI = (nI, Inz)
                keyJ = (nJ, Jnz)
                ka, kb = (keyI, keyJ) if keyI <= keyJ else (keyJ, keyI)
                sub = _rat(0)
                for L in range(lo0, d0 + 1):
                    ev = self._ecell(g, ka[0], ka[1], kb[0], kb[1], L + d1 - 2)
                    if ev:
                        sub += _A_RAT[L] * ev
                acc += (16 * wI) * sub
        else:
            sub = _rat(0)
            for L in range(lo0, d0 + 1):
                ev = self._ecell(g, 0, (), 0, (), L + d1 - 2)
                if ev:
                    sub += _A_RAT[L] * ev
            acc += 16 * sub

        return acc


# ---------------------------------------------------------------------------
# Public bracket and volume API
# ---------------------------------------------------------------------------

_DEFAULT_STORE: MemoStore | None = None


def default_cache_path() -> str | None:
    """Cache file path from the WPGEO_CACHE environment variable, if set."""
    return os.environ.get(CACHE_ENV)


def _packaged_cache_text() -> str | None:
    try:
        from importlib import resources

        ref = resources.files(__package__).joinpath("data/wptau.cache")
        if ref.is_file():
            return ref.read_text()
    except Exception:
        pass
    return None


def default_store() -> MemoStore:
    """Process-wide store, seeded from WPGEO_CACHE or the packaged cache."""
    global _DEFAULT_STORE
    if _DEFAULT_STORE is None:
        store = MemoStore(default_cache_path())
        loaded = False
        if store.path and os.path.exists(store.path):
            store.load()
            loaded = True
        if not loaded:
            text = _packaged_cache_text()
            if text is not None:
                store.loads(text)
        store.dirty = False
        _DEFAULT_STORE = store
    return _DEFAULT_STORE


def _as_index(idx, n=None, d=None) -> TauIndex:
    if isinstance(idx, TauIndex):
        return idx
    return TauIndex.of(idx, n, d)


def tau(idx, n=None, d=None, store: MemoStore | None = None) -> PiGraded:
    """Exact bracket value for a TauIndex (or tau(g, n, d) directly)."""
    idx = _as_index(idx, n, d)
    if store is None:
        store = default_store()
    if idx.vanishes:
        return PiGraded.zero
    hit = store.get(idx)
    if hit is not None:
        return hit
    c = store.engine.c(idx.g, idx.n, idx.nonzero)
    val = PiGraded.term(idx.d0, Fraction(int(c.numerator), int(c.denominator)))
    return store.put(idx, val)


def volume(g: int, n: int, store: MemoStore | None = None) -> PiGraded:
    """Exact Weil-Petersson volume constant V_{g,n} as an element of Q[pi^2]."""
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable (g,n)")
    if n >= 1:
        return tau(TauIndex.of(g, n, (0,) * n), store=store)
    # Reach n = 0 through the point-insertion identity applied at (g, 1).
    tot = PiGraded.zero
    for L in range(1, 3 * g - 2 + 1):
        w = Fraction((-1) ** (L - 1) * L, math.factorial(2 * L + 1))
        tot = tot + PiGraded.term(L - 1, w) * tau(TauIndex.of(g, 1, (L,)),
                                                  store=store)
    return tot / (2 * (2 * g - 2))


# ---------------------------------------------------------------------------
# Cross-checks
# ---------------------------------------------------------------------------


def insertion_consistency(idx, n=None, d=None,
                          store: MemoStore | None = None) -> bool:
    """Check (2g-2+n)*B(g,n,d) against the point-insertion expansion.

    The expansion writes the bracket through all single-index insertions at
    (g, n+1) with alternating pi-graded weights; it must agree exactly.
    """
    idx = _as_index(idx, n, d)
    g, nn = idx.g, idx.n
    lhs = (2 * g - 2 + nn) * tau(idx, store=store)
    rhs = PiGraded.zero
    for L in range(1, 3 * g - 2 + nn + 1):
        w = Fraction((-1) ** (L - 1) * L, math.factorial(2 * L + 1))
        child = TauIndex.of(g, nn + 1, idx.d + (L,))
        rhs = rhs + PiGraded.term(L - 1, w) * tau(child, store=store)
    return lhs == rhs / 2


def splitting_consistency(g: int, n: int, d,
                          store: MemoStore | None = None) -> bool:
    """Check the genus-splitting identity with base indices d (length n).

    [tau_0 tau_1 prod tau_d]_{g,n+2} must equal the genus-(g-1) term plus six
    times the sum over ordered genus/label splittings of products of
    two-zero-padded brackets.
    """
    if store is None:
        store = default_store()
    d = tuple(sorted((int(x) for x in d), reverse=True))
    if len(d) != n:
        raise ValueError("d must have length n")
    lhs = tau(TauIndex.of(g, n + 2, d + (1, 0)), store=store)
    rhs = PiGraded.zero
    if g >= 1:
        rhs = tau(TauIndex.of(g - 1, n + 4, d + (0, 0, 0, 0)), store=store)
    vals = []
    mults = []
    for v in d:
        if v not in vals:
            vals.append(v)
            mults.append(d.count(v))
    acc = PiGraded.zero
    for Inz, nI, Jnz, nJ, w in _submultisets(vals, mults):
        sI = sum(Inz)
        sJ = sum(Jnz)
        for g1 in range(0, g + 1):
            g2 = g - g1
            if 2 * g1 - 2 + nI + 2 <= 0 or 2 * g2 - 2 + nJ + 2 <= 0:
                continue
            if sI > 3 * g1 - 1 + nI or sJ > 3 * g2 - 1 + nJ:
                continue
            t1 = tau(TauIndex.of(g1, nI + 2, Inz + (0,) * (nI - len(Inz) + 2)),
                     store=store)
            if t1.is_zero():
                continue
            t2 = tau(TauIndex.of(g2, nJ + 2, Jnz + (0,) * (nJ - len(Jnz) + 2)),
                     store=store)
            if t2.is_zero():
                continue
            acc = acc + w * (t1 * t2)
    return lhs == rhs + 6 * acc


def bracket_lattice(dim_max: int):
    """All stable TauIndex with n >= 1 and 3g-3+n <= dim_max, all index vectors."""
    for g in itertools.count(0):
        if 3 * g - 2 > dim_max:
            break
        for n in range(1, dim_max - 3 * g + 3 + 1):
            if 2 * g - 2 + n <= 0:
                continue
            dim = 3 * g - 3 + n
            for tot in range(0, dim + 1):
                for part in _partitions_le(tot, n):
                    yield TauIndex.of(g, n, part + (0,) * (n - len(part)))


def _partitions_le(tot, maxparts):
    if tot == 0:
        yield ()
        return

    def rec(rem, mx, left):
        if rem == 0:
            yield ()
            return
        if left == 0:
            return
        for first in range(min(rem, mx), 0, -1):
            for tail in rec(rem - first, first, left - 1):
                yield (first,) + tail

    yield from rec(tot, tot, maxparts)


def consistency_sweep(dim_max: int, store: MemoStore | None = None) -> dict:
    """Run both cross-checks over the full bracket lattice up to dim_max."""
    if store is None:
        store = default_store()
    checked = ins_fail = split_checked = split_fail = 0
    for idx in bracket_lattice(dim_max):
        checked += 1
        if not insertion_consistency(idx, store=store):
            ins_fail += 1
        dd = list(idx.d)
        if idx.n >= 2 and 1 in dd and 0 in dd:
            base = list(idx.d)
            base.remove(1)
            base.remove(0)
            split_checked += 1
            if not splitting_consistency(idx.g, idx.n - 2, tuple(base),
                                         store=store):
                split_fail += 1
    return {
        "dim_max": dim_max,
        "insertion_checked": checked,
        "insertion_failures": ins_fail,
        "splitting_checked": split_checked,
        "splitting_failures": split_fail,
    }
