"""Exact coefficient ring Q[pi^2] and even symmetric boundary polynomials.

Volume coefficients of moduli spaces of bordered hyperbolic surfaces are
rational multiples of even powers of pi.  ``PiGraded`` stores such a value
exactly as a finite map ``grade m -> nonzero Fraction`` meaning
``sum_m q_m * pi^(2m)``.  ``BoundaryPolynomial`` stores an even symmetric
polynomial in boundary lengths ``x_1, ..., x_n`` whose coefficients are
PiGraded elements, keyed by the sorted exponent vector of ``x_i^2``.

All values are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "PiGraded",
    "BoundaryPolynomial",
    "pg_add",
    "pg_mul",
    "poly_eval",
    "poly_eval_exact",
    "distinct_permutations",
]

_PI2 = math.pi * math.pi


class PiGraded:
    """An element of Q[pi^2], kept in canonical form (no zero coefficients).

    Parameters
    ----------
    terms : mapping from int to Fraction-compatible
        Grade ``m`` (for pi^(2m)) to rational coefficient.  Zeros are dropped.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, Fraction] = {}
        for m, q in items:
            if m < 0:
                raise ValueError(f"negative grade {m}")
            q = Fraction(q)
            if q:
                clean[int(m)] = clean.get(int(m), Fraction(0)) + q
                if not clean[int(m)]:
                    del clean[int(m)]
        self._terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rational(cls, q) -> "PiGraded":
        """Grade-0 element q."""
        return cls({0: Fraction(q)})

    @classmethod
    def term(cls, m: int, q) -> "PiGraded":
        """Single term q * pi^(2m)."""
        return cls({m: Fraction(q)})

    zero: "PiGraded"  # set after class definition
    one: "PiGraded"

    # -- accessors --------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        """Copy of the grade -> coefficient map."""
        return dict(self._terms)

    def coeff(self, m: int) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def single_grade(self) -> int | None:
        """The unique grade if exactly one term is stored, else None."""
        if len(self._terms) == 1:
            return next(iter(self._terms))
        return None

    # -- ring operations --------------------------------------------------
    def __add__(self, other: "PiGraded") -> "PiGraded":
        if not isinstance(other, PiGraded):
            return NotImplemented
        out = dict(self._terms)
        for m, q in other._terms.items():
            s = out.get(m, Fraction(0)) + q
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        res = PiGraded.__new__(PiGraded)
        res._terms = out
        return res

    def __neg__(self) -> "PiGraded":
        res = PiGraded.__new__(PiGraded)
        res._terms = {m: -q for m, q in self._terms.items()}
        return res

    def __sub__(self, other: "PiGraded") -> "PiGraded":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiGraded):
            out: dict[int, Fraction] = {}
            for ma, qa in self._terms.items():
                for mb, qb in other._terms.items():
                    m = ma + mb
                    s = out.get(m, Fraction(0)) + qa * qb
                    if s:
                        out[m] = s
                    elif m in out:
                        del out[m]
            res = PiGraded.__new__(PiGraded)
            res._terms = out
            return res
        if isinstance(other, (int, Fraction)):
            q0 = Fraction(other)
            res = PiGraded.__new__(PiGraded)
            res._terms = {m: q * q0 for m, q in self._terms.items()} if q0 else {}
            return res
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, PiGraded):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- numerics & text --------------------------------------------------
    def eval(self) -> float:
        """Numeric value sum q_m pi^(2m) as a float."""
        return math.fsum(float(q) * _PI2**m for m, q in self._terms.items())

    def __float__(self) -> float:
        return self.eval()

    def serialize(self) -> str:
        """Canonical text form ``m:p/q`` joined by ``+`` (``0`` if empty)."""
        if not self._terms:
            return "0"
        return "+".join(f"{m}:{self._terms[m]}" for m in sorted(self._terms))

    @classmethod
    def parse(cls, text: str) -> "PiGraded":
        """Inverse of :meth:`serialize`."""
        text = text.strip()
        if text == "0":
            return cls.zero
        terms: dict[int, Fraction] = {}
        for part in text.split("+"):
            mtxt, _, qtxt = part.partition(":")
            if not qtxt:
                raise ValueError(f"bad PiGraded term {part!r}")
            m = int(mtxt)
            q = Fraction(qtxt)
            if m in terms or q == 0:
                raise ValueError(f"non-canonical PiGraded text {text!r}")
            terms[m] = q
        return cls(terms)

    def __repr__(self) -> str:
        return f"PiGraded({self.serialize()!r})"


PiGraded.zero = PiGraded()
PiGraded.one = PiGraded.from_rational(1)


def pg_add(a: PiGraded, b: PiGraded) -> PiGraded:
    """Exact sum in Q[pi^2], canonical form."""
    return a + b


def pg_mul(a: PiGraded, b: PiGraded) -> PiGraded:
    """Exact graded product in Q[pi^2] (pi^2a * pi^2b = pi^2(a+b))."""
    return a * b


def distinct_permutations(seq: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All distinct permutations of ``seq`` in lexicographic order.

    Standard next-permutation walk; duplicates in ``seq`` are visited once.
    """
    arr = sorted(seq)
    n = len(arr)
    while True:
        yield tuple(arr)
        i = n - 2
        while i >= 0 and arr[i] >= arr[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while arr[j] <= arr[i]:
            j -= 1
        arr[i], arr[j] = arr[j], arr[i]
        arr[i + 1 :] = reversed(arr[i + 1 :])


class BoundaryPolynomial:
    """Even symmetric polynomial in n boundary lengths with PiGraded coefficients.

    ``coeffs`` maps a sorted (non-increasing) exponent vector ``alpha`` of
    length n — the exponents of ``x_i^2`` — to the coefficient of the monomial
    symmetric sum over all distinct permutations of ``alpha``.  Evaluation
    symmetrizes, so the stored object is the full symmetric polynomial.
    """

    __slots__ = ("n", "_coeffs")

    def __init__(self, n: int, coeffs: Mapping[tuple[int, ...], PiGraded]):
        self.n = int(n)
        clean: dict[tuple[int, ...], PiGraded] = {}
        for alpha, c in coeffs.items():
            if len(alpha) != self.n:
                raise ValueError(f"exponent vector {alpha} has length != {self.n}")
            key = tuple(sorted(alpha, reverse=True))
            if c:
                if key in clean:
                    clean[key] = clean[key] + c
                else:
                    clean[key] = c
        self._coeffs = clean

    @property
    def coeffs(self) -> dict[tuple[int, ...], PiGraded]:
        return dict(self._coeffs)

    def degree(self) -> int:
        """Total degree in the x_i^2 variables (max |alpha|)."""
        return max((sum(a) for a in self._coeffs), default=0)

    def constant_term(self) -> PiGraded:
        return self._coeffs.get((0,) * self.n, PiGraded.zero)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoundaryPolynomial):
            return NotImplemented
        return self.n == other.n and self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"BoundaryPolynomial(n={self.n}, terms={len(self._coeffs)})"


def poly_eval(p: BoundaryPolynomial, x: Sequence[float]) -> float:
    """Numeric value of p at non-negative lengths x (fast float path)."""
    if len(x) != p.n:
        raise ValueError(f"expected {p.n} coordinates, got {len(x)}")
    y = [float(v) * float(v) for v in x]
    # per-variable power tables up to the maximum needed exponent
    dmax = p.degree()
    pw = [[1.0] * (dmax + 1) for _ in range(p.n)]
    for i in range(p.n):
        for e in range(1, dmax + 1):
            pw[i][e] = pw[i][e - 1] * y[i]
    total = 0.0
    for alpha, c in p._coeffs.items():
        cf = c.eval()
        s = 0.0
        for perm in distinct_permutations(alpha):
            t = 1.0
            for i, e in enumerate(perm):
                if e:
                    t *= pw[i][e]
            s += t
        total += cf * s
    return total


def poly_eval_exact(p: BoundaryPolynomial, x: Sequence[Fraction]) -> PiGraded:
    """Exact value of p at rational lengths x, as an element of Q[pi^2]."""
    if len(x) != p.n:
        raise ValueError(f"expected {p.n} coordinates, got {len(x)}")
    y = [Fraction(v) ** 2 for v in x]
    dmax = p.degree()
    pw = [[Fraction(1)] * (dmax + 1) for _ in range(p.n)]
    for i in range(p.n):
        for e in range(1, dmax + 1):
            pw[i][e] = pw[i][e - 1] * y[i]
    acc: dict[int, Fraction] = {}
    for alpha, c in p._coeffs.items():
        s = Fraction(0)
        for perm in distinct_permutations(alpha):
            t = Fraction(1)
            for i, e in enumerate(perm):
                if e:
                    t *= pw[i][e]
            s += t
        if s:
            for m, q in c.terms.items():
                acc[m] = acc.get(m, Fraction(0)) + q * s
    return PiGraded(acc)
