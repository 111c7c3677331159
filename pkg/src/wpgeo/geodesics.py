"""Fuchsian models of the pair of pants and the one-holed torus.

Constructs discrete free rank-2 subgroups of SL(2,R) realizing prescribed
boundary lengths, enumerates primitive closed geodesics up to a length cut,
classifies them (boundary / simple / figure-eight / one-sided iterated
eights / filling), and runs collar, monotonicity, and growth-rate
experiments.

Conventions, fixed throughout:
  * pants(x,y,z): generators a, b with tr a = 2cosh(x/2), tr b = 2cosh(y/2),
    tr(a b^-1) = -2cosh(z/2); the three boundary classes are a, b, a b^-1.
    The word ab is the figure-eight around the first two boundaries, and
    a b^k spirals once around the first boundary and k times around the
    second.
  * torus(l, s, twist): interior geodesic of length 2s along the diagonal
    axis, boundary class the commutator with |tr [a,b]| = 2cosh(l/2).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from scipy.optimize import brentq

__all__ = [
    "GroupConstructionError",
    "ResourceLimit",
    "SurfaceGroup",
    "CyclicWord",
    "GeodesicRecord",
    "GrowthFit",
    "MonotonicityReport",
    "build_pants",
    "build_torus",
    "figure_eight_length",
    "one_sided_length",
    "enumerate_geodesics",
    "brute_force_census",
    "count_filling",
    "collar_width",
    "collar_arc_census",
    "monotonicity_experiment",
    "growth_exponent",
]


class GroupConstructionError(ValueError):
    """The requested trace data admits no certified discrete free group."""


class ResourceLimit(RuntimeError):
    """Enumeration frontier exceeded; carries the state reached."""


# ---------------------------------------------------------------------------
# 2x2 real matrices as plain tuples (p, q, r, s), row major
# ---------------------------------------------------------------------------


def _mm(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


def _inv(m):
    return (m[3], -m[1], -m[2], m[0])


def _tr(m):
    return m[0] + m[3]


def _length_from_trace(t: float) -> float:
    h = abs(t) / 2.0
    if h <= 1.0:
        return 0.0
    return 2.0 * math.acosh(h)


# ---------------------------------------------------------------------------
# Cyclic words
# ---------------------------------------------------------------------------

_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def _reduce_cyclic(w: str) -> str:
    out: list = []
    for ch in w:  # one stack pass gives the freely reduced word
        if out and out[-1] == _INV[ch]:
            out.pop()
        else:
            out.append(ch)
    lo, hi = 0, len(out)  # trim inverse pairs across the seam
    while hi - lo > 1 and out[lo] == _INV[out[hi - 1]]:
        lo += 1
        hi -= 1
    return "".join(out[lo:hi])


def _least_rotation(s: str) -> str:
    """Booth's algorithm: lexicographically least rotation in O(n)."""
    if not s:
        return s
    s2 = s + s
    n = len(s2)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        sj = s2[j]
        i = f[j - k - 1]
        while i != -1 and sj != s2[k + i + 1]:
            if sj < s2[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s2[k + i + 1]:
            if sj < s2[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return s[k:] + s[:k]


@dataclass(frozen=True)
class CyclicWord:
    """Reduced cyclic word over {a, A, b, B} (capitals are inverses)."""

    letters: str

    @classmethod
    def of(cls, w: str) -> "CyclicWord":
        red = _reduce_cyclic(w)
        inv = "".join(_INV[c] for c in reversed(red))
        return cls(min(_least_rotation(red), _least_rotation(inv)))

    @property
    def primitive(self) -> bool:
        w = self.letters
        if not w:
            return False
        return (w + w).find(w, 1) == len(w)

    def inverse(self) -> "CyclicWord":
        return CyclicWord.of("".join(_INV[c] for c in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.letters


@dataclass(frozen=True)
class GeodesicRecord:
    word: CyclicWord
    length: float
    cls: str  # boundary | simple-interior | figure-eight |
    #           one-sided-iterated | other-filling | non-filling
    iterate: int | None = None

    def sort_key(self):
        return (self.length, self.word.letters)


@dataclass
class GrowthFit:
    delta: float
    residual: float
    classes: int
    grid: list = field(default_factory=list)


@dataclass
class MonotonicityReport:
    checked: int
    violations: list
    max_increase: float
    filling_from: int
    filling_to: int


# ---------------------------------------------------------------------------
# Group construction
# ---------------------------------------------------------------------------


def _reflection_circle(center: float, radius: float):
    # inversion in the half-circle |z - center| = radius, as a determinant -1
    # fractional-linear map of the boundary line
    return (center / radius, (radius * radius - center * center) / radius,
            1.0 / radius, -center / radius)


def _reflection_line(u: float):
    # reflection in the vertical line Re z = u
    return (-1.0, 2.0 * u, 0.0, 1.0)


@dataclass
class SurfaceGroup:
    """Discrete free rank-2 group with a discreteness certificate.

    kind is "pants" or "one-holed-torus"; `a` and `b` are the generator
    matrices, `params` the defining lengths, and `certificate` records the
    ping-pong data (three pairwise disjoint reflection disks for pants, the
    commutator-trace criterion for the torus).
    """

    kind: str
    params: dict
    a: tuple
    b: tuple
    certificate: dict
    boundary_words: tuple

    def generator(self, letter: str):
        return {"a": self.a, "A": _inv(self.a),
                "b": self.b, "B": _inv(self.b)}[letter]

    def word_matrix(self, word) -> tuple:
        m = (1.0, 0.0, 0.0, 1.0)
        for ch in str(word):
            m = _mm(m, self.generator(ch))
        return m

    def word_length(self, word) -> float:
        return _length_from_trace(_tr(self.word_matrix(word)))


def build_pants(x: float, y: float, z: float) -> SurfaceGroup:
    """Pants group with boundary lengths (x, y, z); zero means a cusp.

    Realized as the even subgroup of reflections in three pairwise disjoint
    (or tangent) half-circles; their disjointness is the ping-pong
    certificate, checked and stored.  The all-cusp case returns the standard
    integer parabolic pair.
    """
    if min(x, y, z) < 0:
        raise GroupConstructionError("boundary lengths must be >= 0")
    cert: dict
    if x == 0 and y == 0 and z == 0:
        a = (1.0, 2.0, 0.0, 1.0)
        b = (1.0, 0.0, 2.0, 1.0)
        cert = {
            "type": "reflection-disks",
            "disks": (("line", 1.0), ("line", -1.0), ("circle", 0.0, 1.0)),
            "note": "standard parabolic pair; conjugate of the generic "
                    "construction, same character",
        }
    else:
        cx, cy, cz = (math.cosh(x / 2), math.cosh(y / 2), math.cosh(z / 2))
        if z == 0:
            # third boundary parabolic: two vertical lines tangent at infinity
            s1 = _reflection_line(cy)
            s2 = _reflection_line(-cx)
            s3 = _reflection_circle(0.0, 1.0)
            disks = (("line", cy), ("line", -cx), ("circle", 0.0, 1.0))
        else:
            def gap(r):
                c1 = math.sqrt(1 + r * r + 2 * r * cy)
                c2 = math.sqrt(1 + r * r + 2 * r * cx)
                return ((c1 + c2) ** 2 - 2 * r * r) / (2 * r * r) - cz

            r = brentq(gap, 1e-9, 1e9, xtol=1e-14, rtol=1e-15)
            c1 = math.sqrt(1 + r * r + 2 * r * cy)
            c2 = math.sqrt(1 + r * r + 2 * r * cx)
            s1 = _reflection_circle(c1, r)
            s2 = _reflection_circle(-c2, r)
            s3 = _reflection_circle(0.0, 1.0)
            disks = (("circle", c1, r), ("circle", -c2, r),
                     ("circle", 0.0, 1.0))
        a = _mm(s2, s3)
        b = _mm(s1, s3)
        if _tr(a) < 0:
            a = tuple(-v for v in a)
        if _tr(b) < 0:
            b = tuple(-v for v in b)
        cert = {"type": "reflection-disks", "disks": disks}
    g = SurfaceGroup("pants", {"x": x, "y": y, "z": z}, a, b, cert,
                     boundary_words=("a", "b", "aB"))
    for w, target in (("a", x), ("b", y), ("aB", z)):
        got = abs(_tr(g.word_matrix(w)))
        if abs(got - 2 * math.cosh(target / 2)) > 1e-10 * max(1.0, got):
            raise GroupConstructionError(
                "trace check failed for %s: %r vs %r" % (w, got, target))
    return g


def build_torus(l: float, s: float, twist: float = 0.0) -> SurfaceGroup:
    """One-holed torus: boundary length l, interior geodesic 2s, twist.

    The commutator trace equals -2cosh(l/2) by construction, which is the
    classical discreteness-and-freeness criterion for a one-holed-torus
    group; it is checked and recorded as the certificate.
    """
    if l < 0 or s <= 0:
        raise GroupConstructionError("need l >= 0 and s > 0")
    a = (math.exp(s), 0.0, 0.0, math.exp(-s))
    hb = math.asinh(math.cosh(l / 4) / math.sinh(s))  # half the b-length
    ch, sh = math.cosh(hb), math.sinh(hb)
    et = math.exp(twist / 2)
    b = (et * ch, et * sh, sh / et, ch / et)
    g = SurfaceGroup("one-holed-torus", {"l": l, "s": s, "twist": twist},
                     a, b, {"type": "commutator-trace"},
                     boundary_words=("abAB",))
    comm = _tr(g.word_matrix("abAB"))
    if comm > -2 + 1e-10:
        raise GroupConstructionError("commutator trace %r not <= -2" % comm)
    if abs(abs(comm) - 2 * math.cosh(l / 2)) > 1e-10 * max(1.0, abs(comm)):
        raise GroupConstructionError("boundary trace check failed")
    g.certificate["commutator_trace"] = comm
    return g


# ---------------------------------------------------------------------------
# Closed-form lengths
# ---------------------------------------------------------------------------


def figure_eight_length(x: float, y: float, z: float) -> float:
    """Length of the figure-eight around the first two pants boundaries."""
    return 2.0 * math.acosh(
        2.0 * math.cosh(x / 2) * math.cosh(y / 2) + math.cosh(z / 2))


def _sinh_ratio(m: int, u: float) -> float:
    # sinh(m*u)/sinh(u), continuous at u = 0
    if abs(u) < 1e-8:
        return m * (1.0 + (m * m - 1) * u * u / 6.0)
    return math.sinh(m * u) / math.sinh(u)


def one_sided_length(k: int, x: float, y: float, z: float) -> float:
    """Length of the geodesic spiraling once around the first boundary and
    k times around the second (k = 1 is the figure-eight)."""
    if k < 1:
        raise ValueError("k >= 1")
    u = y / 2.0
    val = (_sinh_ratio(k + 1, u) * math.cosh(x / 2)
           + _sinh_ratio(k, u) * math.cosh(z / 2))
    return 2.0 * math.acosh(val)


def collar_width(s: float) -> float:
    """Half-width of the embedded collar of a geodesic of half-length s."""
    return math.asinh(1.0 / math.sinh(s))


def collar_arc_census(s: float, L: float) -> dict:
    """Count collar-crossing arcs of length <= L against the linear bound.

    The arcs connect two fixed points on opposite collar boundary
    components, winding n times; their lengths come from the hyperbolic
    distance between boundary points displaced by e^(2ns).  The bound is
    (L - 2w(s) + R0)/s with the calibration constant R0 below.
    """
    w = collar_width(s)
    if L < 2 * w:
        raise ValueError("need L >= 2*collar_width(s)")
    theta = math.atan(1.0 / math.sinh(s))
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    count = 0
    lengths = []
    n = 0
    while True:
        e = math.exp(2 * n * s)
        num = (e * sin_t + sin_t) ** 2 + (e * cos_t - cos_t) ** 2
        d = math.acosh(1.0 + num / (2.0 * cos_t * e * cos_t))
        if d <= L:
            count += 1 if n == 0 else 2  # +n and -n arcs have equal length
            lengths.append(d)
            n += 1
        else:
            break
    bound = (L - 2 * w + _COLLAR_R0) / s
    return {"count": count, "bound": bound, "R0": _COLLAR_R0,
            "widths": 2 * w, "lengths": lengths}


# smallest constant covering the calibration sweep s in [0.05, 2], L <= 12
# is 2.423 (attained near s = 1.95, L = 4); rounded up one decimal
_COLLAR_R0 = 2.5


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _syllable_alphabet(G: SurfaceGroup):
    """Syllable letters for the DFS: generators plus the peripheral words.

    Including the third pants boundary (a b^-1) and the torus commutator as
    single syllable letters keeps geodesics that spiral around those
    boundaries at a bounded syllable count.
    """
    words = {"a": "a", "b": "b"}
    if G.kind == "pants":
        words["c"] = "aB"
    else:
        words["d"] = "abAB"
    table = {}
    for ch, w in words.items():
        m = G.word_matrix(w)
        wi = "".join(_INV[c] for c in reversed(w))
        table[(ch, 1)] = (m, w, w[0], w[-1])
        table[(ch, -1)] = (_inv(m), wi, wi[0], wi[-1])
    return table


def enumerate_geodesics(G: SurfaceGroup, L: float, frontier_slack: float = 3.0,
                        empty_levels: int = 2, max_syllables: int = 48,
                        max_exponent: int = 200000,
                        max_nodes: int = 120_000_000) -> list[GeodesicRecord]:
    """All primitive unoriented conjugacy classes of length <= L, sorted.

    Classes are enumerated as cyclic sequences of syllables (powers of the
    generators and of the peripheral words), deduplicated by reduced cyclic
    word.  Exponent loops are cut by the escape criterion of the three-term
    trace recurrence t(e+1) = tr(g) t(e) - t(e-1), whose modulus grows
    monotonically past its turning point; prefixes are cut once the
    base-point displacement exceeds L + frontier_slack (the axis of a
    cyclically reduced word stays near the base, so every completion would
    exceed L); the syllable count stops after `empty_levels` consecutive
    levels yielding no new classes.  Completeness at small lengths is
    validated against brute_force_census.
    """
    if L <= 0:
        raise ValueError("L > 0 required")
    thr = 2.0 * math.cosh(L / 2.0) + 1e-9
    norm_cap = 2.0 * math.cosh(L + frontier_slack)
    table = _syllable_alphabet(G)
    options = sorted(table)  # (letter, sign), deterministic order
    found: dict = {}
    buckets: dict = {}  # cheap invariants -> [(doubled, doubled inverse)]
    nodes = [0]

    def emit(red: str, trace: float):
        # the DFS only assembles cyclically reduced spellings (junction and
        # seam checks), so `red` needs no free reduction here
        n = len(red)
        dbl_red = red + red
        if dbl_red.find(red, 1) != n:
            return  # proper power
        length = _length_from_trace(trace)
        na, nA = red.count("a"), red.count("A")
        nb, nB = red.count("b"), red.count("B")
        key = (n, min(na, nA), max(na, nA), min(nb, nB), max(nb, nB),
               round(length, 6))
        bucket = buckets.get(key)
        if bucket is not None:
            for dbl, dbl_inv in bucket:
                if red in dbl or red in dbl_inv:
                    return  # rotation of a known class or of its inverse
        inv = "".join(_INV[ch] for ch in reversed(red))
        canon = min(_least_rotation(red), _least_rotation(inv))
        if canon in found:
            return
        found[canon] = (CyclicWord(canon), length)
        entry = (dbl_red, inv + inv)
        if bucket is None:
            buckets[key] = [entry]
        else:
            bucket.append(entry)

    for ch, sign in options:
        if sign == 1:
            m, w, _, _ = table[(ch, sign)]
            if abs(_tr(m)) <= thr:
                emit(w, _tr(m))

    # Rotation/inversion symmetry: any cyclic sequence containing a powers
    # of the first generator has a rotation of itself or of its inverse
    # starting with a positive such power, so the first syllable can be
    # pinned.  Sequences avoiding the first generator are covered by a
    # second run over the reduced alphabet.
    lead = sorted({ch for ch, _ in options})
    runs = []
    rest = options
    for ch in lead[:-1]:
        runs.append(((ch, 1), rest))
        rest = [o for o in rest if o[0] != ch]
    # A peripheral-word syllable with exponent +-1 always has an equivalent
    # spelling over the generators (one level deeper), so exponents of the
    # composite letters start at 2; their first powers still appear above
    # as single-syllable classes.
    emin = {opt: (1 if opt[0] in ("a", "b") else 2) for opt in options}

    def explore(k) -> bool:
        """DFS over syllable sequences of length k.

        Exponent ranges are closed-form: for a parabolic letter g,
        W g^e = +-(W + e Wn) with Wn = sg W g - W, so the prefix norm is an
        exact quadratic in e and the trace of W g^e h^f is exactly
        bilinear, sg^e sh^f (A + Be + Cf + Def); the last one or two
        syllables are therefore scanned without recursion.  Hyperbolic
        letters fall back to short geometric-growth loops.
        """
        path: list = []

        def final_parab(mp, mq, mr, ms, h_opt, pre):
            """Emit the exact fertile window of M h^f, h parabolic."""
            h, spell_h, _, _ = table[h_opt]
            sh = 1.0 if h[0] + h[3] > 0 else -1.0
            T0 = mp + ms
            D = sh * (mp * h[0] + mq * h[2] + mr * h[1] + ms * h[3]) - T0
            fmin = emin[h_opt]
            if abs(D) <= 1e-9 * (1.0 + abs(T0)):
                # constant-modulus family: peripheral elements only;
                # primitive members occur at tiny exponents
                if abs(T0) <= thr:
                    for f in range(fmin, fmin + 4):
                        emit(pre + spell_h * f, T0)
                return
            lo = (-thr - T0) / D
            hi = (thr - T0) / D
            if D < 0:
                lo, hi = hi, lo
            f_lo = max(fmin, math.ceil(lo - 1e-9))
            f_hi = math.floor(hi + 1e-9)
            if f_hi - f_lo > max_exponent:
                raise ResourceLimit("exponent window at %d syllables" % k)
            if f_hi >= f_lo:
                nodes[0] += f_hi - f_lo + 1
                for f in range(f_lo, f_hi + 1):
                    t = (T0 + f * D) * (1.0 if sh > 0 or f % 2 == 0 else -1.0)
                    emit(pre + spell_h * f, t)

        def final_hyp(mp, mq, mr, ms, h_opt, pre):
            """Scan M h^f for hyperbolic h; |trace| grows geometrically."""
            h, spell_h, _, _ = table[h_opt]
            fmin = emin[h_opt]
            h0, h1, h2, h3 = h
            cp = mp * h0 + mq * h2
            cq = mp * h1 + mq * h3
            cr = mr * h0 + ms * h2
            cs = mr * h1 + ms * h3
            f = 1
            prev_at = None
            nondec = 0
            while True:
                nodes[0] += 1
                t = cp + cs
                at = abs(t)
                nondec = nondec + 1 if (
                    prev_at is not None and at >= prev_at) else 0
                prev_at = at
                if at <= thr:
                    if f >= fmin:
                        emit(pre + spell_h * f, t)
                elif nondec >= 2:
                    # eventually monotone three-term recurrence
                    break
                f += 1
                if f > max_exponent:
                    raise ResourceLimit("exponent cap at %d syllables" % k)
                np_ = cp * h0 + cq * h2
                nq = cp * h1 + cq * h3
                nr = cr * h0 + cs * h2
                ns = cr * h1 + cs * h3
                cp, cq, cr, cs = np_, nq, nr, ns

        def quad_window(a, b, c):
            """Integer e >= 1 with a e^2 + b e + c <= norm_cap (a > 0)."""
            disc = b * b - 4.0 * a * (c - norm_cap)
            if disc <= 0.0:
                return 1, 0
            root = math.sqrt(disc)
            e_lo = max(1, math.ceil((-b - root) / (2.0 * a) - 1e-9))
            e_hi = math.floor((-b + root) / (2.0 * a) + 1e-9)
            if e_hi - e_lo > max_exponent:
                raise ResourceLimit("exponent window at %d syllables" % k)
            return e_lo, e_hi

        def finals(first, opt, opts):
            """Final-syllable options compatible with penult and seam."""
            fh = table[first][2]
            out = []
            for h_opt in opts:
                if h_opt[0] == opt[0] or h_opt[0] == first[0]:
                    continue
                if _INV[table[opt][3]] == table[h_opt][2]:
                    continue
                if _INV[table[h_opt][3]] == fh:
                    continue
                out.append(h_opt)
            return out

        def rec(pos, p, q, r, s, first, prev, opts):
            if nodes[0] > max_nodes:
                raise ResourceLimit("node budget at %d syllables" % k)
            pen = pos == k - 2
            for opt in (opts if pos else (first,)):
                if prev is not None:
                    if opt[0] == prev[0]:
                        continue  # same letter: merged spelling exists
                    if _INV[table[prev][3]] == table[opt][2]:
                        continue  # cancellation at the junction
                g, spell, head, tail = table[opt]
                g0, g1, g2, g3 = g
                wgp = p * g0 + q * g2
                wgq = p * g1 + q * g3
                wgr = r * g0 + s * g2
                wgs = r * g1 + s * g3
                tr_g = g0 + g3
                parab = abs(abs(tr_g) - 2.0) < 1e-7
                if parab:
                    sg = 1.0 if tr_g > 0 else -1.0
                    n0 = sg * wgp - p
                    n1 = sg * wgq - q
                    n2 = sg * wgr - r
                    n3 = sg * wgs - s
                    a_q = n0 * n0 + n1 * n1 + n2 * n2 + n3 * n3
                    b_q = 2.0 * (p * n0 + q * n1 + r * n2 + s * n3)
                    c_q = p * p + q * q + r * r + s * s
                    e_lo, e_hi = quad_window(a_q, b_q, c_q)
                    e_lo = max(e_lo, emin[opt])
                    if e_hi < e_lo:
                        continue
                    nodes[0] += e_hi - e_lo + 1
                    pre0 = "".join(path)
                    if pen:
                        A = p + s
                        B = sg * (wgp + wgs) - A
                        for h_opt in finals(first, opt, opts):
                            h, spell_h, _, _ = table[h_opt]
                            tr_h = h[0] + h[3]
                            if abs(abs(tr_h) - 2.0) < 1e-7:
                                sh = 1.0 if tr_h > 0 else -1.0
                                fmin = emin[h_opt]
                                # C = tr(W n_h), D = tr(W n_g n_h)
                                wh_t = p * h[0] + q * h[2] + r * h[1] + s * h[3]
                                nh_t = (n0 * h[0] + n1 * h[2]
                                        + n2 * h[1] + n3 * h[3])
                                C = sh * wh_t - A
                                D = sh * nh_t - B
                                for e in range(e_lo, e_hi + 1):
                                    c0 = A + B * e
                                    s_f = C + D * e
                                    if abs(s_f) <= 1e-9 * (1.0 + abs(c0)):
                                        if abs(c0) <= thr:
                                            pre = pre0 + spell * e
                                            for f in range(fmin, fmin + 4):
                                                emit(pre + spell_h * f, c0)
                                        continue
                                    lo = (-thr - c0) / s_f
                                    hi = (thr - c0) / s_f
                                    if s_f < 0:
                                        lo, hi = hi, lo
                                    f_lo = max(fmin, math.ceil(lo - 1e-9))
                                    f_hi = math.floor(hi + 1e-9)
                                    if f_hi < f_lo:
                                        continue
                                    if f_hi - f_lo > max_exponent:
                                        raise ResourceLimit(
                                            "exponent window at %d" % k)
                                    nodes[0] += f_hi - f_lo + 1
                                    pre = pre0 + spell * e
                                    sgE = 1.0 if sg > 0 or e % 2 == 0 else -1.0
                                    for f in range(f_lo, f_hi + 1):
                                        t = sgE * (c0 + s_f * f) * (
                                            1.0 if sh > 0 or f % 2 == 0
                                            else -1.0)
                                        emit(pre + spell_h * f, t)
                            else:
                                for e in range(e_lo, e_hi + 1):
                                    final_hyp(p + e * n0, q + e * n1,
                                              r + e * n2, s + e * n3,
                                              h_opt, pre0 + spell * e)
                    else:
                        for e in range(e_lo, e_hi + 1):
                            path.append(spell * e)
                            rec(pos + 1, p + e * n0, q + e * n1,
                                r + e * n2, s + e * n3, first, opt, opts)
                            path.pop()
                    continue
                # hyperbolic letter: short geometric-growth loop over e
                cp, cq, cr, cs = wgp, wgq, wgr, wgs
                e = 1
                prev_nrm = None
                pre0 = "".join(path)
                while True:
                    nodes[0] += 1
                    if nodes[0] > max_nodes:
                        raise ResourceLimit("node budget at %d syllables" % k)
                    nrm = cp * cp + cq * cq + cr * cr + cs * cs
                    if nrm > norm_cap:
                        # the norm is convex in e
                        if prev_nrm is not None and nrm >= prev_nrm:
                            break
                    elif e < emin[opt]:
                        pass
                    elif pen:
                        for h_opt in finals(first, opt, opts):
                            h = table[h_opt][0]
                            if abs(abs(h[0] + h[3]) - 2.0) < 1e-7:
                                final_parab(cp, cq, cr, cs, h_opt,
                                            pre0 + spell * e)
                            else:
                                final_hyp(cp, cq, cr, cs, h_opt,
                                          pre0 + spell * e)
                    else:
                        path.append(spell * e)
                        rec(pos + 1, cp, cq, cr, cs, first, opt, opts)
                        path.pop()
                    prev_nrm = nrm
                    e += 1
                    if e > max_exponent:
                        raise ResourceLimit("exponent cap at %d syllables" % k)
                    np_ = cp * g0 + cq * g2
                    nr_ = cr * g0 + cs * g2
                    nq = cp * g1 + cq * g3
                    ns = cr * g1 + cs * g3
                    cp, cq, cr, cs = np_, nq, nr_, ns

        before = len(found)
        for first, opts_run in runs:
            rec(0, 1.0, 0.0, 0.0, 1.0, first, None, opts_run)
        return len(found) > before

    empty_run = 0
    k = 2
    while k <= max_syllables:
        grew = explore(k)
        if grew:
            empty_run = 0
        else:
            empty_run += 1
            if empty_run >= empty_levels:
                break
        k += 1
    else:
        raise ResourceLimit("syllable frontier %d reached" % max_syllables)

    classifier = _Classifier(G, L)
    records = []
    for cw, length in found.values():
        cls, it = classifier.classify(cw)
        records.append(GeodesicRecord(cw, length, cls, it))
    records.sort(key=GeodesicRecord.sort_key)
    return records


def brute_force_census(G: SurfaceGroup, L: float,
                       max_letters: int = 12) -> list[GeodesicRecord]:
    """Independent check of enumerate_geodesics: scan all reduced words."""
    thr = 2.0 * math.cosh(L / 2.0) + 1e-9
    seen: dict = {}
    letters = "aAbB"

    def rec(word, m):
        if word and len(_reduce_cyclic(word)) == len(word):
            t = _tr(m)
            if abs(t) <= thr:
                cw = CyclicWord.of(word)
                if cw.primitive and cw.letters not in seen:
                    seen[cw.letters] = (cw, _length_from_trace(t))
        if len(word) == max_letters:
            return
        for ch in letters:
            if word and ch == _INV[word[-1]]:
                continue
            rec(word + ch, _mm(m, G.generator(ch)))

    rec("", (1.0, 0.0, 0.0, 1.0))
    classifier = _Classifier(G, L)
    records = []
    for cw, length in seen.values():
        cls, it = classifier.classify(cw)
        records.append(GeodesicRecord(cw, length, cls, it))
    records.sort(key=GeodesicRecord.sort_key)
    return records


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _christoffel(p: int, q: int) -> str:
    """Digital-line word with p letters a and q letters b (a (p,q)-curve)."""
    out = []
    x = y = 0
    while x < p or y < q:
        if x < p and (x + 1) * q >= (y + 1) * p:
            out.append("a")
            x += 1
        else:
            out.append("b")
            y += 1
    return "".join(out)


class _Classifier:
    def __init__(self, G: SurfaceGroup, L: float):
        self.G = G
        self.kind = G.kind
        thr = 2.0 * math.cosh(L / 2.0) + 1e-9
        if self.kind == "pants":
            self.boundary = {CyclicWord.of(w).letters
                             for w in ("a", "b", "aB")}
            self.spirals: dict = {}
            words = {"a": "a", "b": "b", "z": "aB"}
            for i in words:
                for j in words:
                    if i == j:
                        continue
                    k = 1
                    while True:
                        w = words[i] + words[j] * k
                        t = abs(_tr(G.word_matrix(w)))
                        if t > thr:
                            break
                        self.spirals.setdefault(
                            CyclicWord.of(w).letters, k)
                        k += 1
                        if k > 10000:
                            break
        else:
            self.boundary = {CyclicWord.of("abAB").letters}
            cap = int(math.ceil(L))
            self.simple = set()
            self.slopes = []
            for p in range(0, cap + 1):
                for q in range(-cap, cap + 1):
                    if p == 0 and q <= 0 or math.gcd(p, abs(q)) != 1:
                        continue
                    base = _christoffel(p, abs(q)) if p and q else (
                        "a" * p + "b" * abs(q))
                    if q < 0:
                        base = "".join(
                            ch if ch == "a" else "B" for ch in base)
                    self.simple.add(CyclicWord.of(base).letters)
                    self.slopes.append((p, q))

    def classify(self, cw: CyclicWord):
        w = cw.letters
        if self.kind == "pants":
            if w in self.boundary:
                return "boundary", None
            k = self.spirals.get(w)
            if k == 1:
                return "figure-eight", 1
            if k is not None:
                return "one-sided-iterated", k
            return "other-filling", None
        if w in self.boundary:
            return "boundary", None
        if w in self.simple:
            return "simple-interior", None
        pp = sum(1 if c == "a" else -1 if c == "A" else 0 for c in w)
        qq = sum(1 if c == "b" else -1 if c == "B" else 0 for c in w)
        if all(pp * q - qq * p != 0 for p, q in self.slopes):
            return "other-filling", None
        return "non-filling", None


def count_filling(G: SurfaceGroup, L: float, records=None) -> int:
    """Number of primitive filling classes of length <= L.

    In a pants every interior class is filling; on the torus the
    slope-intersection heuristic from the classifier decides.
    """
    if records is None:
        records = enumerate_geodesics(G, L)
    if G.kind == "pants":
        return sum(1 for r in records if r.cls != "boundary")
    return sum(1 for r in records if r.cls == "other-filling")


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def monotonicity_experiment(G_from: SurfaceGroup, G_to: SurfaceGroup,
                            L: float) -> MonotonicityReport:
    """Compare word-by-word lengths after shrinking boundary lengths.

    Both groups must share a kind and marking (same generator labels); the
    target's boundary lengths must be componentwise <= the source's.  Every
    class of length <= L on the source is re-measured on the target.
    """
    if G_from.kind != G_to.kind:
        raise ValueError("marking mismatch: different kinds")
    if G_from.kind == "pants":
        pf = [G_from.params[k] for k in ("x", "y", "z")]
        pt = [G_to.params[k] for k in ("x", "y", "z")]
    else:
        if (G_from.params["s"] != G_to.params["s"]
                or G_from.params["twist"] != G_to.params["twist"]):
            raise ValueError("marking mismatch: interior coordinates differ")
        pf = [G_from.params["l"]]
        pt = [G_to.params["l"]]
    if any(t > f for f, t in zip(pf, pt)):
        raise ValueError("target boundary lengths must be <= source")
    records = enumerate_geodesics(G_from, L)
    violations = []
    max_inc = 0.0
    for r in records:
        lt = G_to.word_length(r.word)
        inc = lt - r.length
        max_inc = max(max_inc, inc)
        if inc > 1e-9:
            violations.append((r.word.letters, r.length, lt))
    fill_from = count_filling(G_from, L, records)
    fill_to = count_filling(G_to, L)
    return MonotonicityReport(len(records), violations, max_inc,
                              fill_from, fill_to)


def growth_exponent(G: SurfaceGroup, L: float, grid_points: int = 24,
                    records=None) -> GrowthFit:
    """Least-squares growth rate of log #classes over [L/2, L]."""
    import numpy as np

    if records is None:
        records = enumerate_geodesics(G, L)
    lengths = sorted(r.length for r in records if r.length > 0)
    if len(lengths) < 200:
        raise ValueError("too few classes (%d) for a fit" % len(lengths))
    ts = np.linspace(L / 2.0, L, grid_points)
    ys = np.array([math.log(bisect_right(lengths, t)) for t in ts])
    coef, res = np.polyfit(ts, ys, 1, full=True)[:2]
    residual = float(res[0]) if len(res) else 0.0
    return GrowthFit(float(coef[0]), residual, len(lengths),
                     grid=list(zip(ts.tolist(), ys.tolist())))
