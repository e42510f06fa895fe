"""Structure pipeline: model a set in a prime cyclic group, extract a Bohr
set from its large Fourier spectrum, fit a proper progression inside the Bohr
set, pull it back to the integers, and finish with a covering argument.

Stage contracts are verified at runtime on every invocation: the modeling map
is divisibility-checked exactly, the fitted progression is re-enumerated for
properness and membership, and the final cover is checked element by element
against the input. Violations raise InvariantError rather than degrade.

Width discipline: group arithmetic stays within int64 ranges by construction
(the working modulus is bounded by the difference-set range cap); exact
rational arithmetic (fractions.Fraction) is used for norms and thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from gapsolve.core import (
    DEFAULT_ENUM_CAP,
    EnumerationCapError,
    Gap,
    IntegerSet,
    InvariantError,
    PipelineFailureError,
    ceil_root,
    sumset,
)

MODELING_FOLD = 8  # the pipeline models 8-fold sums
DEFAULT_SUPPORT_CAP = 1 << 24

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the witness set is exact below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    c = max(n, 2)
    while not is_prime(c):
        c += 1
    return c


# ---------------------------------------------------------------------------
# iterated difference supports


def _conv_support(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Boolean support of the sumset given two indicator vectors.

    Counts in the raw convolution never exceed min(len(x), len(y)), far
    inside float64's exact-integer range, so thresholding at 0.5 is exact.
    """
    n = len(x) + len(y) - 1
    size = 1 << (n - 1).bit_length()
    fx = np.fft.rfft(x, size)
    fy = np.fft.rfft(y, size)
    out = np.fft.irfft(fx * fy, size)[:n]
    return out > 0.5


def iterated_support(
    a: IntegerSet, plus_count: int, minus_count: int, cap: int = DEFAULT_SUPPORT_CAP
) -> tuple[int, np.ndarray]:
    """(offset, boolean array) for plus_count*A - minus_count*A.

    Supports are built by repeated squaring of clipped indicator vectors, so
    the cost is governed by the value range, not the set cardinality.
    """
    if plus_count < 1 or minus_count < 0:
        raise ValueError("need plus_count >= 1, minus_count >= 0")
    span = (plus_count + minus_count) * a.diameter() + 1
    if span > cap:
        raise EnumerationCapError(f"difference support range {span} exceeds cap {cap}")
    base = np.zeros(a.diameter() + 1, dtype=np.float64)
    for v in a:
        base[v - a.min()] = 1.0

    def fold(k: int) -> np.ndarray:
        acc = None
        sq = base.astype(np.float64)
        kk = k
        while kk:
            if kk & 1:
                acc = sq.copy() if acc is None else _conv_support(acc, sq).astype(np.float64)
            kk >>= 1
            if kk:
                sq = _conv_support(sq, sq).astype(np.float64)
        return acc

    pos = fold(plus_count)
    offset = plus_count * a.min()
    if minus_count:
        neg = fold(minus_count)[::-1]
        pos = _conv_support(pos, neg).astype(np.float64)
        offset -= minus_count * a.max()
    return offset, pos > 0.5


def support_size(support: tuple[int, np.ndarray]) -> int:
    return int(support[1].sum())


def support_contains(support: tuple[int, np.ndarray], values: np.ndarray) -> np.ndarray:
    offset, arr = support
    idx = values - offset
    ok = (idx >= 0) & (idx < len(arr))
    out = np.zeros(len(values), dtype=bool)
    out[ok] = arr[idx[ok]]
    return out


def modeling_modulus_lower_bound(n: int, c, s: int) -> Fraction:
    """Smallest group order the modeling stage accepts when the doubling
    constant is c: 4 * c^(2s) * n."""
    return 4 * Fraction(c) ** (2 * s) * n


# ---------------------------------------------------------------------------
# modeling stage


@dataclass(frozen=True)
class ModelingFailure:
    """A rejected random multiplier. Expected with probability < 1/2 per
    attempt; callers retry with fresh randomness."""

    reason: str
    q: int
    multiplier: int


@dataclass(frozen=True)
class FreimanModel:
    """A verified s-fold sum-preserving injection from a_prime into Z_m.

    The map is x -> ((multiplier * (x mod q)) mod q) mod m. `strict_checked`
    records whether the exact divisibility check over the full s-fold
    difference set ran (it is skipped only above the range cap).
    """

    q: int
    multiplier: int
    m: int
    s: int
    a_prime: IntegerSet
    image: IntegerSet
    strict_checked: bool

    def apply(self, x: int) -> int:
        return ((self.multiplier * (x % self.q)) % self.q) % self.m

    def apply_array(self, xs: np.ndarray) -> np.ndarray:
        return ((self.multiplier * (xs % self.q)) % self.q) % self.m

    @property
    def psi(self) -> Callable[[int], int]:
        return self.apply


def modeling_lemma(
    a: IntegerSet,
    s: int,
    m: int,
    rng,
    diff_support: Optional[tuple[int, np.ndarray]] = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
):
    """One modeling attempt. Returns a FreimanModel or a ModelingFailure.

    Precondition: m >= 4 * |sA - sA| so a uniform multiplier fails with
    probability below 1/2. The divisibility check runs on the s-fold
    difference set of the selected slice, which certifies the isomorphism
    outright rather than probabilistically.
    """
    if s < 1:
        raise ValueError("fold count must be >= 1")
    if diff_support is None:
        diff_support = iterated_support(a, s, s, support_cap)
    d_size = support_size(diff_support)
    if m < 4 * d_size:
        raise ValueError(f"modulus {m} below 4*|sA-sA| = {4 * d_size}")

    q = next_prime(s * a.diameter() + 1)
    lam = rng.randrange(1, q)

    phi = {x: (lam * (x % q)) % q for x in a}
    for x in a:
        v = phi[x]
        if v != 0 and v % m == 0:
            return ModelingFailure("base-divisibility", q, lam)

    # slice selection: fullest of s half-open intervals of width ceil(q/s)
    width = -(-q // s)
    buckets: dict[int, list[int]] = {}
    for x in a:
        buckets.setdefault(phi[x] // width, []).append(x)
    best = max(buckets, key=lambda i: (len(buckets[i]), -i))
    a_prime = IntegerSet.from_iterable(buckets[best])
    if len(a_prime) * s < len(a):
        raise InvariantError("slice smaller than n/s")

    strict_checked = False
    try:
        off, arr = iterated_support(a_prime, s, s, support_cap)
        cs = (np.nonzero(arr)[0] + off).astype(np.int64)
        cs = cs[cs != 0]
        imgs = (lam * (cs % q)) % q
        if np.any(imgs % m == 0):
            return ModelingFailure("iso-divisibility", q, lam)
        strict_checked = True
    except EnumerationCapError:
        pass

    image = sorted({((lam * (x % q)) % q) % m for x in a_prime})
    if len(image) < len(a_prime):
        return ModelingFailure("collision", q, lam)
    image_set = IntegerSet(tuple(image))
    return FreimanModel(q, lam, m, s, a_prime, image_set, strict_checked)


# ---------------------------------------------------------------------------
# Fourier stage


@dataclass(frozen=True)
class BohrSpec:
    """Frequencies and width of a Bohr set in Z_m: the residues x with
    min(rx mod m, m - rx mod m) / m <= width for every frequency r."""

    m: int
    frequencies: tuple[int, ...]
    width: Fraction

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("modulus must be >= 2")
        if not (0 < self.width < 1):
            raise ValueError("width must lie in (0, 1)")
        fs = self.frequencies
        if list(fs) != sorted(set(fs)) or any(not 1 <= r < self.m for r in fs):
            raise ValueError("frequencies must be sorted, distinct, in [1, m)")


def bogolyubov(b: IntegerSet, m: int, width: Fraction = Fraction(1, 4)) -> BohrSpec:
    """Frequencies whose Fourier coefficient exceeds alpha^(3/2), where
    alpha = |b|/m. The Bohr set they define sits inside 2B - 2B.

    The threshold comparison is greedy-inclusive at float precision: extra
    frequencies only shrink the Bohr set, so containment survives rounding.
    The spectrum size bound |R| * |B|^2 < m^2 is asserted exactly.
    """
    if b.min() < 0 or b.max() >= m:
        raise ValueError("set must be reduced mod m")
    ind = np.zeros(m, dtype=np.float64)
    ind[np.fromiter(b, dtype=np.int64)] = 1.0
    coeff_sq = np.abs(np.fft.fft(ind) / m) ** 2
    alpha = Fraction(len(b), m)
    thr = float(alpha) ** 3
    rs = np.nonzero(coeff_sq > thr * (1.0 - 1e-9) - 1e-18)[0]
    rs = rs[rs != 0]
    if len(rs) * len(b) ** 2 >= m * m:
        raise InvariantError("spectrum larger than 1/alpha^2")
    return BohrSpec(m, tuple(int(r) for r in rs), width)


# ---------------------------------------------------------------------------
# progression inside a Bohr set


@dataclass(frozen=True)
class BohrGapResult:
    """Proper progression inside a Bohr set, with the directional basis that
    produced it. Dimensions whose box length would be 1 contribute nothing
    to the point set and are omitted from the gap; `d_original` keeps the
    frequency count for the volume bound (eps/d)^d * m."""

    gap: Gap
    gammas: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]
    norms: tuple[Fraction, ...]
    d_original: int
    volume_bound: Fraction


def _reduce_row(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        g = math.gcd(g, v)
    if g > 1:
        return [v // g for v in row]
    return row


def _independent_prefix(cands: list[tuple[int, list[int], int]], rank_cap: int):
    """Greedy short-to-long scan keeping linearly independent vectors.
    Fraction-free elimination over the integers keeps the test exact."""
    pivots: list[tuple[int, list[int]]] = []
    kept = []
    for gamma, vec, norm in cands:
        if len(pivots) == rank_cap:
            break
        v = list(vec)
        for pc, prow in pivots:
            if v[pc] != 0:
                f1, f2 = prow[pc], v[pc]
                v = _reduce_row([a * f1 - b * f2 for a, b in zip(v, prow)])
        pivot_col = next((i for i, x in enumerate(v) if x != 0), None)
        if pivot_col is None:
            continue
        pivots.append((pivot_col, v))
        kept.append((gamma, vec, norm))
    return kept


def gap_in_bohr(spec: BohrSpec, enum_cap: int = DEFAULT_ENUM_CAP) -> BohrGapResult:
    """Fit a proper progression of volume >= (eps/d)^d * m inside the Bohr
    set, eps strictly below 1/2.

    Candidate directions are the centered fractional-part vectors
    (gamma * r / m) over gamma in [1, m); only candidates with sup-norm below
    eps/d can yield a box length of at least 2, and every non-centered
    representative has a coordinate of size > 1/2, so the exact search space
    is just the centered vectors below that threshold. Properness,
    membership, and the volume bound are asserted by enumeration.
    """
    m, eps = spec.m, spec.width
    if eps >= Fraction(1, 2):
        raise ValueError("width must be < 1/2 for a proper fit")
    pe, qe = eps.numerator, eps.denominator
    d = len(spec.frequencies)
    bound = (eps / d) ** d * m if d else Fraction(m)
    if d == 0:
        gap = Gap(0, (1,), (m,), modulus=m)
        return BohrGapResult(gap, (1,), ((1,),), (Fraction(1, m),), 0, bound)

    survivors = np.arange(1, m, dtype=np.int64)
    maxc = np.zeros(m - 1, dtype=np.int64)
    for r in spec.frequencies:
        w = (survivors * r) % m
        c = np.minimum(w, m - w)
        keep = c * (d * qe) < pe * m
        survivors, maxc = survivors[keep], np.maximum(maxc[keep], c[keep])
        if len(survivors) == 0:
            break

    cands: list[tuple[int, list[int], int]] = []
    if len(survivors):
        order = np.lexsort((survivors, maxc))
        freqs = np.asarray(spec.frequencies, dtype=np.int64)
        for i in order.tolist():
            gamma = int(survivors[i])
            w = (gamma * freqs) % m
            signed = np.where(2 * w <= m, w, w - m)
            cands.append((gamma, [int(v) for v in signed], int(maxc[i])))

    kept = _independent_prefix(cands, d)
    if not kept:
        gap = Gap(0, (), (), modulus=m)
        _assert_bohr_gap(gap, spec, bound, enum_cap)
        return BohrGapResult(gap, (), (), (), d, bound)

    gammas = tuple(g for g, _, _ in kept)
    basis = tuple(tuple(vec) for _, vec, _ in kept)
    norms = tuple(Fraction(nc, m) for _, _, nc in kept)
    lengths = tuple(-((-pe * m) // (qe * nc * d)) for _, _, nc in kept)
    gap = Gap(0, gammas, lengths, modulus=m)
    _assert_bohr_gap(gap, spec, bound, enum_cap)
    return BohrGapResult(gap, gammas, basis, norms, d, bound)


def _assert_bohr_gap(gap: Gap, spec: BohrSpec, bound: Fraction, enum_cap: int) -> None:
    m = spec.m
    vol = gap.volume()
    if vol > m:
        raise InvariantError("volume exceeds group order; properness impossible")
    if vol < bound:
        raise InvariantError(f"volume {vol} below guarantee {bound}")
    elems = np.zeros(1, dtype=np.int64)
    for g, l in zip(gap.generators, gap.lengths):
        elems = (elems[:, None] + (np.arange(l, dtype=np.int64) * g) % m).ravel() % m
    if len(np.unique(elems)) != vol:
        raise InvariantError("progression is not proper in Z_m")
    pe, qe = spec.width.numerator, spec.width.denominator
    for r in spec.frequencies:
        w = (elems * r) % m
        dist = np.minimum(w, m - w)
        if np.any(dist * qe > pe * m):
            raise InvariantError("progression escapes the Bohr set")


# ---------------------------------------------------------------------------
# covering stage


def ruzsa_cover(y: IntegerSet, z: IntegerSet) -> IntegerSet:
    """Greedy maximal x-set with pairwise disjoint translates y + x.

    Maximality gives z subset of (y - y) + X, and disjointness gives
    |X| * |y| <= |y + z|; both are asserted before returning.
    """
    used: set[int] = set()
    chosen: list[int] = []
    for zz in z:
        translate = {yy + zz for yy in y}
        if not translate & used:
            chosen.append(zz)
            used |= translate
    x = IntegerSet(tuple(chosen))
    if len(x) * len(y) > len(sumset(y, z, bits=None, cap=None)):
        raise InvariantError("translate count exceeds sumset bound")
    diffs = {u - v for u in y for v in y}
    for zz in z:
        if not any(zz - xx in diffs for xx in x):
            raise InvariantError("covering property failed")
    return x


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class FreimanGapResult:
    """Progression cover of an integer set, shaped (Q - Q) + X.

    `coords` maps every input element to its coefficient vector in `cover`,
    which is the containment certificate. `metrics` carries the run's
    working modulus, attempt count, and shape data.
    """

    cover: Gap
    coords: dict[int, tuple[int, ...]]
    model: Optional[FreimanModel]
    bohr: Optional[BohrSpec]
    bohr_gap: Optional[BohrGapResult]
    q_gap: Optional[Gap]
    x_set: Optional[IntegerSet]
    metrics: dict = field(default_factory=dict)


def _psi2_inverter(model: FreimanModel):
    """Inversion oracle for the induced map on 2A' - 2A'.

    Enumerates pairwise sums of the slice once; a query walks the sums in
    ascending order and returns the first preimage, which the isomorphism
    guarantees is the unique one.
    """
    ap = model.a_prime.elements
    pair_img: dict[int, int] = {}
    for i, u in enumerate(ap):
        for v in ap[i:]:
            key = u + v
            if key not in pair_img:
                pair_img[key] = (model.apply(u) + model.apply(v)) % model.m
    sums = sorted(pair_img)
    img_to_sum: dict[int, int] = {}
    for u in sums:
        img_to_sum.setdefault(pair_img[u], u)

    def invert(target: int) -> int:
        target %= model.m
        for u in sums:
            need = (pair_img[u] - target) % model.m
            if need in img_to_sum:
                return u - img_to_sum[need]
        raise InvariantError(f"residue {target} has no preimage in 2A'-2A'")

    return invert


def freiman_gap(
    a: IntegerSet,
    rng,
    gamma: int = 1,
    enum_cap: int = DEFAULT_ENUM_CAP,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> FreimanGapResult:
    """Cover `a` by a progression shaped (Q - Q) + X.

    The working modulus is the smallest prime above 4 * |8A - 8A|, computed
    from the measured difference set rather than a doubling-constant power:
    the modeling stage needs exactly that margin, and the measured value
    keeps the group tractable. Modeling is retried up to
    gamma * ceil(log2 n) + 1 times; every input element's coefficient vector
    in the final cover is recorded and re-evaluated.
    """
    n = len(a)
    if n == 1:
        cover = Gap(a.min(), (1,), (1,))
        return FreimanGapResult(
            cover, {a.min(): (0,)}, None, None, None, None, None,
            {"n": 1, "m": None, "attempts": 0, "cover_dimension": 1, "cover_volume": 1},
        )

    diff8 = iterated_support(a, MODELING_FOLD, MODELING_FOLD, support_cap)
    d_size = support_size(diff8)
    m = next_prime(4 * d_size + 1)
    if m >= 16 * d_size:
        raise InvariantError("no prime in the modulus window")

    budget = gamma * max(1, math.ceil(math.log2(n))) + 1
    model = None
    attempts = 0
    failures: list[str] = []
    for _ in range(budget):
        attempts += 1
        got = modeling_lemma(a, MODELING_FOLD, m, rng, diff_support=diff8, support_cap=support_cap)
        if isinstance(got, FreimanModel):
            model = got
            break
        failures.append(got.reason)
    if model is None:
        raise PipelineFailureError(
            f"modeling failed {attempts} times (reasons: {','.join(failures)})"
        )

    bohr = bogolyubov(model.image, m)
    bres = gap_in_bohr(bohr, enum_cap)

    invert = _psi2_inverter(model)
    q_base = invert(0)
    y_gens = tuple(invert(g) - q_base for g in bres.gap.generators) if bres.gap.dimension else ()
    q_lengths = bres.gap.lengths if bres.gap.dimension else ()
    # the full-group fit (empty frequency set) pulls back to the trivial gap
    if bres.d_original == 0:
        y_gens, q_lengths = (), ()
    q_gap = Gap(q_base, y_gens, q_lengths)

    q_elems, q_proper = _enumerate_integer_gap(q_gap, enum_cap)
    if not q_proper:
        raise InvariantError("pulled-back progression not proper")
    diff2 = iterated_support(a, 2, 2, support_cap)
    inside = support_contains(diff2, np.asarray(q_elems.elements, dtype=np.int64))
    if not bool(np.all(inside)):
        raise InvariantError("pulled-back progression escapes 2A - 2A")

    x_set = ruzsa_cover(q_elems, a)

    qq = {u - v for u in q_elems for v in q_elems}
    q_coord = {val: coord for coord, val in _walk_gap(q_gap)}
    dims_q = q_gap.dimension
    singleton_x = len(x_set) == 1
    base = sum((l - 1) * g * -1 for l, g in zip(q_lengths, y_gens))
    if singleton_x:
        base += x_set.min()
        gens = y_gens
        lengths = tuple(2 * l - 1 for l in q_lengths)
    else:
        gens = y_gens + x_set.elements
        lengths = tuple(2 * l - 1 for l in q_lengths) + (2,) * len(x_set)
    cover = Gap(base, gens, lengths)

    coords: dict[int, tuple[int, ...]] = {}
    for elem in a:
        hit = None
        for xx in x_set:
            if elem - xx in qq:
                hit = xx
                break
        if hit is None:
            raise InvariantError(f"{elem} not covered")
        delta = elem - hit
        dcoord = None
        for qv in q_elems:
            if qv - delta in q_elems:
                c1, c2 = q_coord[qv], q_coord[qv - delta]
                dcoord = tuple(a1 - a2 + (l - 1) for a1, a2, l in zip(c1, c2, q_lengths))
                break
        if dcoord is None:
            raise InvariantError(f"difference {delta} not split by Q - Q")
        if singleton_x:
            coords[elem] = dcoord
        else:
            bits = tuple(1 if xx == hit else 0 for xx in x_set)
            coords[elem] = dcoord + bits
        if cover.element_at(coords[elem]) != elem:
            raise InvariantError(f"coordinate certificate failed for {elem}")

    metrics = {
        "n": n,
        "m": m,
        "q": model.q,
        "attempts": attempts,
        "aprime_size": len(model.a_prime),
        "bohr_frequencies": bres.d_original,
        "kept_dims": dims_q,
        "q_volume": q_gap.volume(),
        "x_size": len(x_set),
        "cover_dimension": cover.dimension,
        "cover_volume": cover.volume(),
        "strict_checked": model.strict_checked,
        "modeling_failures": failures,
    }
    return FreimanGapResult(cover, coords, model, bohr, bres, q_gap, x_set, metrics)


def _walk_gap(gap: Gap):
    for coord in gap.coordinate_boxes():
        yield coord, gap.element_at(coord)


def _enumerate_integer_gap(gap: Gap, cap: int) -> tuple[IntegerSet, bool]:
    if gap.volume() > cap:
        raise EnumerationCapError("gap enumeration above cap")
    vals = sorted({v for _, v in _walk_gap(gap)})
    return IntegerSet(tuple(vals)), len(vals) == gap.volume()


# ---------------------------------------------------------------------------
# dimension splitting


@dataclass(frozen=True)
class SplitResult:
    """Refined progression with every box length at or below the threshold,
    plus the per-dimension digit plan needed to transform coordinates."""

    gap: Gap
    plan: tuple[tuple[tuple[int, int], ...], ...]
    threshold: int


def split_dimensions(p: Gap, n: int, threshold: Optional[int] = None) -> SplitResult:
    """Split long dimensions into base-b digit dimensions.

    The threshold defaults to max(2, ceil(n^(1/d))) for the input dimension
    d. A length L > threshold becomes k digits in base b = ceil(L^(1/k)) for
    the smallest k with b <= threshold; generators scale by powers of b, so
    the refined progression contains the original one.
    """
    if p.modulus is not None:
        raise ValueError("dimension splitting applies to integer progressions")
    d = p.dimension
    if d == 0:
        return SplitResult(p, (), threshold or 2)
    if threshold is None:
        threshold = max(2, ceil_root(n, d))
    gens: list[int] = []
    lengths: list[int] = []
    plan: list[tuple[tuple[int, int], ...]] = []
    for y, l in zip(p.generators, p.lengths):
        if l <= threshold:
            plan.append(((y, l),))
            gens.append(y)
            lengths.append(l)
            continue
        k = 2
        while True:
            b = ceil_root(l, k)
            if b <= threshold:
                break
            k += 1
        dims = []
        for j in range(k - 1):
            dims.append((y * b**j, b))
        top = -(-l // b ** (k - 1))
        dims.append((y * b ** (k - 1), top))
        plan.append(tuple(dims))
        gens.extend(g for g, _ in dims)
        lengths.extend(ln for _, ln in dims)
    out = Gap(p.base, tuple(gens), tuple(lengths))
    return SplitResult(out, tuple(plan), threshold)


def split_coords(split: SplitResult, coords: tuple[int, ...]) -> tuple[int, ...]:
    """Transform original-gap coefficients into refined-gap digits."""
    out: list[int] = []
    for c, dims in zip(coords, split.plan):
        if len(dims) == 1:
            out.append(c)
            continue
        b = dims[0][1]
        rem = c
        for _, ln in dims:
            out.append(rem % b if ln == b else rem)
            rem //= b
    return tuple(out)
