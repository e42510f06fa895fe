"""Brute-force ground truth for every solver and structural guarantee.

Nothing here is fast and nothing here is allowed to be clever: each oracle
enumerates, or meets in the middle, and reports an exact verdict. Oracles are
used by the test suite and by debugging subcommands, never on solver hot
paths. Enumerations take explicit caps and raise instead of sampling; the
sampling variants are separate functions with "sampled" in the name.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from gapsolve.core import (
    EnumerationCapError,
    Gap,
    IntegerSet,
    Matrix,
    check_width,
)

_MITM_MAX_N = 40
_DIRECT_MAX_N = 24


def _as_values(z) -> tuple[int, ...]:
    if isinstance(z, IntegerSet):
        return z.elements
    return tuple(int(v) for v in z)


def _half_sums(values: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """All 2^h subset sums of `values` with their popcounts.

    Index bit j corresponds to values[j], so the flat index doubles as the
    chosen-subset mask.
    """
    sums = np.zeros(1, dtype=np.int64)
    counts = np.zeros(1, dtype=np.int64)
    for v in values:
        sums = np.concatenate([sums, sums + v])
        counts = np.concatenate([counts, counts + 1])
    return sums, counts


def _mask_indices(mask: int, offset: int) -> tuple[int, ...]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(offset + j)
        mask >>= 1
        j += 1
    return tuple(out)


def brute_subset_sum(
    z,
    t: int,
    k: Optional[int] = None,
    mode: str = "first",
    cap: int = _MITM_MAX_N,
):
    """Meet-in-the-middle subset sum oracle.

    mode="first": deterministic witness (index tuple) or None.
    mode="count": number of solutions.
    mode="all": list of all index tuples (small n only).
    k restricts solutions to exactly k chosen indices.
    """
    values = _as_values(z)
    n = len(values)
    if n > cap or n > _MITM_MAX_N:
        raise EnumerationCapError(f"subset-sum oracle capped at n <= {cap}")
    # extremes of the half sums are what the int64 arrays must hold
    check_width(sum(v for v in values if v > 0))
    check_width(sum(v for v in values if v < 0))
    check_width(t)
    h = n // 2
    left_vals, right_vals = values[:h], values[h:]
    ls, lc = _half_sums(left_vals)
    rs, rc = _half_sums(right_vals)

    if mode == "count":
        total = 0
        right_by_count: dict = {}
        for mask, (s, c) in enumerate(zip(rs.tolist(), rc.tolist())):
            right_by_count.setdefault(c, {}).setdefault(s, 0)
            right_by_count[c][s] += 1
        for mask, (s, c) in enumerate(zip(ls.tolist(), lc.tolist())):
            need = t - s
            if k is None:
                total += sum(d.get(need, 0) for d in right_by_count.values())
            else:
                total += right_by_count.get(k - c, {}).get(need, 0)
        return total

    if mode == "all":
        right_lookup: dict = {}
        for mask, (s, c) in enumerate(zip(rs.tolist(), rc.tolist())):
            right_lookup.setdefault((s, c) if k is not None else s, []).append(mask)
        out = []
        for mask, (s, c) in enumerate(zip(ls.tolist(), lc.tolist())):
            keys = [(t - s, k - c)] if k is not None else [t - s]
            for key in keys:
                for rmask in right_lookup.get(key, ()):
                    out.append(_mask_indices(mask, 0) + _mask_indices(rmask, h))
        return sorted(out)

    if mode != "first":
        raise ValueError(f"unknown mode {mode!r}")

    # first: smallest left mask wins, then first occurrence on the right
    count_values = [None] if k is None else list(range(k + 1))
    best = None
    for c in count_values:
        if c is None:
            lsel = np.arange(len(ls))
            rsel_sums, rsel_idx = rs, np.arange(len(rs))
        else:
            lsel = np.nonzero(lc == c)[0]
            rmask = np.nonzero(rc == k - c)[0]
            rsel_sums, rsel_idx = rs[rmask], rmask
        if len(lsel) == 0 or len(rsel_sums) == 0:
            continue
        uniq, first = np.unique(rsel_sums, return_index=True)
        need = t - ls[lsel]
        pos = np.searchsorted(uniq, need)
        ok = (pos < len(uniq)) & (uniq[np.minimum(pos, len(uniq) - 1)] == need)
        hits = np.nonzero(ok)[0]
        if len(hits):
            lmask = int(lsel[hits[0]])
            rmask_flat = int(rsel_idx[first[pos[hits[0]]]])
            cand = (lmask, rmask_flat)
            if best is None or cand[0] < best[0]:
                best = cand
    if best is None:
        return None
    return _mask_indices(best[0], 0) + _mask_indices(best[1], h)


def brute_subset_sum_all(z, t: int, k: Optional[int] = None, cap: int = _DIRECT_MAX_N):
    """Direct single-pass enumeration over all 2^n subsets. Independent of
    the meet-in-the-middle path so the two can cross-check each other."""
    values = _as_values(z)
    n = len(values)
    if n > cap or n > _DIRECT_MAX_N:
        raise EnumerationCapError(f"direct subset-sum oracle capped at n <= {cap}")
    out = []
    for mask in range(1 << n):
        chosen = _mask_indices(mask, 0)
        if k is not None and len(chosen) != k:
            continue
        if sum(values[i] for i in chosen) == t:
            out.append(chosen)
    return sorted(out)


def brute_unbounded_subset_sum(z, t: int, cap: int = 2_000_000):
    """Coin-style DP. Returns the lexicographically least multiplicity
    vector reaching t (element order = input order), or None."""
    values = _as_values(z)
    if t < 0:
        return None
    if t > cap:
        raise EnumerationCapError(f"unbounded oracle capped at t <= {cap}")
    if any(v <= 0 for v in values):
        raise ValueError("unbounded oracle requires positive elements")
    n = len(values)
    # suffix_reach[j] bit v set iff v is a sum of elements j..n-1
    suffix_reach = [0] * (n + 1)
    suffix_reach[n] = 1
    for j in range(n - 1, -1, -1):
        r = suffix_reach[j + 1]
        step = values[j]
        while step <= t:
            r |= (r << step) & ((1 << (t + 1)) - 1)
            step <<= 1
        suffix_reach[j] = r
    if not (suffix_reach[0] >> t) & 1:
        return None
    mults = []
    rem = t
    for j in range(n):
        m = 0
        while not (suffix_reach[j + 1] >> rem) & 1:
            rem -= values[j]
            m += 1
        mults.append(m)
    assert rem == 0
    return tuple(mults)


def _assignment_matrix(ranges: Sequence[Sequence[int]], cap: int) -> np.ndarray:
    total = 1
    for r in ranges:
        total *= len(r)
        if total > cap:
            raise EnumerationCapError(f"assignment enumeration exceeds cap {cap}")
    grids = np.meshgrid(*[np.asarray(r, dtype=np.int64) for r in ranges], indexing="ij")
    return np.stack([g.ravel() for g in grids])


def brute_bilp_feasibility(a: Matrix, b: Sequence[int], cap: int = _DIRECT_MAX_N):
    """Exhaustive binary assignment scan; first solution in lexicographic
    variable order (x_1 slowest) or None."""
    n = a.num_cols
    if n > cap or n > _DIRECT_MAX_N:
        raise EnumerationCapError(f"BILP oracle capped at n <= {cap}")
    assigns = _assignment_matrix([(0, 1)] * n, 1 << _DIRECT_MAX_N)
    amat = np.asarray(a.rows, dtype=np.int64)
    prods = amat @ assigns
    ok = np.all(prods == np.asarray(b, dtype=np.int64)[:, None], axis=0)
    hits = np.nonzero(ok)[0]
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in assigns[:, hits[0]])


def brute_bounded_feasibility(
    a: Matrix, b: Sequence[int], bounds: Sequence[tuple[int, int]], cap: int = 1 << 20
):
    ranges = [range(lo, hi + 1) for lo, hi in bounds]
    assigns = _assignment_matrix(ranges, cap)
    amat = np.asarray(a.rows, dtype=np.int64)
    prods = amat @ assigns
    ok = np.all(prods == np.asarray(b, dtype=np.int64)[:, None], axis=0)
    hits = np.nonzero(ok)[0]
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in assigns[:, hits[0]])


def brute_hbilp_feasibility(a: Matrix, s: Sequence[int], t: int, cap: int = _MITM_MAX_N):
    """Reduces columns to their step dot products and reuses the subset-sum
    oracle. Returns a binary assignment tuple or None."""
    dots = [sum(int(a.rows[i][j]) * int(s[i]) for i in range(a.num_rows)) for j in range(a.num_cols)]
    hit = brute_subset_sum(dots, t, cap=cap)
    if hit is None:
        return None
    x = [0] * a.num_cols
    for j in hit:
        x[j] = 1
    return tuple(x)


def brute_ksum(z, t: int, k: int, mode: str = "first", cap: int = 1_000_000):
    """k-subset sums by direct combination scan in lexicographic index order."""
    values = _as_values(z)
    n = len(values)
    total = 1
    for i in range(k):
        total = total * (n - i) // (i + 1)
    if total > cap:
        raise EnumerationCapError(f"k-sum oracle: C({n},{k}) exceeds cap {cap}")
    if mode == "all":
        return [c for c in itertools.combinations(range(n), k) if sum(values[i] for i in c) == t]
    if mode == "count":
        return sum(1 for c in itertools.combinations(range(n), k) if sum(values[i] for i in c) == t)
    for combo in itertools.combinations(range(n), k):
        if sum(values[i] for i in combo) == t:
            return combo
    return None


# ---------------------------------------------------------------------------
# structural oracles


def _binom(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n + i) // (i + 1)
    return out


def verify_freiman_iso(
    phi: Callable[[int], int], domain, s: int, cap: int = 2_000_000,
    modulus: Optional[int] = None,
):
    """Exact check that phi restricted to `domain` preserves equality of
    s-fold sums in both directions and is a bijection.

    Hashes the multiset-sum fibers: phi is an s-homomorphism iff every
    source-sum fiber maps to a single image sum, and the converse direction
    makes it an isomorphism. Image sums are reduced mod `modulus` when the
    codomain is a cyclic group. Returns (True, None) or
    (False, (tuple, tuple)) with two s-tuples witnessing the violation (or
    two colliding 1-tuples for a bijection failure).
    """
    elems = _as_values(domain)
    n = len(elems)
    if _binom(n + s - 1, s) > cap:
        raise EnumerationCapError("tuple space exceeds cap")
    images = {x: phi(x) for x in elems}
    seen_img: dict = {}
    for x in elems:
        if images[x] in seen_img:
            return False, ((seen_img[images[x]],), (x,))
        seen_img[images[x]] = x

    def img_sum(tup):
        v = sum(images[x] for x in tup)
        return v % modulus if modulus is not None else v

    by_sum: dict = {}
    by_img_sum: dict = {}
    for tup in itertools.combinations_with_replacement(elems, s):
        src = sum(tup)
        img = img_sum(tup)
        if src in by_sum and by_sum[src][0] != img:
            return False, (by_sum[src][1], tup)
        by_sum.setdefault(src, (img, tup))
        if img in by_img_sum and by_img_sum[img][0] != src:
            return False, (by_img_sum[img][1], tup)
        by_img_sum.setdefault(img, (src, tup))
    return True, None


def verify_freiman_iso_sampled(
    phi: Callable[[int], int], domain, s: int, trials: int, rng,
    modulus: Optional[int] = None,
):
    """Randomized spot check of the s-isomorphism property. Builds equal-sum
    tuple pairs by resolving the last coordinate, so trials are not wasted on
    unrelated sums. Image sums are reduced mod `modulus` when given.
    Returns (ok, counterexample_or_None)."""
    elems = _as_values(domain)
    lookup = set(elems)
    images = {x: phi(x) for x in elems}

    def img_sum(tup):
        v = sum(images[x] for x in tup)
        return v % modulus if modulus is not None else v

    for _ in range(trials):
        a = [rng.choice(elems) for _ in range(s)]
        b = [rng.choice(elems) for _ in range(s - 1)]
        last = sum(a) - sum(b)
        if last in lookup:
            b.append(last)
            if img_sum(a) != img_sum(b):
                return False, (tuple(a), tuple(b))
        # reverse direction on an unconstrained pair
        c = [rng.choice(elems) for _ in range(s)]
        d = [rng.choice(elems) for _ in range(s)]
        if (img_sum(c) == img_sum(d)) != (sum(c) == sum(d)):
            return False, (tuple(c), tuple(d))
    return True, None


def bohr_enumerate(spec, cap: int = 1_000_000) -> IntegerSet:
    """All residues of the Bohr set by exact integer comparison:
    x qualifies iff q * min(rx mod m, m - rx mod m) <= p * m for every
    frequency r, where the width is the fraction p/q."""
    m = spec.m
    if m > cap:
        raise EnumerationCapError(f"Bohr enumeration capped at m <= {cap}")
    p, q = spec.width.numerator, spec.width.denominator
    xs = np.arange(m, dtype=np.int64)
    ok = np.ones(m, dtype=bool)
    for r in spec.frequencies:
        w = (xs * int(r)) % m
        dist = np.minimum(w, m - w)
        ok &= dist * q <= p * m
    return IntegerSet(tuple(int(x) for x in np.nonzero(ok)[0]))


def bohr_subset_check(spec, container: Iterable[int], cap: int = 1_000_000):
    """(True, None) if every Bohr element lies in `container`, else
    (False, first offending residue)."""
    inside = set(int(x) for x in container)
    for x in bohr_enumerate(spec, cap):
        if x not in inside:
            return False, x
    return True, None


def gap_containment(p: Gap, a: IntegerSet, cap: int = 4_000_000):
    """(True, None) if a is a subset of the gap's elements, else
    (False, first missing element)."""
    elems = set(p.enumerate_elements(cap))
    for x in a:
        if x not in elems:
            return False, x
    return True, None


def covering_check(y: IntegerSet, z: IntegerSet, x: IntegerSet):
    """Verifies z subset of (y - y) + x; returns (ok, counterexample)."""
    diffs = {u - v for u in y for v in y}
    for zz in z:
        if not any(zz - xx in diffs for xx in x):
            return False, zz
    return True, None
