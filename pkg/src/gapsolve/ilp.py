"""Feasibility solvers and reductions for bounded integer linear programs
with few constraints.

Solvers are exact dynamic programs over reachable constraint-vector values,
with deterministic witnesses: the table is filled variable by variable,
values scanned in ascending order, and the first writer of a vector keeps
it. Reductions carry enough metadata to decode a downstream witness back to
the original variables, and every decode re-evaluates the witness against
the original instance before returning it.

All arithmetic is exact. Instance constructors check the declared bit width
on row-sum extremes only (the tracked sums are monotone in each variable),
and bits=None switches to unchecked arbitrary precision, which the
subset-sum reduction uses for its deliberately enormous step coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from gapsolve.core import (
    DEFAULT_BIT_WIDTH,
    DEFAULT_TABLE_CAP,
    DuplicateColumnError,
    EnumerationCapError,
    Gap,
    IntegerSet,
    InvariantError,
    Matrix,
    SolveWitness,
    TableCapError,
    check_width,
)
from gapsolve.freiman import FreimanGapResult, freiman_gap, split_coords, split_dimensions


@dataclass(frozen=True)
class BilpInstance:
    """Ax = b with per-variable integer bounds (binary unless stated).

    Duplicate columns are rejected: the solvers treat the column set as a
    set, and a duplicate is always a modeling mistake at this layer.
    """

    a: Matrix
    b: tuple[int, ...]
    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.b) != self.a.num_rows:
            raise ValueError("right-hand side length must match row count")
        if len(self.bounds) != self.a.num_cols:
            raise ValueError("need one bound pair per variable")
        if any(lo > hi for lo, hi in self.bounds):
            raise ValueError("empty variable range")
        cols = self.a.columns()
        if len(set(cols)) != len(cols):
            raise DuplicateColumnError("matrix has duplicate columns")

    @classmethod
    def binary(cls, a: Matrix, b: Sequence[int]) -> "BilpInstance":
        return cls(a, tuple(int(v) for v in b), ((0, 1),) * a.num_cols)

    @property
    def is_binary(self) -> bool:
        return all(x == (0, 1) for x in self.bounds)

    @property
    def delta(self) -> int:
        return self.a.infinity_norm()

    def to_json_dict(self) -> dict:
        d = {"A": self.a.to_json_rows(), "b": list(self.b)}
        if not self.is_binary:
            d["bounds"] = [list(x) for x in self.bounds]
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "BilpInstance":
        a = Matrix.from_rows(d["A"])
        if "bounds" in d:
            bounds = tuple((int(lo), int(hi)) for lo, hi in d["bounds"])
            return cls(a, tuple(int(v) for v in d["b"]), bounds)
        return cls.binary(a, d["b"])


@dataclass(frozen=True)
class HbilpInstance:
    """Binary x with the single aggregated constraint <Ax, s> = t."""

    a: Matrix
    s: tuple[int, ...]
    t: int

    def __post_init__(self):
        if len(self.s) != self.a.num_rows:
            raise ValueError("step vector length must match row count")

    @property
    def delta(self) -> int:
        return self.a.infinity_norm()

    def dots(self) -> tuple[int, ...]:
        """Per-column contribution <A[:,j], s> of setting x_j = 1."""
        return tuple(
            sum(self.a.rows[i][j] * self.s[i] for i in range(self.a.num_rows))
            for j in range(self.a.num_cols)
        )

    def to_json_dict(self) -> dict:
        return {"A": self.a.to_json_rows(), "s": list(self.s), "t": self.t}

    @classmethod
    def from_json_dict(cls, d: dict) -> "HbilpInstance":
        return cls(Matrix.from_rows(d["A"]), tuple(int(v) for v in d["s"]), int(d["t"]))


# ---------------------------------------------------------------------------
# reachable-sum dynamic program

_ROOT = None


def _dp_tables(
    columns: Sequence[Sequence[int]],
    spans: Sequence[int],
    m: int,
    table_cap: int,
    bits: Optional[int],
):
    """Shared DP core over shifted variables x~_j in [0, spans_j].

    Returns (strides, lows, table) where table maps an encoded reachable
    vector to a back-pointer (prev_key, var, value) chain ending at _ROOT.
    Vector encoding is linear, so adding a column contribution is integer
    addition on keys.
    """
    lows, highs = [], []
    for i in range(m):
        lo = sum(min(0, col[i] * span) for col, span in zip(columns, spans))
        hi = sum(max(0, col[i] * span) for col, span in zip(columns, spans))
        if bits is not None:
            check_width(lo, bits)
            check_width(hi, bits)
        lows.append(lo)
        highs.append(hi)
    strides = []
    acc = 1
    for lo, hi in zip(lows, highs):
        strides.append(acc)
        acc *= hi - lo + 1

    root_key = sum(-lo * st for lo, st in zip(lows, strides))
    table: dict[int, object] = {root_key: _ROOT}
    for j, (col, span) in enumerate(zip(columns, spans)):
        if span == 0:
            continue
        delta = sum(col[i] * strides[i] for i in range(m))
        if delta == 0:
            continue
        additions: dict[int, tuple] = {}
        for key in table:
            nk = key
            for v in range(1, span + 1):
                nk += delta
                if nk not in table and nk not in additions:
                    additions[nk] = (key, j, v)
        table.update(additions)
        if len(table) > table_cap:
            raise TableCapError(
                f"reachable table hit {len(table)} entries at variable {j} (cap {table_cap})"
            )
    return strides, lows, table


def _dp_witness(table: dict, key: int, n: int) -> Optional[list[int]]:
    if key not in table:
        return None
    x = [0] * n
    cur = table[key]
    while cur is not _ROOT:
        prev, j, v = cur
        x[j] = v
        cur = table[prev]
    return x


@dataclass(frozen=True)
class ReachableSumTable:
    """All reachable constraint vectors of an instance with one witness
    assignment per vector."""

    vectors: dict

    def verify(self, a: Matrix) -> bool:
        return all(a.matvec(x) == vec for vec, x in self.vectors.items())


def bilp_reachable_table(
    inst: BilpInstance,
    table_cap: int = DEFAULT_TABLE_CAP,
    bits: Optional[int] = DEFAULT_BIT_WIDTH,
) -> ReachableSumTable:
    cols = inst.a.columns()
    spans = [hi - lo for lo, hi in inst.bounds]
    shift = [lo for lo, _ in inst.bounds]
    strides, lows, table = _dp_tables(cols, spans, inst.a.num_rows, table_cap, bits)
    base = inst.a.matvec(shift)
    out = {}
    for key in table:
        xt = _dp_witness(table, key, inst.a.num_cols)
        x = tuple(s + v for s, v in zip(shift, xt))
        out[tuple(b + d for b, d in zip(base, _decode_vec(key, strides, lows)))] = x
    return ReachableSumTable(out)


def _decode_vec(key: int, strides: list[int], lows: list[int]) -> tuple[int, ...]:
    out = []
    for i in range(len(strides) - 1, -1, -1):
        digit = key // strides[i]
        key -= digit * strides[i]
        out.append(digit + lows[i])
    return tuple(reversed(out))


def _solve_bounded(
    a: Matrix,
    b: Sequence[int],
    bounds: Sequence[tuple[int, int]],
    table_cap: int,
    bits: Optional[int],
) -> Optional[list[int]]:
    cols = a.columns()
    spans = [hi - lo for lo, hi in bounds]
    shift = [lo for lo, _ in bounds]
    base = a.matvec(shift)
    target = [bv - bb for bv, bb in zip(b, base)]
    if bits is not None:
        for v in target:
            check_width(v, bits)
    m = a.num_rows
    strides, lows, table = _dp_tables(cols, spans, m, table_cap, bits)
    for i in range(m):
        hi = sum(max(0, col[i] * span) for col, span in zip(cols, spans))
        if not lows[i] <= target[i] <= hi:
            return None
    key = sum((target[i] - lows[i]) * strides[i] for i in range(m))
    xt = _dp_witness(table, key, a.num_cols)
    if xt is None:
        return None
    return [s + v for s, v in zip(shift, xt)]


def bilp_feasibility_dp(
    inst: BilpInstance,
    table_cap: int = DEFAULT_TABLE_CAP,
    bits: Optional[int] = DEFAULT_BIT_WIDTH,
) -> Optional[SolveWitness]:
    """Binary BILP feasibility; None when infeasible."""
    if not inst.is_binary:
        raise ValueError("instance is not binary; use bounded_ilp_feasibility")
    x = _solve_bounded(inst.a, inst.b, inst.bounds, table_cap, bits)
    if x is None:
        return None
    if inst.a.matvec(x) != inst.b:
        raise InvariantError("witness failed re-evaluation")
    return SolveWitness("binary-vector", tuple(x))


def bounded_ilp_feasibility(
    inst: BilpInstance,
    table_cap: int = DEFAULT_TABLE_CAP,
    bits: Optional[int] = DEFAULT_BIT_WIDTH,
) -> Optional[SolveWitness]:
    """General bounded variant; witness payload is the variable assignment."""
    x = _solve_bounded(inst.a, inst.b, inst.bounds, table_cap, bits)
    if x is None:
        return None
    if inst.a.matvec(x) != inst.b:
        raise InvariantError("witness failed re-evaluation")
    return SolveWitness("multiplicity-vector", tuple(x))


def hbilp_feasibility(
    inst: HbilpInstance,
    table_cap: int = DEFAULT_TABLE_CAP,
    bits: Optional[int] = DEFAULT_BIT_WIDTH,
) -> Optional[SolveWitness]:
    """Aggregated single-constraint feasibility via the same table engine,
    running on the per-column dot products."""
    dots = inst.dots()
    x = _solve_bounded(
        Matrix.from_rows([list(dots)]), (inst.t,), ((0, 1),) * len(dots), table_cap, bits
    )
    if x is None:
        return None
    if sum(d * v for d, v in zip(dots, x)) != inst.t:
        raise InvariantError("witness failed re-evaluation")
    return SolveWitness("binary-vector", tuple(x))


# ---------------------------------------------------------------------------
# normalization reductions


@dataclass(frozen=True)
class BilpNonnegative:
    """Entrywise-nonnegative reformulation over twice the variables.

    Solutions of the new system with column support summing to the appended
    row's target restrict to solutions of the original on the first block.
    """

    matrix: Matrix
    rhs: tuple[int, ...]
    n_original: int
    support_target: int

    def decode(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(v) for v in y[: self.n_original])


def bilp_nonnegative(a: Matrix, b: Sequence[int], support_target: Optional[int] = None) -> BilpNonnegative:
    """Shift entries by the magnitude bound and append a support row.

    The appended row pins the total support so the shift contributes a fixed
    amount to every row. Only the default target (n) preserves feasibility
    exactly; other targets additionally constrain the support and exist for
    experimentation.
    """
    n, delta = a.num_cols, a.infinity_norm()
    if support_target is None:
        support_target = n
    if not 0 <= support_target <= 2 * n:
        raise ValueError("support target out of range")
    rows = [[v + delta for v in row] + [delta] * n for row in a.rows]
    rows.append([1] * (2 * n))
    rhs = tuple(bv + n * delta for bv in b) + (support_target,)
    out = Matrix.from_rows(rows)
    if out.infinity_norm() > 2 * delta and delta > 0:
        raise InvariantError("normalized magnitude exceeded twice the input bound")
    return BilpNonnegative(out, rhs, n, support_target)


@dataclass(frozen=True)
class HbilpFromBilp:
    """Aggregation of a nonnegative BILP into one constraint via positional
    powers; infeasible right-hand sides map to an unreachable target."""

    instance: HbilpInstance
    radix: int
    guard_tripped: bool

    def decode(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(v) for v in y)


def bilp_to_hbilp(a: Matrix, b: Sequence[int]) -> HbilpFromBilp:
    """Collapse rows with steps 1, q, q^2, ... where q = n*Delta + 1 bounds
    every reachable row value. Entries must be nonnegative (normalize
    first); a right-hand side outside [0, n*Delta] is unreachable, so those
    instances map to the canonically infeasible target -1.
    """
    if any(v < 0 for row in a.rows for v in row):
        raise ValueError("entries must be nonnegative; apply bilp_nonnegative first")
    n, delta = a.num_cols, a.infinity_norm()
    q = n * delta + 1
    s = tuple(q**i for i in range(a.num_rows))
    if any(not 0 <= bv <= n * delta for bv in b):
        return HbilpFromBilp(HbilpInstance(a, s, -1), q, True)
    t = sum(bv * si for bv, si in zip(b, s))
    return HbilpFromBilp(HbilpInstance(a, s, t), q, False)


@dataclass(frozen=True)
class HbilpNonnegative:
    """Entrywise-nonnegative aggregated instance over twice the variables.

    The appended row's step dwarfs everything else, pinning solution support
    to exactly n_original; restriction to the first block then decodes."""

    instance: HbilpInstance
    n_original: int
    big_step: int
    guard_tripped: bool

    def decode(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(v) for v in y[: self.n_original])


_GUARD_HBILP = HbilpInstance(Matrix.from_rows([[1]]), (1,), -1)


def hbilp_nonnegative(inst: HbilpInstance) -> HbilpNonnegative:
    """Same shift-and-pin trick as bilp_nonnegative, done in aggregated form.

    The shift adds n * Delta * sum(s) to the target -- the signed sum, since
    each row's shift contribution scales by that row's step. Shifted row
    values live in [0, 3*n*Delta], so aggregated sums stay within
    B = 3*n*Delta*m*max|s| of zero; the support pin's step is 2B + 1, which
    no difference of two achievable sums can bridge, so the support count is
    forced exactly. Feasible targets satisfy |shifted target| <= B; anything
    larger maps to a canonically infeasible output (necessary: targets in
    (B, 2B] would otherwise alias with support n +- 1).
    """
    a, s, t = inst.a, inst.s, inst.t
    n, m, delta = a.num_cols, a.num_rows, a.infinity_norm()
    if delta == 0:
        raise ValueError("zero matrix; delete zero columns first")
    smax = max(abs(v) for v in s) if s else 0
    span = 3 * n * delta * m * smax
    big = 2 * span + 1
    top_target = t + n * delta * sum(s)
    if abs(top_target) > span:
        return HbilpNonnegative(_GUARD_HBILP, n, big, True)
    rows = [[v + delta for v in row] + [delta] * n for row in a.rows]
    rows.append([1] * (2 * n))
    out = HbilpInstance(Matrix.from_rows(rows), s + (big,), top_target + n * big)
    return HbilpNonnegative(out, n, big, False)


# ---------------------------------------------------------------------------
# subset-sum bridge


@dataclass(frozen=True)
class SubsetSumFromHbilp:
    """Subset-sum instance equivalent to an aggregated ILP.

    `column_values` lists the element attached to each column of the final
    doubled system, in column order; `decode` maps a subset of indices into
    the sorted element set back to a binary assignment of the original
    variables and re-verifies it.
    """

    elements: IntegerSet
    target: int
    original: HbilpInstance
    column_values: tuple[int, ...]
    kept_columns: tuple[int, ...]
    n_normalized: int
    trivial: bool
    guard_tripped: bool
    meta: dict = field(default_factory=dict)

    def decode(self, indices: Sequence[int]) -> SolveWitness:
        n0 = self.original.a.num_cols
        x = [0] * n0
        if not self.trivial:
            chosen = {self.elements.elements[i] for i in indices}
            col_of = {v: j for j, v in enumerate(self.column_values)}
            picked = sorted(col_of[v] for v in chosen)
            half = [0] * self.n_normalized
            for j in picked:
                if j < self.n_normalized:
                    half[j] = 1
            kept = half[: len(self.kept_columns)]
            for idx, v in zip(self.kept_columns, kept):
                x[idx] = v
        dots = self.original.dots()
        if sum(d * v for d, v in zip(dots, x)) != self.original.t:
            raise InvariantError("decoded assignment failed re-evaluation")
        return SolveWitness("binary-vector", tuple(x))


def _digit_columns(count: int, radix: int, k: int) -> list[list[int]]:
    """First `count` base-radix vectors of length k in lexicographic order,
    as columns (most significant digit first)."""
    cols = []
    for j in range(count):
        digits = []
        v = j
        for _ in range(k):
            digits.append(v % radix)
            v //= radix
        cols.append(list(reversed(digits)))
    return cols


def hbilp_to_ss(
    inst: HbilpInstance, pad_dummies: bool = False, bits: Optional[int] = None
) -> SubsetSumFromHbilp:
    """Encode aggregated-ILP feasibility as subset sum over distinct
    positive elements.

    After dropping zero columns and normalizing to nonnegative entries, the
    system is doubled: fresh columns receive complementary digit rows whose
    steps are multiples of M, a value strictly larger than any achievable
    aggregated sum. Digits force the two copies to select complementary
    column sets, so subset choices correspond exactly to assignments. All
    2n column elements are distinct (asserted on every build) and positive.
    """
    a, s, t = inst.a, inst.s, inst.t
    kept = tuple(
        j for j in range(a.num_cols) if any(a.rows[i][j] != 0 for i in range(a.num_rows))
    )
    if not kept:
        elems = IntegerSet((1,))
        target = 0 if t == 0 else -1
        return SubsetSumFromHbilp(
            elems, target, inst, (1,), (), 0, True, False, {"reason": "all columns zero"}
        )
    a1 = Matrix.from_rows([[row[j] for j in kept] for row in a.rows])
    norm = hbilp_nonnegative(HbilpInstance(a1, s, t))
    if norm.guard_tripped:
        return SubsetSumFromHbilp(
            IntegerSet((1,)), -1, inst, (1,), kept, 0, True, True, {"reason": "target out of range"}
        )
    a2, s2, t2 = norm.instance.a, norm.instance.s, norm.instance.t
    n2, m2 = a2.num_cols, a2.num_rows
    delta2 = a2.infinity_norm()
    if delta2 < 2:
        # defensive: normalization yields delta >= 2 whenever the input had
        # a nonzero entry, but the digit argument needs radix >= 2
        rows = [list(r) for r in a2.rows]
        extra = [0] * n2
        extra[0] = 2
        rows.append(extra)
        a2 = Matrix.from_rows(rows)
        s2 = s2 + (0,)
        m2 += 1
        delta2 = 2

    smax = max(abs(v) for v in s2)
    big_m = n2 * m2 * delta2 * smax + 1
    if not -big_m < t2 < big_m:
        raise InvariantError("normalized target escaped the aliasing guard")
    k = 1
    while delta2**k < n2:
        k += 1
    digits = _digit_columns(n2, delta2, k)
    comp = [[delta2 - d for d in col] for col in digits]
    v_steps = tuple(big_m * delta2**i for i in range(k))

    columns = []
    for j in range(n2):
        columns.append([a2.rows[i][j] for i in range(m2)] + digits[j])
    for j in range(n2):
        columns.append([0] * m2 + comp[j])
    full_s = s2 + v_steps
    dots = tuple(sum(c * sv for c, sv in zip(col, full_s)) for col in columns)
    if len(set(dots)) != len(dots):
        raise InvariantError("column elements collide")
    if any(d <= 0 for d in dots):
        raise InvariantError("column element not positive")
    if bits is not None:
        for d in dots:
            check_width(d, bits)

    support = len(kept)
    target = t2 + support * delta2 * sum(v_steps)
    elements = sorted(dots)
    meta = {
        "m": big_m,
        "k": k,
        "radix": delta2,
        "support": support,
        "padded": 0,
    }
    if pad_dummies:
        extra_vals = []
        top_cap = delta2 ** max(k - 1, 0)
        j = 1
        existing = set(elements)
        while len(extra_vals) < len(elements) and j < top_cap:
            cand = target + j * big_m
            if cand not in existing:
                extra_vals.append(cand)
                existing.add(cand)
            j += 1
        elements = sorted(existing)
        meta["padded"] = len(extra_vals)
    return SubsetSumFromHbilp(
        IntegerSet(tuple(elements)),
        target,
        inst,
        dots,
        kept,
        n2,
        False,
        False,
        meta,
    )


@dataclass(frozen=True)
class HbilpFromSubsetSum:
    """Aggregated-ILP encoding of a subset-sum instance through a
    progression cover of the element set."""

    instance: HbilpInstance
    gap: Gap
    cover: FreimanGapResult
    elements: IntegerSet
    meta: dict = field(default_factory=dict)

    def decode(self, y: Sequence[int]) -> SolveWitness:
        indices = tuple(j for j, v in enumerate(y) if v)
        total = sum(self.elements.elements[j] for j in indices)
        if total != self.instance.t:
            raise InvariantError("decoded subset misses the target")
        return SolveWitness("subset-of-indices", indices)


def ss_to_hbilp(z: IntegerSet, t: int, rng, gamma: int = 1) -> HbilpFromSubsetSum:
    """Columns are progression coordinates of the elements; steps are the
    progression generators, so <Ax, s> recovers the subset sum exactly.

    A nonzero progression base becomes a leading all-ones row paired with
    the base as its step; without it the coordinate identity would be off
    by base * |subset|.
    """
    res = freiman_gap(z, rng, gamma=gamma)
    split = split_dimensions(res.cover, len(z))
    coords = {e: split_coords(split, res.coords[e]) for e in z}
    base = split.gap.base
    gens = split.gap.generators
    d = split.gap.dimension
    cols = []
    for e in z:
        c = coords[e]
        col = ([1] if base != 0 else []) + list(c)
        cols.append(col)
        if base * (1 if base != 0 else 0) + sum(ci * gi for ci, gi in zip(c, gens)) != e:
            raise InvariantError(f"coordinates of {e} do not reproduce it")
    steps = ((base,) if base != 0 else ()) + tuple(gens)
    rows = [[col[i] for col in cols] for i in range(len(steps))]
    inst = HbilpInstance(Matrix.from_rows(rows), steps, t)
    meta = {
        "dimension": d,
        "delta": inst.delta,
        "threshold": split.threshold,
        "cover_volume": res.metrics.get("cover_volume"),
    }
    return HbilpFromSubsetSum(inst, split.gap, res, z, meta)


# ---------------------------------------------------------------------------
# candidate supports for unbounded systems


class _BoxReachability:
    """Suffix reachability tables over the box [0, n*Delta]^m.

    States are encoded little-endian; table[j] marks vectors reachable as
    nonnegative combinations of columns j..n-1. Used both for enumerating
    lexicographically-least solutions and for walking one out per target.
    """

    def __init__(self, a: Matrix, state_cap: int):
        import numpy as np

        self.np = np
        self.a = a
        self.n = a.num_cols
        self.m = a.num_rows
        self.bound = self.n * a.infinity_norm()
        self.radix = self.bound + 1
        states = self.radix**self.m
        if states > state_cap:
            raise EnumerationCapError(
                f"support box has {states} states, above cap {state_cap}"
            )
        self.states = states
        coords = [
            (np.arange(states, dtype=np.int64) // self.radix**i) % self.radix
            for i in range(self.m)
        ]
        self.cols = [tuple(a.rows[i][j] for i in range(self.m)) for j in range(self.n)]
        self.deltas = [
            sum(c * self.radix**i for i, c in enumerate(col)) for col in self.cols
        ]
        self.valid = []
        for col in self.cols:
            ok = np.ones(states, dtype=bool)
            for i, c in enumerate(col):
                if c > 0:
                    ok &= coords[i] <= self.bound - c
            self.valid.append(ok)
        self.suffix = [None] * (self.n + 1)
        last = np.zeros(states, dtype=bool)
        last[0] = True
        self.suffix[self.n] = last
        for j in range(self.n - 1, -1, -1):
            cur = self.suffix[j + 1].copy()
            while True:
                frontier = np.nonzero(cur & self.valid[j])[0] + self.deltas[j]
                fresh = frontier[~cur[frontier]]
                if len(fresh) == 0:
                    break
                cur[fresh] = True
            self.suffix[j] = cur

    def encode(self, b: Sequence[int]) -> Optional[int]:
        if any(not 0 <= v <= self.bound for v in b):
            return None
        return sum(v * self.radix**i for i, v in enumerate(b))

    def lexmin(self, b: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Lexicographically least nonnegative solution of Ax = b, walking
        suffix feasibility column by column."""
        idx = self.encode(b)
        if idx is None or not self.suffix[0][idx]:
            return None
        xs = []
        for j in range(self.n):
            mult = 0
            while not self.suffix[j + 1][idx]:
                idx -= self.deltas[j]
                mult += 1
                if idx < 0 or mult > self.bound:
                    raise InvariantError("suffix walk escaped the box")
            xs.append(mult)
        return tuple(xs)


def small_support_candidates(
    a: Matrix, state_cap: int = 250_000
) -> tuple[tuple[int, ...], ...]:
    """Supports of lexicographically-least solutions across every target in
    [0, n*Delta]^m, deduplicated and sorted.

    Requires nonnegative entries and no zero column. The box is inclusive
    at n*Delta: binary column sums reach it exactly, and those targets are
    what transfers supports from arbitrary feasible right-hand sides. Each
    support size is asserted against m * log2(2*n*Delta + 1).
    """
    _validate_nonneg_no_zero_col(a)
    box = _BoxReachability(a, state_cap)
    supports = set()
    limit_sq = (2 * a.num_cols * a.infinity_norm() + 1) ** a.num_rows
    import numpy as np

    for idx in np.nonzero(box.suffix[0])[0].tolist():
        b = [(idx // box.radix**i) % box.radix for i in range(box.m)]
        x = box.lexmin(b)
        supp = tuple(j for j, v in enumerate(x) if v)
        if 2 ** len(supp) > limit_sq:
            raise InvariantError("support exceeds the logarithmic bound")
        supports.add(supp)
    return tuple(sorted(supports))


def binary_image_supports(
    a: Matrix, state_cap: int = 250_000, subset_cap: int = 1 << 16
) -> tuple[tuple[int, ...], ...]:
    """Supports of lexicographically-least solutions for targets that are
    binary column sums.

    Any feasible target's least solution has a support indicator whose own
    column sum is such a target, and the indicator is the least solution
    there, so this smaller family already covers every feasible support.
    """
    _validate_nonneg_no_zero_col(a)
    n = a.num_cols
    if 1 << n > subset_cap:
        raise EnumerationCapError(f"2^{n} binary targets exceed cap {subset_cap}")
    box = _BoxReachability(a, state_cap)
    supports = set()
    for mask in range(1 << n):
        b = [0] * a.num_rows
        for j in range(n):
            if mask >> j & 1:
                for i in range(a.num_rows):
                    b[i] += a.rows[i][j]
        x = box.lexmin(b)
        if x is not None:
            supports.add(tuple(j for j, v in enumerate(x) if v))
    return tuple(sorted(supports))


def _validate_nonneg_no_zero_col(a: Matrix) -> None:
    if any(v < 0 for row in a.rows for v in row):
        raise ValueError("entries must be nonnegative")
    for j in range(a.num_cols):
        if all(a.rows[i][j] == 0 for i in range(a.num_rows)):
            raise ValueError(f"column {j} is zero")
