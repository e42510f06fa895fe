"""Subset-sum solvers driven by additive structure.

The binary solver is the one-row specialization of the reachable-sum DP;
its table growth is what the doubling-sensitive analysis bounds, so it is
deliberately cap-limited rather than clever. The unbounded solver goes the
long way around: encode elements as progression coordinates, enumerate the
few supports a lexicographically-least solution can use, then run a plain
coin reachability per support. Witnesses always re-verify before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from gapsolve.core import (
    DEFAULT_BIT_WIDTH,
    DEFAULT_TABLE_CAP,
    EnumerationCapError,
    IntegerSet,
    InvariantError,
    Matrix,
    SolveWitness,
)
from gapsolve.ilp import (
    BilpInstance,
    bilp_feasibility_dp,
    binary_image_supports,
    ss_to_hbilp,
)

SS_MODES = ("binary", "unbounded")


@dataclass(frozen=True)
class SubsetSumInstance:
    elements: IntegerSet
    target: int
    mode: str = "binary"

    def __post_init__(self):
        if self.mode not in SS_MODES:
            raise ValueError(f"mode must be one of {SS_MODES}")

    def to_json_dict(self) -> dict:
        return {
            "elements": list(self.elements.elements),
            "target": self.target,
            "mode": self.mode,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SubsetSumInstance":
        return cls(
            IntegerSet.from_iterable(d["elements"]),
            int(d["target"]),
            d.get("mode", "binary"),
        )


def subset_sum_doubling(
    z: IntegerSet,
    t: int,
    rng=None,
    table_cap: int = DEFAULT_TABLE_CAP,
    bits: Optional[int] = DEFAULT_BIT_WIDTH,
) -> Optional[SolveWitness]:
    """Binary subset sum through the reachable-sum table.

    The table never exceeds the number of distinct subset sums, which is
    what additive structure in z keeps small; table_cap turns the densest
    inputs into a clean failure instead of a memory grab. rng is accepted
    for interface parity with the randomized solvers and never used: the
    fill order is deterministic.
    """
    inst = BilpInstance.binary(Matrix.from_rows([list(z.elements)]), [t])
    w = bilp_feasibility_dp(inst, table_cap=table_cap, bits=bits)
    if w is None:
        return None
    indices = tuple(j for j, v in enumerate(w.payload) if v)
    if sum(z.elements[j] for j in indices) != t:
        raise InvariantError("subset witness failed re-evaluation")
    return SolveWitness("subset-of-indices", indices)


def _closure_masks(coins: list[int], limit: int) -> list[int]:
    """suffix[i] has bit v set iff v is a nonnegative-combination of
    coins[i:] and v <= limit. Bitmask ints with doubling shifts."""
    mask = (1 << (limit + 1)) - 1
    suffix = [0] * (len(coins) + 1)
    suffix[len(coins)] = 1
    for i in range(len(coins) - 1, -1, -1):
        r = suffix[i + 1]
        shift = coins[i]
        while True:
            grown = r | ((r << shift) & mask)
            if grown == r:
                break
            r = grown
            shift <<= 1
        suffix[i] = r
    return suffix


def unbounded_subset_sum(
    z: IntegerSet,
    t: int,
    rng,
    gamma: int = 1,
    state_cap: int = 250_000,
    target_cap: int = 2_000_000,
) -> Optional[SolveWitness]:
    """Unbounded subset sum via progression structure of the element set.

    Elements become columns of coordinates in a covering progression, and
    the lexicographically-least multiplicity vector for any reachable
    coordinate target has a support that also shows up for some binary
    column-sum target. Those supports are enumerable, and within a fixed
    support the problem is ordinary coin reachability. The coordinate box
    grows quickly with set size; this is a small-n solver by design, and
    the caps say so rather than letting it thrash.
    """
    if z.min() < 1:
        raise ValueError("elements must be positive")
    n = len(z)
    if t < 0:
        return None
    if t == 0:
        return SolveWitness("multiplicity-vector", (0,) * n)
    if t > target_cap:
        raise EnumerationCapError(f"target {t} above cap {target_cap}")
    enc = ss_to_hbilp(z, t, rng, gamma=gamma)
    supports = binary_image_supports(enc.instance.a, state_cap=state_cap)
    values = z.elements
    for sigma in supports:
        if not sigma:
            continue
        base = sum(values[j] for j in sigma)
        rem = t - base
        if rem < 0:
            continue
        coins = [values[j] for j in sigma]
        suffix = _closure_masks(coins, rem)
        if not (suffix[0] >> rem) & 1:
            continue
        extras = []
        left = rem
        for i, c in enumerate(coins):
            e = 0
            while not (suffix[i + 1] >> left) & 1:
                left -= c
                e += 1
                if left < 0:
                    raise InvariantError("coin walk escaped its certificate")
            extras.append(e)
        x = [0] * n
        for j, e in zip(sigma, extras):
            x[j] = 1 + e
        if sum(v * m for v, m in zip(values, x)) != t:
            raise InvariantError("multiplicity witness failed re-evaluation")
        return SolveWitness("multiplicity-vector", tuple(x))
    return None


def solve_subset_sum(
    inst: SubsetSumInstance,
    rng,
    table_cap: int = DEFAULT_TABLE_CAP,
    state_cap: int = 250_000,
    target_cap: int = 2_000_000,
    gamma: int = 1,
) -> Optional[SolveWitness]:
    if inst.mode == "binary":
        return subset_sum_doubling(inst.elements, inst.target, rng, table_cap=table_cap)
    return unbounded_subset_sum(
        inst.elements,
        inst.target,
        rng,
        gamma=gamma,
        state_cap=state_cap,
        target_cap=target_cap,
    )
