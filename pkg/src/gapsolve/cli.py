"""Command-line front end.

Output is machine-first: one JSON object per line with sorted keys and no
whitespace, so fixed seeds give byte-identical runs. Exit codes: 0 when
solved/feasible/verified, 1 when infeasible or a verification fails, 2 on
errors (bad input, caps, pipeline failure).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from gapsolve.core import (
    DEFAULT_ENUM_CAP,
    DEFAULT_TABLE_CAP,
    Gap,
    IntegerSet,
    SolveWitness,
    gap_membership,
)
from gapsolve.freiman import freiman_gap, split_dimensions
from gapsolve.ilp import (
    BilpInstance,
    HbilpInstance,
    bilp_feasibility_dp,
    bilp_nonnegative,
    bilp_to_hbilp,
    bounded_ilp_feasibility,
    hbilp_feasibility,
    hbilp_to_ss,
    ss_to_hbilp,
)
from gapsolve.instances import (
    ap_set,
    bench_foursum_scaling,
    gap_sample_set,
    random_dense_set,
    sidon_set,
    union_of_aps,
)
from gapsolve.ksum import ksum
from gapsolve.subset_sum import SubsetSumInstance, solve_subset_sum


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _witness_json(w: SolveWitness) -> dict:
    return {"kind": w.kind, "values": list(w.payload)}


def _witness_from_json(d: dict) -> SolveWitness:
    return SolveWitness(d["kind"], tuple(int(v) for v in d["values"]))


def _rng(seed: int) -> random.Random:
    return random.Random(seed)


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_freiman(args) -> int:
    z = IntegerSet.from_json_dict(_read_json(args.input))
    res = freiman_gap(z, _rng(args.seed), gamma=args.gamma, enum_cap=args.cap_enum)
    out = {"gap": res.cover.to_json_dict(), "metrics": res.metrics}
    if args.split:
        split = split_dimensions(res.cover, len(z))
        out["split"] = split.gap.to_json_dict()
        out["threshold"] = split.threshold
    _emit(out)
    return 0


def _detect_ilp(d: dict):
    if "s" in d:
        return HbilpInstance.from_json_dict(d)
    return BilpInstance.from_json_dict(d)


def _cmd_ilp_solve(args) -> int:
    d = _read_json(args.input)
    inst = _detect_ilp(d)
    bits = None if args.no_width_check else 64
    if isinstance(inst, HbilpInstance):
        w = hbilp_feasibility(inst, table_cap=args.cap_table, bits=bits)
    elif inst.is_binary:
        w = bilp_feasibility_dp(inst, table_cap=args.cap_table, bits=bits)
    else:
        w = bounded_ilp_feasibility(inst, table_cap=args.cap_table, bits=bits)
    if w is None:
        _emit({"feasible": False})
        return 1
    _emit({"feasible": True, "witness": _witness_json(w)})
    return 0


_REDUCTIONS = {("bilp", "hbilp"), ("bilp", "ss"), ("hbilp", "ss"), ("ss", "hbilp")}


def _run_reduction(src: str, dst: str, d: dict, seed: int, gamma: int):
    """Build the reduction chain and return (instance_json, meta, stages).

    stages keeps the intermediate objects so decode can walk witnesses
    back without re-parsing.
    """
    meta: dict = {"from": src, "to": dst}
    if src == "ss":
        inst = SubsetSumInstance.from_json_dict(d)
        if inst.mode != "binary":
            raise ValueError("only binary subset sum reduces to an aggregated program")
        enc = ss_to_hbilp(inst.elements, inst.target, _rng(seed), gamma=gamma)
        meta.update(enc.meta)
        return enc.instance.to_json_dict(), meta, {"ss_enc": enc}
    stages: dict = {}
    if src == "bilp":
        binst = BilpInstance.from_json_dict(d)
        if not binst.is_binary:
            raise ValueError("reductions expect a binary program")
        nn = bilp_nonnegative(binst.a, binst.b)
        agg = bilp_to_hbilp(nn.matrix, nn.rhs)
        stages["nn"] = nn
        stages["agg"] = agg
        meta["support_target"] = nn.support_target
        meta["radix"] = agg.radix
        meta["guard_tripped"] = agg.guard_tripped
        hinst = agg.instance
        if dst == "hbilp":
            return hinst.to_json_dict(), meta, stages
    else:
        hinst = HbilpInstance.from_json_dict(d)
    ss = hbilp_to_ss(hinst)
    stages["ss"] = ss
    meta.update(ss.meta)
    meta["trivial"] = ss.trivial
    meta["guard_tripped"] = meta.get("guard_tripped", False) or ss.guard_tripped
    return (
        SubsetSumInstance(ss.elements, ss.target, "binary").to_json_dict(),
        meta,
        stages,
    )


def _cmd_ilp_reduce(args) -> int:
    if (args.src, args.dst) not in _REDUCTIONS:
        raise ValueError(f"no reduction from {args.src} to {args.dst}")
    d = _read_json(args.input)
    inst_json, meta, _ = _run_reduction(args.src, args.dst, d, args.seed, args.gamma)
    _emit({"instance": inst_json, "meta": meta})
    return 0


def _cmd_ilp_decode(args) -> int:
    if (args.src, args.dst) not in _REDUCTIONS:
        raise ValueError(f"no reduction from {args.src} to {args.dst}")
    d = _read_json(args.input)
    w = _witness_from_json(_read_json(args.witness))
    _, _, stages = _run_reduction(args.src, args.dst, d, args.seed, args.gamma)
    if args.src == "ss":
        decoded = stages["ss_enc"].decode(w.payload)
        _emit({"witness": _witness_json(decoded)})
        return 0
    if args.dst == "ss":
        decoded = stages["ss"].decode(w.payload)
        y = decoded.payload
    else:
        y = stages["agg"].decode(w.payload)
    if args.src == "bilp":
        x = stages["nn"].decode(y)
        binst = BilpInstance.from_json_dict(d)
        if binst.a.matvec(x) != binst.b:
            raise ValueError("decoded assignment does not satisfy the program")
        _emit({"witness": {"kind": "binary-vector", "values": list(x)}})
        return 0
    _emit({"witness": {"kind": "binary-vector", "values": list(y)}})
    return 0


def _cmd_subset_sum(args) -> int:
    inst = SubsetSumInstance.from_json_dict(_read_json(args.input))
    w = solve_subset_sum(
        inst,
        _rng(args.seed),
        table_cap=args.cap_table,
        gamma=args.gamma,
    )
    if w is None:
        _emit({"feasible": False})
        return 1
    _emit({"feasible": True, "witness": _witness_json(w)})
    return 0


def _cmd_ksum(args) -> int:
    z = IntegerSet.from_json_dict(_read_json(args.input))
    res = ksum(
        z,
        args.target,
        args.k,
        _rng(args.seed),
        gamma=args.gamma,
        backend=args.backend,
    )
    out = {
        "feasible": res.witness is not None,
        "work": res.work,
        "partitions": res.partitions_tried,
        "exhaustive": res.exhaustive,
    }
    if res.witness is not None:
        out["witness"] = _witness_json(res.witness)
        _emit(out)
        return 0
    _emit(out)
    return 1


def _cmd_verify(args) -> int:
    if args.check == "gap-contains":
        gap = Gap.from_json_dict(_read_json(args.gap))
        z = IntegerSet.from_json_dict(_read_json(args.set))
        missing = [x for x in z if gap_membership(gap, x, cap=args.cap_enum) is None]
        _emit({"ok": not missing, "missing": missing[:16]})
        return 0 if not missing else 1
    if args.check == "cover":
        gap = Gap.from_json_dict(_read_json(args.gap))
        z = IntegerSet.from_json_dict(_read_json(args.set))
        contains = all(gap_membership(gap, x, cap=args.cap_enum) is not None for x in z)
        proper = gap.is_proper(args.cap_enum)
        _emit({"contains": contains, "proper": proper, "volume": gap.volume()})
        return 0 if contains and proper else 1
    if args.check == "witness":
        d = _read_json(args.input)
        w = _witness_from_json(_read_json(args.witness))
        ok = _verify_witness(d, w)
        _emit({"ok": ok})
        return 0 if ok else 1
    raise ValueError(f"unknown check {args.check!r}")


def _verify_witness(d: dict, w: SolveWitness) -> bool:
    if "elements" in d and "target" in d:
        inst = SubsetSumInstance.from_json_dict(d)
        vals = inst.elements.elements
        if w.kind == "subset-of-indices":
            if len(set(w.payload)) != len(w.payload):
                return False
            if any(not 0 <= i < len(vals) for i in w.payload):
                return False
            return sum(vals[i] for i in w.payload) == inst.target
        if w.kind == "multiplicity-vector":
            if len(w.payload) != len(vals) or any(v < 0 for v in w.payload):
                return False
            return sum(v * m for v, m in zip(vals, w.payload)) == inst.target
        return False
    inst = _detect_ilp(d)
    if isinstance(inst, HbilpInstance):
        if len(w.payload) != inst.a.num_cols or any(v not in (0, 1) for v in w.payload):
            return False
        dots = inst.dots()
        return sum(dv * v for dv, v in zip(dots, w.payload)) == inst.t
    if len(w.payload) != inst.a.num_cols:
        return False
    if any(not lo <= v <= hi for v, (lo, hi) in zip(w.payload, inst.bounds)):
        return False
    return inst.a.matvec(w.payload) == inst.b


def _cmd_generate(args) -> int:
    rng = _rng(args.seed)
    if args.kind == "ap":
        z = ap_set(args.n, args.start, args.step)
    elif args.kind == "sidon":
        z = sidon_set(args.n)
    elif args.kind == "random":
        z = random_dense_set(rng, args.n, args.span)
    elif args.kind == "gap":
        z = gap_sample_set(rng, args.n, args.dimension)
    elif args.kind == "union-aps":
        z = union_of_aps(rng, args.n, args.parts)
    else:
        raise ValueError(f"unknown kind {args.kind!r}")
    _emit(z.to_json_dict())
    return 0


def _csv_lines(path: str) -> None:
    """Rewrite a JSON-lines bench file as CSV in place."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            rows.append(json.loads(line))
    bench = [r for r in rows if r.get("kind") == "foursum-bench"]
    fits = [r for r in rows if r.get("kind") == "fit"]
    cols = ["family", "n", "trial", "feasible", "work", "partitions", "c", "c_source"]
    if any("wall_ms" in r for r in bench):
        cols.append("wall_ms")
    lines = [",".join(cols)]
    for r in bench:
        lines.append(",".join(str(r.get(c, "")) for c in cols))
    for r in fits:
        lines.append(f"# fit,{r['family']},{r['exponent']}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_bench(args) -> int:
    if args.task != "foursum-scaling":
        raise ValueError(f"unknown bench task {args.task!r}")
    with open(args.out, "w", encoding="utf-8") as fh:
        result = bench_foursum_scaling(
            fh,
            seed=args.seed,
            trials=args.trials,
            min_exp=args.min_exp,
            max_exp=args.max_exp,
            timing=args.timing,
            gamma=args.gamma,
        )
    if args.format == "csv":
        _csv_lines(args.out)
    for family, exponent in sorted(result["fits"].items()):
        _emit({"family": family, "fitted_exponent": round(exponent, 4)})
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p, seed=True, gamma=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if gamma:
        p.add_argument("--gamma", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gapsolve")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("freiman", help="cover a set by a multidimensional progression")
    p.add_argument("--input", required=True)
    p.add_argument("--cap-enum", type=int, default=DEFAULT_ENUM_CAP)
    p.add_argument("--split", action="store_true", help="also emit the split-dimension form")
    _add_common(p)
    p.set_defaults(func=_cmd_freiman)

    p = sub.add_parser("ilp", help="feasibility and reductions")
    ilp_sub = p.add_subparsers(dest="ilp_command", required=True)

    q = ilp_sub.add_parser("solve")
    q.add_argument("--input", required=True)
    q.add_argument("--cap-table", type=int, default=DEFAULT_TABLE_CAP)
    q.add_argument("--no-width-check", action="store_true")
    q.set_defaults(func=_cmd_ilp_solve)

    q = ilp_sub.add_parser("reduce")
    q.add_argument("--from", dest="src", required=True, choices=["bilp", "hbilp", "ss"])
    q.add_argument("--to", dest="dst", required=True, choices=["hbilp", "ss"])
    q.add_argument("--input", required=True)
    _add_common(q)
    q.set_defaults(func=_cmd_ilp_reduce)

    q = ilp_sub.add_parser("decode")
    q.add_argument("--from", dest="src", required=True, choices=["bilp", "hbilp", "ss"])
    q.add_argument("--to", dest="dst", required=True, choices=["hbilp", "ss"])
    q.add_argument("--input", required=True, help="the original (pre-reduction) instance")
    q.add_argument("--witness", required=True)
    _add_common(q)
    q.set_defaults(func=_cmd_ilp_decode)

    p = sub.add_parser("subset-sum", help="binary or unbounded subset sum")
    ss_sub = p.add_subparsers(dest="ss_command", required=True)
    q = ss_sub.add_parser("solve")
    q.add_argument("--input", required=True)
    q.add_argument("--cap-table", type=int, default=DEFAULT_TABLE_CAP)
    _add_common(q)
    q.set_defaults(func=_cmd_subset_sum)

    p = sub.add_parser("ksum", help="k distinct indices summing to a target")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--backend", choices=["fft", "hash"], default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_ksum)

    p = sub.add_parser("verify", help="check artifacts against instances")
    p.add_argument("check", choices=["gap-contains", "cover", "witness"])
    p.add_argument("--gap")
    p.add_argument("--set")
    p.add_argument("--input")
    p.add_argument("--witness")
    p.add_argument("--cap-enum", type=int, default=DEFAULT_ENUM_CAP)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("generate", help="instance families")
    p.add_argument("--kind", required=True, choices=["ap", "sidon", "random", "gap", "union-aps"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--span", type=int, default=1 << 16)
    p.add_argument("--dimension", type=int, default=2)
    p.add_argument("--parts", type=int, default=2)
    _add_common(p, gamma=False)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("bench", help="scaling benchmarks")
    p.add_argument("task", choices=["foursum-scaling"])
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--min-exp", type=int, default=8)
    p.add_argument("--max-exp", type=int, default=14)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 2
    except Exception as exc:  # surfaced as exit 2 with a one-line reason
        print(f"gapsolve: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
