"""Command-line entry point.

Subcommands cover generation (gen-fphp, gen-colouring), encoding (encode),
certificate and proof search (nss-search, pc-search, cp-prove), checking
(pc-check, cp-check), ground truth (oracle), expansion verification
(expander-check), and the degree-growth experiment.

Exit codes: 0 for success or feasible, 1 for a proved-infeasible or
invalid-proof outcome (a successful negative answer), 2 for usage, input, or
budget errors.  All randomness flows from --seed.  When --manifest is given,
a JSON record of inputs, parameters, and timings is written next to the
outputs; rerunning with identical inputs reproduces the primary outputs
byte for byte (timings in the manifest itself naturally vary).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Dict, List, Optional

from . import cutplanes, encodings, expander, nullsatz, oracle, pcsearch, reduction
from .errors import BudgetExceeded, ColourProofsError, TooLarge
from .fields import FieldSpec, field_with_kth_root
from .graphs import (FphpInstance, Graph, fphp_from_text, fphp_to_text,
                     graph_from_dimacs, graph_to_dimacs)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        import os

        os.replace(tmp, path)


def _parse_field(spec: Optional[str]) -> FieldSpec:
    if not spec:
        return FieldSpec(2)
    parts = [int(x) for x in spec.split(",")]
    if len(parts) == 1:
        return FieldSpec(parts[0])
    return FieldSpec(parts[0], parts[1])


class Manifest:
    def __init__(self, argv: List[str]):
        self.record: Dict = {"command": argv, "inputs": {}, "params": {},
                             "timings": {}, "result": {}}
        self.t0 = time.time()

    def input_text(self, name: str, text: str):
        self.record["inputs"][name] = hashlib.sha256(text.encode()).hexdigest()

    def close(self, path: Optional[str], result: Dict):
        if path is None:
            return
        self.record["result"] = result
        self.record["timings"]["total_s"] = round(time.time() - self.t0, 3)
        _write(path, json.dumps(self.record, indent=2, sort_keys=True) + "\n")


# -- subcommands -----------------------------------------------------------------


def cmd_gen_fphp(args, manifest: Manifest) -> int:
    if args.expander:
        alpha, delta = (float(x) for x in args.expander.split(","))
        found = expander.sample_verified_expander(
            args.pigeons, args.holes, args.k, alpha, delta, args.seed, args.max_tries)
        if found is None:
            print(f"no ({alpha},{delta})-expander found in {args.max_tries} tries",
                  file=sys.stderr)
            return EXIT_NEGATIVE
        b, tries = found
        manifest.record["params"]["expander_tries"] = tries
    else:
        b = expander.sample_left_regular(args.pigeons, args.holes, args.k, args.seed)
    _write(args.output, fphp_to_text(b))
    manifest.close(args.manifest, {"pigeons": b.n_pigeons, "holes": b.n_holes})
    return EXIT_OK


def cmd_gen_colouring(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("fphp", text)
    b = fphp_from_text(text)
    out = reduction.build_reduction(b)
    _write(args.output, graph_to_dimacs(out.graph))
    sidecar = {
        "k": out.k,
        "n_vertices": out.graph.n_vertices,
        "pigeon_vertex": {str(i): v for i, v in out.pigeon_vertex.items()},
        "edge_labels": {f"{i},{c}": b.neighbours[i][c]
                        for i in range(b.n_pigeons) for c in range(out.k)},
        "chain_base": out.chain_base,
        "chain_length": out.chain_length,
        "chain_slots": {str(v): t for v, t in sorted(out.chain_slots.items())},
        "gadgets": [
            {"pigeons": list(g.pigeons), "colours": list(g.colours), "hole": g.hole,
             "left_clique": list(g.left_clique), "right_clique": list(g.right_clique),
             "precoloured": [list(p) for p in g.precoloured], "variant": g.variant}
            for g in out.gadget_index
        ],
    }
    if args.sidecar:
        _write(args.sidecar, json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    manifest.close(args.manifest, {"vertices": out.graph.n_vertices,
                                   "gadgets": len(out.gadget_index)})
    return EXIT_OK


def cmd_encode(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("input", text)
    if args.kind == "fphp":
        b = fphp_from_text(text)
        sys_ = encodings.encode_fphp(b, _parse_field(args.field))
        _write(args.output, encodings.poly_system_to_text(sys_))
    elif args.kind == "01":
        g = graph_from_dimacs(text)
        sys_ = encodings.encode_colouring01(g, args.k, _parse_field(args.field))
        _write(args.output, encodings.poly_system_to_text(sys_))
    elif args.kind == "roots":
        g = graph_from_dimacs(text)
        base = _parse_field(args.field)
        f = field_with_kth_root(base.p, args.k)
        sys_ = encodings.encode_colouring_roots(g, args.k, f)
        _write(args.output, encodings.poly_system_to_text(sys_))
    elif args.kind == "cp":
        g = graph_from_dimacs(text)
        sys_cp = encodings.encode_colouring_cp(g, args.k)
        if args.opb:
            _write(args.output, encodings.cp_system_to_opb(sys_cp))
        else:
            _write(args.output, encodings.cp_system_to_text(sys_cp))
    else:
        raise ValueError(f"unknown kind {args.kind}")
    manifest.close(args.manifest, {"kind": args.kind})
    return EXIT_OK


def cmd_nss_search(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("system", text)
    sys_ = encodings.poly_system_from_text(text)
    found = nullsatz.nss_min_degree(sys_, args.degree_max, cell_budget=args.budget)
    if found is None:
        print(f"infeasible at degree <= {args.degree_max}", file=sys.stderr)
        manifest.close(args.manifest, {"feasible": False, "degree_max": args.degree_max})
        return EXIT_NEGATIVE
    d, cert = found
    _write(args.certificate, nullsatz.certificate_to_text(sys_, cert))
    print(f"certificate of degree {d}", file=sys.stderr)
    manifest.close(args.manifest, {"feasible": True, "degree": d})
    return EXIT_OK


def cmd_pc_search(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("system", text)
    sys_ = encodings.poly_system_from_text(text)
    found = pcsearch.pc_min_degree(sys_, args.degree_max, want_witness=True,
                                   node_budget=args.budget)
    if found is None:
        print(f"not refutable at degree <= {args.degree_max}", file=sys.stderr)
        manifest.close(args.manifest, {"refutable": False, "degree_max": args.degree_max})
        return EXIT_NEGATIVE
    d, witness = found
    _write(args.proof, pcsearch.pc_proof_to_jsonl(witness))
    print(f"refutation of degree {d}", file=sys.stderr)
    manifest.close(args.manifest, {"refutable": True, "degree": d})
    return EXIT_OK


def cmd_pc_check(args, manifest: Manifest) -> int:
    sys_text = _read(args.system)
    proof_text = _read(args.proof)
    manifest.input_text("system", sys_text)
    manifest.input_text("proof", proof_text)
    sys_ = encodings.poly_system_from_text(sys_text)
    proof = pcsearch.pc_proof_from_jsonl(proof_text, sys_)
    valid, info = pcsearch.pc_check(proof, sys_)
    if not valid:
        print(f"invalid at line {info}", file=sys.stderr)
        manifest.close(args.manifest, {"valid": False, "line": info})
        return EXIT_NEGATIVE
    if args.refutation and not proof.is_refutation():
        print("valid derivation but not a refutation", file=sys.stderr)
        manifest.close(args.manifest, {"valid": True, "refutation": False})
        return EXIT_NEGATIVE
    print(f"valid, degree {info}", file=sys.stderr)
    manifest.close(args.manifest, {"valid": True, "degree": info})
    return EXIT_OK


def cmd_cp_prove(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("fphp", text)
    b = fphp_from_text(text)
    if args.target == "php":
        sys_cp, proof = cutplanes.cp_refute_php(b)
    else:
        out = reduction.build_reduction(b)
        sys_cp, proof = cutplanes.cp_refute_reduction(out, gadget_method=args.gadget_method)
    res = cutplanes.cp_check(proof, sys_cp)
    assert res.valid and proof.is_refutation()
    if args.system_out:
        _write(args.system_out, encodings.cp_system_to_text(sys_cp))
    _write(args.proof, cutplanes.cp_proof_to_jsonl(proof))
    print(f"refutation of length {len(proof)}", file=sys.stderr)
    manifest.close(args.manifest, {"length": len(proof)})
    return EXIT_OK


def cmd_cp_check(args, manifest: Manifest) -> int:
    sys_text = _read(args.system)
    proof_text = _read(args.proof)
    manifest.input_text("system", sys_text)
    manifest.input_text("proof", proof_text)
    sys_cp = encodings.cp_system_from_text(sys_text)
    proof = cutplanes.cp_proof_from_jsonl(proof_text)
    res = cutplanes.cp_check(proof, sys_cp)
    if not res.valid:
        print(f"invalid at line {res.offending_line}: {res.reason}", file=sys.stderr)
        manifest.close(args.manifest, {"valid": False, "line": res.offending_line})
        return EXIT_NEGATIVE
    if args.refutation and not proof.is_refutation():
        print("valid derivation but not a refutation", file=sys.stderr)
        manifest.close(args.manifest, {"valid": True, "refutation": False})
        return EXIT_NEGATIVE
    print(f"valid, length {res.length}", file=sys.stderr)
    manifest.close(args.manifest, {"valid": True, "length": res.length})
    return EXIT_OK


def cmd_oracle(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("input", text)
    if args.what == "colour":
        g = graph_from_dimacs(text)
        verdict = oracle.brute_colour(g, args.k, budget=args.budget)
    elif args.what == "fphp":
        verdict = oracle.brute_fphp(fphp_from_text(text), budget=args.budget)
    elif args.what == "poly01":
        verdict = oracle.poly_system_satisfiable_01(
            encodings.poly_system_from_text(text), budget=args.budget)
    elif args.what == "polyroots":
        verdict = oracle.poly_system_satisfiable_roots(
            encodings.poly_system_from_text(text), budget=args.budget)
    elif args.what == "cp01":
        verdict = oracle.cp_system_satisfiable_01(
            encodings.cp_system_from_text(text), budget=args.budget)
    else:
        raise ValueError(args.what)
    out = {"satisfiable": verdict.satisfiable, "nodes_explored": verdict.nodes_explored,
           "witness": _witness_json(verdict.witness)}
    _write(args.output, json.dumps(out, sort_keys=True) + "\n")
    manifest.close(args.manifest, {"satisfiable": verdict.satisfiable})
    return EXIT_OK if verdict.satisfiable else EXIT_NEGATIVE


def _witness_json(witness):
    if witness is None:
        return None
    if isinstance(witness, dict):
        return {str(k): repr(v) for k, v in sorted(witness.items())}
    return list(witness)


def cmd_expander_check(args, manifest: Manifest) -> int:
    text = _read(args.input)
    manifest.input_text("fphp", text)
    b = fphp_from_text(text)
    report = expander.check_boundary_expansion(b, args.alpha, args.delta,
                                               exhaustive_bound=args.budget)
    out = {"alpha": report.alpha, "delta": report.delta, "holds": report.holds,
           "witness": None if report.witness is None else
           {"pigeons": list(report.witness[0]), "boundary": report.witness[1]}}
    _write(args.output, json.dumps(out, sort_keys=True) + "\n")
    manifest.close(args.manifest, {"holds": report.holds})
    return EXIT_OK if report.holds else EXIT_NEGATIVE


# -- the degree-growth experiment -------------------------------------------------


def experiment_degree_growth(k: int, n_list: List[int], seed: int,
                             alpha: float = 0.25, delta: float = 1.5,
                             max_tries: int = 500,
                             fphp_degree_max: int = 8,
                             col_degree_max: int = 6,
                             nss_cell_budget: int = 20_000_000,
                             pc_node_budget: int = 2_000_000) -> List[Dict]:
    """One row per n: build a verified expander with n pigeons and n-1 holes,
    reduce it, and measure certificate and refutation degrees on both sides
    plus the explicit cutting-planes length.

    Rows that cannot be built or that exceed a budget are marked, never
    dropped.  With n - 1 < k no left-regular instance with distinct holes
    exists at all, so those rows carry status "no-instance".
    """
    gf2 = FieldSpec(2)
    rows: List[Dict] = []
    for n in n_list:
        row: Dict = {"n": n, "n_holes": n - 1, "status": "ok",
                     "expander_tries": None, "graph_vertices": None,
                     "fphp_nss_degree": None, "fphp_pc_degree": None,
                     "col_nss_degree": None, "col_pc_degree": None,
                     "cp_length": None}
        if n - 1 < k:
            row["status"] = "no-instance"
            rows.append(row)
            continue
        found = expander.sample_verified_expander(n, n - 1, k, alpha, delta,
                                                  seed, max_tries)
        if found is None:
            row["status"] = "no-expander-found"
            rows.append(row)
            continue
        b, tries = found
        row["expander_tries"] = tries
        out = reduction.build_reduction(b)
        row["graph_vertices"] = out.graph.n_vertices

        fphp_sys = encodings.encode_fphp(b, gf2)
        got = nullsatz.nss_min_degree(fphp_sys, fphp_degree_max)
        row["fphp_nss_degree"] = got[0] if got else f">{fphp_degree_max}"
        got = pcsearch.pc_min_degree(fphp_sys, fphp_degree_max, want_witness=False)
        row["fphp_pc_degree"] = got[0] if got else f">{fphp_degree_max}"

        col_sys = encodings.encode_colouring01(out.graph, k, gf2)
        row["col_nss_degree"] = _bounded_min_degree(
            lambda d: nullsatz.nss_feasible_at_degree(col_sys, d, cell_budget=nss_cell_budget)
            is not None,
            col_sys.search_floor_degree(), col_degree_max)
        row["col_pc_degree"] = _bounded_min_degree(
            lambda d: pcsearch.pc_refutable_at_degree(col_sys, d, want_witness=False,
                                                      node_budget=pc_node_budget)[0],
            col_sys.search_floor_degree(), col_degree_max)

        sys_cp, proof = cutplanes.cp_refute_reduction(out)
        res = cutplanes.cp_check(proof, sys_cp)
        assert res.valid and proof.is_refutation()
        row["cp_length"] = len(proof)
        rows.append(row)
    return rows


def _bounded_min_degree(feasible_at, floor: int, d_max: int):
    """Ascending search that reports budget exhaustion honestly: either the
    exact minimum, ">d_max" when every level is infeasible, or
    "budget(>=d)" when level d blew its budget after d-1 levels proved
    infeasible."""
    for d in range(floor, d_max + 1):
        try:
            if feasible_at(d):
                return d
        except BudgetExceeded:
            return f"budget(>={d})"
    return f">{d_max}"


EXPERIMENT_COLUMNS = ["n", "n_holes", "status", "expander_tries", "graph_vertices",
                      "fphp_nss_degree", "fphp_pc_degree", "col_nss_degree",
                      "col_pc_degree", "cp_length"]


def experiment_rows_to_csv(rows: List[Dict]) -> str:
    lines = [",".join(EXPERIMENT_COLUMNS)]
    for row in rows:
        lines.append(",".join("" if row[c] is None else str(row[c])
                              for c in EXPERIMENT_COLUMNS))
    return "\n".join(lines) + "\n"


def cmd_experiment(args, manifest: Manifest) -> int:
    n_list = [int(x) for x in args.n_list.split(",")]
    rows = experiment_degree_growth(
        args.k, n_list, args.seed, alpha=args.alpha, delta=args.delta,
        max_tries=args.max_tries, fphp_degree_max=args.fphp_degree_max,
        col_degree_max=args.col_degree_max, nss_cell_budget=args.budget,
        pc_node_budget=args.pc_budget)
    _write(args.out_csv, experiment_rows_to_csv(rows))
    if args.out_json:
        _write(args.out_json, json.dumps(rows, indent=2, sort_keys=True) + "\n")
    manifest.close(args.manifest, {"rows": len(rows)})
    return EXIT_OK


# -- argument plumbing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="colourproofs")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", help="write a JSON run manifest to this path")

    p = sub.add_parser("gen-fphp", help="sample a left-regular pigeon-hole instance")
    p.add_argument("--pigeons", type=int, required=True)
    p.add_argument("--holes", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expander", metavar="ALPHA,DELTA",
                   help="rejection-sample until this boundary expansion holds")
    p.add_argument("--max-tries", type=int, default=2000)
    p.add_argument("-o", "--output", default="-")
    common(p)
    p.set_defaults(func=cmd_gen_fphp)

    p = sub.add_parser("gen-colouring", help="reduce a pigeon-hole instance to a colouring graph")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--sidecar", help="write vertex/gadget maps as JSON")
    common(p)
    p.set_defaults(func=cmd_gen_colouring)

    p = sub.add_parser("encode", help="encode a graph or instance as a constraint system")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--kind", choices=["01", "roots", "cp", "fphp"], required=True)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--field", help="p or p,m (default 2)")
    p.add_argument("--opb", action="store_true", help="emit OPB for kind cp")
    p.add_argument("-o", "--output", default="-")
    common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("nss-search", help="search for a bounded-degree certificate")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--degree-max", type=int, required=True)
    p.add_argument("--budget", type=int, default=nullsatz.DEFAULT_CELL_BUDGET)
    p.add_argument("--certificate", default="-")
    common(p)
    p.set_defaults(func=cmd_nss_search)

    p = sub.add_parser("pc-search", help="bounded-degree saturation refutation search")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--degree-max", type=int, required=True)
    p.add_argument("--budget", type=int, default=50_000_000)
    p.add_argument("--proof", default="-")
    common(p)
    p.set_defaults(func=cmd_pc_search)

    p = sub.add_parser("pc-check", help="replay a polynomial-calculus proof")
    p.add_argument("--system", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--refutation", action="store_true",
                   help="also require the final line to be 1")
    common(p)
    p.set_defaults(func=cmd_pc_check)

    p = sub.add_parser("cp-prove", help="build an explicit cutting-planes refutation")
    p.add_argument("input", nargs="?", default="-", help="pigeon-hole instance")
    p.add_argument("--target", choices=["php", "reduction"], default="reduction")
    p.add_argument("--gadget-method", choices=["ladder", "branching"], default="ladder")
    p.add_argument("--proof", default="-")
    p.add_argument("--system-out", help="also write the inequality system")
    common(p)
    p.set_defaults(func=cmd_cp_prove)

    p = sub.add_parser("cp-check", help="replay a cutting-planes proof")
    p.add_argument("--system", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--refutation", action="store_true")
    common(p)
    p.set_defaults(func=cmd_cp_check)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    p.add_argument("what", choices=["colour", "fphp", "poly01", "polyroots", "cp01"])
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    p.add_argument("-o", "--output", default="-")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("expander-check", help="exhaustive boundary-expansion check")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--budget", type=int, default=expander.EXHAUSTIVE_PIGEON_BOUND,
                   help="max pigeons for the exhaustive subset sweep")
    p.add_argument("-o", "--output", default="-")
    common(p)
    p.set_defaults(func=cmd_expander_check)

    p = sub.add_parser("experiment-degree-growth",
                       help="degree and length measurements across instance sizes")
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--n-list", required=True, help="comma-separated pigeon counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.25,
                   help="boundary-expansion fraction; 1/2 is unattainable at "
                        "these densities, 1/4 rejects for real and accepts often")
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--max-tries", type=int, default=500)
    p.add_argument("--fphp-degree-max", type=int, default=8)
    p.add_argument("--col-degree-max", type=int, default=6)
    p.add_argument("--budget", type=int, default=20_000_000,
                   help="cell budget for certificate searches on the colouring side")
    p.add_argument("--pc-budget", type=int, default=2_000_000)
    p.add_argument("--out-csv", default="-")
    p.add_argument("--out-json")
    common(p)
    p.set_defaults(func=cmd_experiment)

    return top


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = Manifest(argv)
    try:
        return args.func(args, manifest)
    except (BudgetExceeded, TooLarge) as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ColourProofsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
