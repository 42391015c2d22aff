"""Command-line front end: ``qmfmc <command> NETWORK [options]``.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .arith import format_fraction
from .flow import (
    FlowError,
    MultiplicativeFlow,
    cut_ratio,
    flow_value,
    integer_flow,
    k_min,
    quantum_min_cut,
    rational_max_flow,
    saturation_check,
    scaling_params,
    strictify,
    verify_flow,
)
from .network import Network, NetworkError, parse_network, scale_network, to_dot
from .oracles import (
    MAX_CUT_VERTICES,
    OracleLimitError,
    brute_force_qmc,
    brute_force_qmf,
    enumerate_cuts,
)
from .protocol import Protocol, extract_protocol, simulate_protocol
from .tensor import DEFAULT_FIELD_PRIME, BudgetExceeded, estimate_qmf_tilde

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


def load_network(path: str) -> Network:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return parse_network(text)


def emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# qmc


def cmd_qmc(args) -> int:
    net = load_network(args.network)
    if args.format == "dot":
        print(to_dot(net), end="")
        return EXIT_OK
    if args.scale != 1:
        net = scale_network(net, args.scale)
    qmc, cut = quantum_min_cut(net)
    payload = {"qmc": qmc, "cut": cut.to_json(), "brute_force": None}
    lines = [f"QMC={qmc}, cut={cut.describe()}"]
    status = EXIT_OK
    if len(net.vertices) <= args.max_cut_vertices:
        bf = brute_force_qmc(net)
        payload["brute_force"] = bf
        lines.append(f"brute force: {bf} ({'match' if bf == qmc else 'MISMATCH'})")
        if bf != qmc:
            status = EXIT_VERIFY
    emit(args, payload, "\n".join(lines))
    return status


# ---------------------------------------------------------------------------
# flow


def build_flow(net: Network, mode: str, k: int | None, strict: bool):
    """Return ``(n, flow, meta)`` for the requested construction."""
    meta: dict = {}
    if mode == "rational" and not strict:
        return 1, rational_max_flow(net), meta
    if not net.connected():
        return 1, MultiplicativeFlow.ones(net), {"note": "source and sink disconnected"}
    if mode == "rational" and strict:
        g = rational_max_flow(net)
        if all(x.denominator == 1 for pair in g.values for x in pair):
            f, changed = strictify(net, MultiplicativeFlow(g.values))
            meta["strictify_changed"] = changed
            return 1, f, meta
        meta["note"] = "rational optimum is not integral; using the scaled construction"
    params = scaling_params(net)
    kmin = k_min(net, params)
    meta.update(params.to_json(), k_min=kmin)
    if k is not None and k < kmin:
        raise FlowError(f"k={k} is below k_min={kmin}")
    n, f = integer_flow(net, k, params)
    meta["k"] = kmin if k is None else k
    if strict:
        f, changed = strictify(scale_network(net, n), f)
        meta["strictify_changed"] = changed
    return n, f, meta


def cmd_flow(args) -> int:
    net = load_network(args.network)
    mode = "integer" if args.integer else args.field
    n, f, meta = build_flow(net, mode, args.k, args.strict)
    scaled = scale_network(net, n)
    report = verify_flow(scaled, f)
    qmc, _ = quantum_min_cut(scaled)
    payload = {
        "n": n,
        "kind": f.kind,
        "flow": f.to_json()["edges"],
        "value": format_fraction(flow_value(scaled, f)),
        "qmc": qmc,
        "verification": report.to_json(),
        "meta": meta,
    }
    lines = [f"n={n} kind={f.kind}"]
    for e in scaled.edges:
        a, b = f.values[e.id]
        lines.append(f"  edge {e.id} {e.u}->{e.v}: {a}  {e.v}->{e.u}: {b}  (d={e.capacity})")
    lines.append(f"value={flow_value(scaled, f)} QMC={qmc} verified={'yes' if report.ok else 'NO'}")
    for v in report.violations:
        lines.append(f"  violation [{v.kind}] {v.where}: {v.detail}")
    emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# protocol


def run_protocol_pipeline(net: Network, k: int | None = None):
    """scale -> integer flow -> strictify -> extract -> simulate."""
    if not net.connected():
        prot = Protocol()
        return 1, prot, simulate_protocol(net, prot, claimed=1), 1
    n, f, _ = build_flow(net, "integer", k, strict=True)
    scaled = scale_network(net, n)
    qmc, _ = quantum_min_cut(scaled)
    prot = extract_protocol(scaled, f)
    return n, prot, simulate_protocol(scaled, prot, claimed=qmc), qmc


def cmd_protocol(args) -> int:
    net = load_network(args.network)
    n, prot, sim, qmc = run_protocol_pipeline(net, args.k)
    payload = {"n": n, "qmc": qmc, "protocol": prot.to_json()}
    lines = [f"n={n} QMC={qmc} steps={len(prot.steps)} dimension={prot.claimed_dimension}"]
    if args.simulate:
        payload["simulation"] = sim.to_json()
        lines.append(f"simulation: dimension={sim.dimension} ok={'yes' if sim.ok else 'NO'}")
        lines.extend(f"  violation: {v}" for v in sim.violations)
    if args.steps:
        for s in prot.steps:
            lines.append(f"  p={s.dimension}: " + " ".join(
                f"e{tr.edge}{'+' if tr.forward else '-'}" for tr in s.path))
    emit(args, payload, "\n".join(lines))
    return EXIT_OK if sim.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# scan


def scan_row(net: Network, n: int, cap: int | None) -> dict:
    scaled = scale_network(net, n)
    qmc, _ = quantum_min_cut(scaled)
    try:
        qmf = brute_force_qmf(scaled, strict=True, cap=cap)
    except OracleLimitError:
        return {"n": n, "qmf_s": None, "qmc": qmc, "ratio": None, "equal": None, "status": "skipped"}
    ratio = Fraction(qmf) / qmc
    return {"n": n, "qmf_s": qmf, "qmc": qmc, "ratio": ratio, "equal": qmf == qmc, "status": "ok"}


def scan(net: Network, max_n: int, cap: int | None = None, jobs: int = 1) -> list[dict]:
    """QMF_s(nN), QMC(nN) and their ratio for n = 1..max_n, with running max ratio."""
    ns = range(1, max_n + 1)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(scan_row, [net] * len(ns), ns, [cap] * len(ns)))
    else:
        rows = [scan_row(net, n, cap) for n in ns]
    best = None
    for row in rows:
        if row["ratio"] is not None:
            best = row["ratio"] if best is None else max(best, row["ratio"])
        row["prefix_max_ratio"] = best
    return rows


def _row_out(row: dict) -> dict:
    out = dict(row)
    for key in ("ratio", "prefix_max_ratio"):
        if out[key] is not None:
            out[key] = format_fraction(out[key])
    return out


def scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = ["n", "qmf_s", "qmc", "ratio", "equal", "prefix_max_ratio", "status"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else v) for k, v in _row_out(row).items()})
    return buf.getvalue()


def cmd_scan(args) -> int:
    net = load_network(args.network)
    if args.max < 1:
        raise UsageError("--max must be at least 1")
    rows = scan(net, args.max, args.cap, args.jobs)
    if args.format == "json":
        print(json.dumps([_row_out(r) for r in rows], sort_keys=True, indent=2))
    elif args.format == "csv":
        print(scan_csv(rows), end="")
    else:
        for r in rows:
            if r["status"] == "skipped":
                print(f"n={r['n']:>3}  skipped (oracle cap)")
                continue
            mark = "  =" if r["equal"] else ""
            print(f"n={r['n']:>3}  QMF_s={r['qmf_s']}  QMC={r['qmc']}  ratio={r['ratio']}{mark}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def verify_suite(net: Network, seed: int = 0, trials: int = 5, cap: int | None = None) -> list[dict]:
    """Run every invariant check on one network; each entry has name/status/detail."""
    results: list[dict] = []

    def record(name, ok, detail=""):
        results.append({"check": name, "status": "pass" if ok else "fail", "detail": detail})

    def skip(name, detail):
        results.append({"check": name, "status": "skipped", "detail": detail})

    small = len(net.vertices) <= MAX_CUT_VERTICES
    qmc, _ = quantum_min_cut(net)
    if small:
        bf = brute_force_qmc(net)
        record("qmc-oracle", bf == qmc, f"flow-based {qmc}, enumerated {bf}")

    g = rational_max_flow(net)
    rep = verify_flow(net, g)
    record("rational-flow", rep.ok and flow_value(net, g) == qmc,
           f"value {flow_value(net, g)}, {len(rep.violations)} violations")
    if small:
        cuts = list(enumerate_cuts(net))
        bad = [c.describe() for c in cuts if cut_ratio(net, g, c) != flow_value(net, g)]
        record("cut-identity", not bad, f"{len(cuts)} cuts checked" + (f"; bad: {bad}" if bad else ""))
        sat = saturation_check(net, g)
        record("saturation", not sat, "; ".join(v.where for v in sat))
    try:
        qmf = brute_force_qmf(net, strict=False, cap=cap)
        record("ordering", qmf <= qmc, f"QMF={qmf} <= QMC={qmc}")
    except OracleLimitError as exc:
        skip("ordering", str(exc))

    if net.connected():
        try:
            n, prot, sim, target = run_protocol_pipeline(net)
            scaled = scale_network(net, n)
            _, f_int, _ = build_flow(net, "integer", None, strict=False)
            rep = verify_flow(scaled, f_int)
            expected = brute_force_qmc(scaled) if small else quantum_min_cut(scaled)[0]
            record("pipeline", rep.ok and flow_value(scaled, f_int) == expected,
                   f"n={n}, value {flow_value(scaled, f_int)}, QMC(nN) {expected}")
            record("protocol", sim.ok and sim.dimension == expected,
                   f"{len(prot.steps)} steps, dimension {sim.dimension}")
        except FlowError as exc:
            record("pipeline", False, str(exc))
    else:
        skip("pipeline", "source and sink disconnected")

    try:
        est = estimate_qmf_tilde(net, trials=trials, seed=seed)
        record("tensor-bound", est.rank <= qmc, f"max rank {est.rank} <= QMC {qmc} (seeds {est.seeds})")
    except BudgetExceeded as exc:
        skip("tensor-bound", str(exc))
    return results


def verify_flow_file(net: Network, path: str, scale: int) -> list[dict]:
    try:
        data = json.loads(open(path, encoding="utf-8").read())
        f = MultiplicativeFlow.from_json(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read flow file {path}: {exc}") from exc
    scaled = scale_network(net, scale)
    rep = verify_flow(scaled, f)
    detail = "; ".join(f"[{v.kind}] {v.where}: {v.detail}" for v in rep.violations)
    return [{"check": "flow-file", "status": "pass" if rep.ok else "fail", "detail": detail}]


def cmd_verify(args) -> int:
    net = load_network(args.network)
    if args.flow:
        results = verify_flow_file(net, args.flow, args.scale)
    else:
        results = verify_suite(net, args.seed, args.trials, args.cap)
    failed = any(r["status"] == "fail" for r in results)
    text = "\n".join(f"{r['status'].upper():>7}  {r['check']}: {r['detail']}" for r in results)
    emit(args, {"results": results, "ok": not failed}, text)
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# rank


def cmd_rank(args) -> int:
    net = load_network(args.network)
    if args.scale != 1:
        net = scale_network(net, args.scale)
    est = estimate_qmf_tilde(net, args.trials, args.seed, args.q, args.budget)
    qmc, _ = quantum_min_cut(net)
    payload = {**est.to_json(), "qmc": qmc}
    emit(args, payload, f"max rank={est.rank} over {len(est.seeds)} trial(s) (q={args.q}); QMC={qmc}")
    return EXIT_OK if est.rank <= qmc else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmfmc", description="Quantum max-flow / min-cut toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json")):
        sp.add_argument("network", help="network JSON file, or - for stdin")
        sp.add_argument("--format", choices=formats, default="text")

    sp = sub.add_parser("qmc", help="quantum min-cut with witness cut")
    common(sp, ("text", "json", "dot"))
    sp.add_argument("--scale", type=int, default=1, help="evaluate on n*N")
    sp.add_argument("--max-cut-vertices", type=int, default=16,
                    help="brute-force confirmation only up to this many vertices")
    sp.set_defaults(func=cmd_qmc)

    sp = sub.add_parser("flow", help="construct and verify a flow")
    common(sp)
    sp.add_argument("--field", choices=["rational"], default="rational")
    sp.add_argument("--integer", action="store_true", help="integer flow on k*n0*m0*N")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("protocol", help="teleportation protocol from a strict optimal flow")
    common(sp)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--simulate", action="store_true")
    sp.add_argument("--steps", action="store_true", help="list every step in text output")
    sp.set_defaults(func=cmd_protocol)

    sp = sub.add_parser("scan", help="QMF_s(nN)/QMC(nN) for n = 1..N")
    common(sp, ("csv", "json", "text"))
    sp.add_argument("--max", type=int, default=10)
    sp.add_argument("--cap", type=int, default=None, help="oracle search-space cap")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run every invariant check on one network")
    common(sp)
    sp.add_argument("--flow", help="verify this flow JSON instead of running the suite")
    sp.add_argument("--scale", type=int, default=1, help="network scale the flow file refers to")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--cap", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("rank", help="random finite-field contraction rank (QMF-tilde lower bound)")
    common(sp)
    sp.add_argument("--scale", type=int, default=1)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--q", type=int, default=DEFAULT_FIELD_PRIME)
    sp.add_argument("--budget", type=int, default=2**20)
    sp.set_defaults(func=cmd_rank)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "scale", 1) < 1:
        print("error: --scale must be a positive integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (NetworkError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
