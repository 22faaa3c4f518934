"""Command line: generate instances, run the extraction, verify and measure brambles.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 construction gap.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

from .bramble import bramble_order, dump_bramble, load_bramble, order_bounds, verify_bramble
from .digraph import read_graph, write_graph
from .errors import BrambleError, ConstructionGap
from .generators import gen_cylindrical_grid, gen_grid_path_system
from .linkage import dump_path_system, load_path_system
from .pipeline import params_for_system, run_pipeline

log = logging.getLogger("dibramble")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GAP = 0, 1, 2, 3
SEED_ENV = "DIBRAMBLE_SEED"


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    json: bool = False
    verbosity: int = 0

    def __post_init__(self):
        cap = getattr(self.args, "cap", None)
        if cap is not None and cap < 1:
            raise ValueError("--cap must be positive")
        sigma = getattr(self.args, "sigma", None)
        if sigma is not None and not (0 < sigma <= 1):
            raise ValueError("--sigma must lie in (0, 1]")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dibramble", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-grid", help="write a cylindrical grid digraph")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("gen-ps", help="write a path system on a bidirected grid")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--rows", type=int, nargs="+")
    s.add_argument("--out", required=True)
    s.add_argument("--graph-out", help="also write the grid graph here")

    s = sub.add_parser("extract", help="run the pipeline and write the bramble")
    s.add_argument("--graph", required=True)
    s.add_argument("--ps", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--report", help="report JSON path (default: OUT with .report.json)")
    for name in ("d1", "d2", "d3"):
        s.add_argument(f"--{name}", type=int)
    s.add_argument("--bowtie-factor", type=float)
    s.add_argument("--budget", type=int, help="transversal resampling budget")

    s = sub.add_parser("verify", help="check a bramble against a graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--bramble", required=True)

    s = sub.add_parser("order", help="exact order (or bounds) of a bramble")
    s.add_argument("--graph", required=True)
    s.add_argument("--bramble", required=True)
    s.add_argument("--cap", type=int, default=64)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--only", type=int, nargs="+", choices=range(1, 10), metavar="N")
    return p


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    print(json.dumps(payload) if cfg.json else text)


def _gen_grid(cfg: RunConfig) -> int:
    G = gen_cylindrical_grid(cfg.args.g)
    write_graph(G, cfg.args.out)
    _emit(cfg, {"n": G.n, "m": G.m, "out": cfg.args.out}, f"wrote {G.n} vertices, {G.m} arcs to {cfg.args.out}")
    return EXIT_OK


def _gen_ps(cfg: RunConfig) -> int:
    a = cfg.args
    G, ps = gen_grid_path_system(a.g, a.a, a.b, rows=a.rows)
    dump_path_system(ps, a.out)
    if a.graph_out:
        write_graph(G, a.graph_out)
    _emit(cfg, {"a": ps.a, "b": ps.b, "n": G.n, "well_linked_verified": ps.well_linked_verified},
          f"wrote an ({ps.a}, {ps.b})-path system to {a.out}"
          + (" (well-linkedness verified exhaustively)" if ps.well_linked_verified else ""))
    return EXIT_OK


def _extract(cfg: RunConfig) -> int:
    a = cfg.args
    G = read_graph(a.graph)
    ps, vr = load_path_system(a.ps, G)
    if not vr.ok:
        print(f"path system is invalid: {vr.violations[0]}", file=sys.stderr)
        return EXIT_VERIFY
    seed = a.seed if a.seed is not None else _default_seed()
    params = params_for_system(ps, a.k, sigma=a.sigma, seed=seed, d1=a.d1, d2=a.d2, d3=a.d3,
                               bowtie_factor=a.bowtie_factor, transversal_budget=a.budget)
    for note in params.notes:
        log.info("parameter note: %s", note)
    report_path = a.report or os.path.splitext(a.out)[0] + ".report.json"
    try:
        res = run_pipeline(G, ps, params)
    except ConstructionGap as exc:
        print(f"construction gap: {exc}", file=sys.stderr)
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump({"seed": seed, "params": params.to_json(), "error": str(exc)}, fh, indent=1)
        return EXIT_GAP
    dump_bramble(res.bramble, a.out)
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(res.report, fh, indent=1)
    rep = res.report
    if rep["shortfall"]:
        log.warning("size shortfall: bramble of size %d < k = %d", rep["bramble_size"], a.k)
    _emit(cfg, rep, f"case {rep['case']}: bramble of size {rep['bramble_size']}, congestion "
                    f"{rep['congestion']} in {rep['seconds']}s; report in {report_path}")
    return EXIT_OK


def _verify(cfg: RunConfig) -> int:
    G = read_graph(cfg.args.graph)
    B, claimed = load_bramble(cfg.args.bramble)
    rep = verify_bramble(G, B, claimed)
    payload = {"ok": rep.ok, "size": rep.size, "congestion": rep.congestion,
               "violations": [str(v) for v in rep.violations]}
    text = (f"valid bramble: size {rep.size}, congestion {rep.congestion}" if rep.ok
            else "\n".join(str(v) for v in rep.violations))
    _emit(cfg, payload, text)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _order(cfg: RunConfig) -> int:
    G = read_graph(cfg.args.graph)
    B, _ = load_bramble(cfg.args.bramble)
    exact = bramble_order(G, B, cap=cfg.args.cap)
    if exact is not None:
        _emit(cfg, {"order": exact, "exact": True}, f"order {exact}")
    else:
        lo, hi = order_bounds(B)
        _emit(cfg, {"order": None, "exact": False, "lower": lo, "upper": hi},
              f"{B.size} elements exceed cap {cfg.args.cap}; order between {lo} and {hi}")
    return EXIT_OK


def _selftest(cfg: RunConfig) -> int:
    from .acceptance import run_all
    results = run_all(cfg.args.only)
    if cfg.json:
        print(json.dumps([{"number": r.number, "name": r.name, "passed": r.passed,
                           "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results]))
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {"gen-grid": _gen_grid, "gen-ps": _gen_ps, "extract": _extract, "verify": _verify,
            "order": _order, "selftest": _selftest}


def cli_main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(ns.command, ns, json=ns.json, verbosity=ns.verbose)
    except (_UsageError, ValueError) as exc:
        print(f"dibramble: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    try:
        return COMMANDS[cfg.command](cfg)
    except ConstructionGap as exc:
        print(f"construction gap: {exc}", file=sys.stderr)
        return EXIT_GAP
    except _UsageError as exc:
        print(f"dibramble: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError, BrambleError) as exc:
        print(f"dibramble: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())
