"""Command-line front end: ``query``, ``verify``, ``bench`` and ``stats``.

Exit codes: 0 ok, 1 usage, 2 I/O or parse error, 3 verification mismatch.
Timings go to stderr so stdout stays byte-stable across runs.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import multiprocessing as mp
import random
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .core_update import InvariantViolation
from .oracle import TemporalKCore, enumerate_naive
from .query import CallbackSink, CollectSink, CountSink, Emission, run_query
from .synth import random_instance
from .temporal_graph import (ParseError, QueryInterval, TemporalGraph, format_edge_list,
                             read_edge_list)

log = logging.getLogger("coret")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: Path | None = None
    k: list[int] | None = None
    ts: int | None = None
    te: int | None = None
    alpha: list[float] | None = None
    algorithm: list[str] | None = None
    output: str = "summary"
    normalize: bool = True
    seed: int = 0
    instances: int = 1000
    reps: int = 1
    timeout_secs: int = 3 * 3600
    out: Path | None = None
    update_order: str = "descending"
    on_reentry: str = "raise"

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        def as_list(v):
            return v if v is None or isinstance(v, list) else [v]
        return cls(
            input=Path(ns.input) if getattr(ns, "input", None) else None,
            k=as_list(getattr(ns, "k", None)),
            ts=getattr(ns, "ts", None),
            te=getattr(ns, "te", None),
            alpha=as_list(getattr(ns, "alpha", None)),
            algorithm=as_list(getattr(ns, "algorithm", None)),
            output=getattr(ns, "output", "summary"),
            normalize=not getattr(ns, "no_normalize", False),
            seed=getattr(ns, "seed", 0),
            instances=getattr(ns, "instances", 1000),
            reps=getattr(ns, "reps", 1),
            timeout_secs=getattr(ns, "timeout_secs", 3 * 3600),
            out=Path(ns.out) if getattr(ns, "out", None) else None,
            update_order=getattr(ns, "update_order", "descending"),
            on_reentry=getattr(ns, "on_reentry", "raise"),
        )


def alpha_window(g: TemporalGraph, alpha: float) -> tuple[int, int]:
    if not 0 < alpha <= 1:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha}")
    return 0, int(alpha * g.t_max)


def raw_window(g: TemporalGraph, ts: int | None, te: int | None) -> tuple[int, int]:
    """Map a window given in original timestamps onto ticks."""
    if g.raw_time_map is None:
        lo = 0 if ts is None else ts
        hi = g.t_max if te is None else min(te, g.t_max)
    else:
        from bisect import bisect_left, bisect_right
        stamps = g.raw_time_map
        lo = 0 if ts is None else bisect_left(stamps, ts)
        hi = g.t_max if te is None else bisect_right(stamps, te) - 1
    if ts is not None and te is not None and ts > te:
        raise UsageError(f"--ts {ts} exceeds --te {te}")
    if lo > hi or lo < 0:
        raise UsageError(f"window [{ts}, {te}] holds no timestamps of the input")
    return lo, hi


def resolve_window(g: TemporalGraph, cfg: RunConfig) -> tuple[int, int]:
    explicit = cfg.ts is not None or cfg.te is not None
    if explicit and cfg.alpha:
        raise UsageError("give either --alpha or --ts/--te, not both")
    if cfg.alpha:
        if len(cfg.alpha) != 1:
            raise UsageError("query takes a single --alpha")
        return alpha_window(g, cfg.alpha[0])
    return raw_window(g, cfg.ts, cfg.te)


def _single(values, name):
    if not values or len(values) != 1:
        raise UsageError(f"query takes exactly one --{name}")
    return values[0]


def _raw_emission(g: TemporalGraph, em: Emission) -> dict:
    rt, rv = g.raw_time, g.raw_vertex
    return {
        "tti": [rt(em.tti[0]), rt(em.tti[1])],
        "anchor": rt(em.anchor),
        "te": rt(em.te),
        "vertices": [rv(v) for v in em.vertices or ()],
        "edges": [[rv(u), rv(v), rt(t)] for u, v, t in em.edges or ()],
    }


def cmd_query(cfg: RunConfig, stdout: TextIO) -> int:
    k = _single(cfg.k, "k")
    algorithm = _single(cfg.algorithm or ["coret"], "algorithm")
    t0 = time.perf_counter()
    g = read_edge_list(cfg.input, normalize=cfg.normalize)
    load_ms = (time.perf_counter() - t0) * 1e3
    Ts, Te = resolve_window(g, cfg)
    q = QueryInterval(Ts, Te, k)
    if k < 1:
        raise UsageError("--k must be >= 1")

    out = open(cfg.out, "w", encoding="utf-8") if cfg.out else stdout
    try:
        def write(em: Emission) -> None:
            if cfg.output == "ttis":
                out.write(f"{g.raw_time(em.tti[0])} {g.raw_time(em.tti[1])}\n")
            else:
                out.write(json.dumps(_raw_emission(g, em), separators=(",", ":")) + "\n")

        t1 = time.perf_counter()
        ticks = 0
        if algorithm == "naive":
            cores = enumerate_naive(g, q)
            n = len(cores)
            if cfg.output != "summary":
                for (a, b), core in _naive_stream(g, q, cores):
                    write(Emission(a, b, core.tti, core.vertices, core.edges))
        else:
            if cfg.output == "summary":
                sink = CountSink()
            else:
                sink = CallbackSink(write, "tti" if cfg.output == "ttis" else "full")
            s = run_query(g, q, sink)
            n, ticks = s.cores_emitted, s.ticks_processed
            log.info("init_ms=%.1f update_ms=%.1f list_ms=%.1f", s.init_ms, s.update_ms, s.list_ms)
        query_ms = (time.perf_counter() - t1) * 1e3
    finally:
        if cfg.out:
            out.close()
    log.info("load_ms=%.1f query_ms=%.1f", load_ms, query_ms)
    if cfg.output == "summary" or cfg.out:
        stdout.write(
            f"vertices={g.n}\ntemporal_edges={g.num_temporal_edges}\nt_max={g.t_max}\n"
            f"window={Ts}..{Te}\nk={k}\nalgorithm={algorithm}\ncores={n}\nticks={ticks}\n"
        )
    return EXIT_OK


def _naive_stream(g: TemporalGraph, q: QueryInterval, cores: dict[tuple[int, int], TemporalKCore]):
    """Naive cores tagged with the first sub-interval ``(ts, TTI end)`` that produces them."""
    from .oracle import decomp
    seen = set()
    for ts in range(q.Ts, q.Te + 1):
        for te in range(ts, q.Te + 1):
            c = decomp(g, ts, te, q.k)
            if c.tti is not None and c.tti not in seen:
                seen.add(c.tti)
                yield (ts, te), cores[c.tti]


def _result_json(cores: dict[tuple[int, int], TemporalKCore]) -> list:
    return [
        {"tti": list(tti), "vertices": list(c.vertices), "edges": [list(e) for e in c.edges]}
        for tti, c in sorted(cores.items())
    ]


def cmd_verify(cfg: RunConfig, stdout: TextIO) -> int:
    rng = random.Random(cfg.seed)
    ok = 0
    for i in range(cfg.instances):
        g = random_instance(rng)
        k = rng.randint(1, 4)
        q = QueryInterval(0, g.t_max, k)
        want = enumerate_naive(g, q)
        sink = CollectSink("full")
        error = None
        try:
            run_query(g, q, sink, order=cfg.update_order, on_reentry=cfg.on_reentry)
            got = sink.cores()
        except InvariantViolation as exc:
            got, error = {}, str(exc)
        if error is None and got == want and len(sink.emissions) == len(want):
            ok += 1
            continue
        dest = cfg.out or Path("counterexample")
        dest.mkdir(parents=True, exist_ok=True)
        (dest / "instance.txt").write_text(
            f"# instance {i} seed {cfg.seed} k={k} n={g.n} window=0..{g.t_max}\n" + format_edge_list(g),
            encoding="utf-8",
        )
        (dest / "coret.json").write_text(
            json.dumps({"error": error, "cores": _result_json(got)}, indent=1), encoding="utf-8")
        (dest / "naive.json").write_text(json.dumps({"cores": _result_json(want)}, indent=1),
                                         encoding="utf-8")
        stdout.write(f"MISMATCH at instance {i} (k={k}); counterexample in {dest}\n")
        stdout.write(f"{ok}/{i + 1} OK\n")
        return EXIT_MISMATCH
    stdout.write(f"{ok}/{cfg.instances} OK\n")
    return EXIT_OK


def _bench_cell(g: TemporalGraph, algorithm: str, q: QueryInterval, conn) -> None:
    t0 = time.perf_counter()
    if algorithm == "naive":
        n = len(enumerate_naive(g, q))
    else:
        n = run_query(g, q).cores_emitted
    conn.send(((time.perf_counter() - t0) * 1e3, n))
    conn.close()


def run_cell(g: TemporalGraph, algorithm: str, q: QueryInterval, timeout: float):
    """Run one timed query in a child process; ``None`` on timeout."""
    ctx = mp.get_context("fork")
    parent, child = ctx.Pipe(duplex=False)
    p = ctx.Process(target=_bench_cell, args=(g, algorithm, q, child), daemon=True)
    p.start()
    child.close()
    result = parent.recv() if parent.poll(timeout) else None
    if result is None:
        p.kill()
    p.join()
    return result


def cmd_bench(cfg: RunConfig, stdout: TextIO) -> int:
    if cfg.reps < 1:
        raise UsageError("--reps must be >= 1")
    if cfg.ts is not None or cfg.te is not None:
        raise UsageError("bench takes --alpha values, not --ts/--te")
    g = read_edge_list(cfg.input, normalize=cfg.normalize)
    dataset = cfg.input.stem
    ks = cfg.k or [2]
    alphas = cfg.alpha or [0.2, 0.4, 0.6, 0.8, 1.0]
    algorithms = cfg.algorithm or ["coret"]
    out = open(cfg.out, "w", encoding="utf-8", newline="") if cfg.out else stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["dataset", "algorithm", "k", "alpha", "ms", "cores"])
        for k in ks:
            for algorithm in algorithms:
                prev = None
                for alpha in alphas:
                    Ts, Te = alpha_window(g, alpha)
                    q = QueryInterval(Ts, Te, k)
                    times, cores = [], None
                    for _ in range(cfg.reps):
                        r = run_cell(g, algorithm, q, cfg.timeout_secs)
                        if r is None:
                            times = None
                            break
                        times.append(r[0])
                        cores = r[1]
                    if times is None:
                        w.writerow([dataset, algorithm, k, alpha, "timeout", "timeout"])
                        continue
                    ms = statistics.median(times)
                    w.writerow([dataset, algorithm, k, alpha, f"{ms:.3f}", cores])
                    out.flush()
                    if algorithm == "coret" and prev is not None and ms < prev:
                        log.info("coret time fell from %.1f to %.1f ms at k=%d alpha=%s", prev, ms, k, alpha)
                    prev = ms
    finally:
        if cfg.out:
            out.close()
    return EXIT_OK


def cmd_stats(cfg: RunConfig, stdout: TextIO) -> int:
    g = read_edge_list(cfg.input, normalize=cfg.normalize)
    distinct = len({t for ts in g.times for t in ts})
    stdout.write(
        f"vertices={g.n}\n"
        f"temporal_edges={g.num_temporal_edges}\n"
        f"static_edges={len(g.edges)}\n"
        f"distinct_timestamps={distinct}\n"
        f"t_max={g.t_max}\n"
        f"lines={g.stats.lines}\n"
        f"duplicates={g.stats.duplicates}\n"
        f"self_loops={g.stats.self_loops}\n"
    )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coret", description="Time-range temporal k-core queries.")
    p.add_argument("-v", "--verbose", action="store_true", help="log timings to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(sp):
        sp.add_argument("--input", required=True, metavar="PATH")
        sp.add_argument("--no-normalize", action="store_true",
                        help="use raw timestamps as ticks")

    q = sub.add_parser("query", help="enumerate distinct temporal k-cores")
    add_input(q)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--ts", type=int, help="window start, original timestamp units")
    q.add_argument("--te", type=int, help="window end, original timestamp units")
    q.add_argument("--alpha", type=float, help="window [0, alpha * t_max] in ticks")
    q.add_argument("--algorithm", choices=["coret", "naive"], default="coret")
    q.add_argument("--output", choices=["summary", "ttis", "full"], default="summary")
    q.add_argument("--out", metavar="PATH")

    v = sub.add_parser("verify", help="differential test against the brute-force oracle")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=1000)
    v.add_argument("--out", metavar="PATH", help="counterexample directory")
    v.add_argument("--update-order", choices=["descending", "ascending"], default="descending",
                   help=argparse.SUPPRESS)
    v.add_argument("--on-reentry", choices=["raise", "ignore", "fallback"], default="raise",
                   help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="timing grid over k and alpha, CSV output")
    add_input(b)
    b.add_argument("--k", type=int, nargs="+")
    b.add_argument("--alpha", type=float, nargs="+")
    b.add_argument("--ts", type=int, help=argparse.SUPPRESS)
    b.add_argument("--te", type=int, help=argparse.SUPPRESS)
    b.add_argument("--algorithm", choices=["coret", "naive"], nargs="+")
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--timeout-secs", type=int, default=3 * 3600)
    b.add_argument("--out", metavar="PATH")

    s = sub.add_parser("stats", help="dataset summary")
    add_input(s)
    return p


COMMANDS = {"query": cmd_query, "verify": cmd_verify, "bench": cmd_bench, "stats": cmd_stats}


def main(argv: list[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    cfg = RunConfig.from_args(ns)
    try:
        return COMMANDS[ns.command](cfg, stdout)
    except UsageError as exc:
        print(f"coret: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"coret: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"coret: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
