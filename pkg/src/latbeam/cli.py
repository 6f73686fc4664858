"""Command line interface.

Exit codes: 0 success, 1 decode failure (beam died or no complete path
when one was required), 2 bad usage or unparseable input, 3 a capacity
bound was exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._atomics import HAVE_NUMBA, use_numba
from .acoustics import load_cost_matrix
from .decoder import DecodeConfig, decode_batch, decode_utterance
from .errors import (
    CapacityError,
    DecodeFailure,
    LatbeamError,
    ParseError,
    UsageError,
    ValidationError,
)
from .lattice import read_lattice_text, write_lattice_text
from .reference import (
    brute_force_extra_costs,
    lattice_oracle_inputs,
    serial_decode,
)
from .scoring import lattice_density, oracle_wer, wer
from .synthetic import (
    bench_matrix,
    random_task,
    skewed_bench_graph,
    uniform_bench_graph,
)
from .wfst import load_symbols, load_wfst_text


def _add_decode_options(p: argparse.ArgumentParser) -> None:
    d = DecodeConfig()
    p.add_argument("--beam", type=float, default=d.beam)
    p.add_argument("--lattice-beam", type=float, default=d.lattice_beam)
    p.add_argument("--acoustic-scale", type=float, default=d.acoustic_scale)
    p.add_argument("--workers", type=int, default=d.num_workers)
    p.add_argument("--scheduler", default=d.scheduler,
                   choices=["static", "dynamic"])
    p.add_argument("--group-size", type=int, default=d.group_size)
    p.add_argument("--shards", type=int, default=d.num_shards)
    p.add_argument("--prune-interval", type=int, default=d.prune_interval)
    p.add_argument("--max-tokens-per-frame", type=int,
                   default=d.max_tokens_per_frame)
    p.add_argument("--max-lattice-arcs", type=int, default=d.max_lattice_arcs)
    p.add_argument("--engine", default="auto",
                   choices=["auto", "numba", "numpy"],
                   help="auto keeps the compiled engine when available")


def _config_from(args) -> DecodeConfig:
    return DecodeConfig(
        beam=args.beam,
        lattice_beam=args.lattice_beam,
        acoustic_scale=args.acoustic_scale,
        num_workers=args.workers,
        group_size=args.group_size,
        num_shards=args.shards,
        prune_interval=args.prune_interval,
        max_tokens_per_frame=args.max_tokens_per_frame,
        max_lattice_arcs=args.max_lattice_arcs,
        scheduler=args.scheduler,
    )


def _apply_engine(name: str) -> None:
    if name == "numba":
        use_numba(True)
    elif name == "numpy":
        use_numba(False)


def _format_words(words: list[int], symbols: dict[str, int] | None) -> str:
    if symbols is None:
        return " ".join(str(w) for w in words)
    names = {v: k for k, v in symbols.items()}
    return " ".join(names.get(w, str(w)) for w in words)


def _result_line(words_text: str, cost: float) -> str:
    return f"words: {words_text}  cost: {cost:.6g}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _cmd_decode(args) -> int:
    _apply_engine(args.engine)
    graph = load_wfst_text(_read(args.wfst))
    matrix = load_cost_matrix(_read(args.costs))
    symbols = load_symbols(_read(args.words)) if args.words else None
    cfg = _config_from(args)
    res = decode_utterance(graph, matrix, cfg,
                           want_lattice=args.lattice_out is not None)
    if res.partial:
        print("warning: no final state reached; result is partial",
              file=sys.stderr)
    if args.lattice_out is not None:
        Path(args.lattice_out).write_text(write_lattice_text(res.lattice))
    print(_result_line(_format_words(res.words, symbols), res.total_cost))
    return 0


def _cmd_batch_decode(args) -> int:
    _apply_engine(args.engine)
    graph = load_wfst_text(_read(args.wfst))
    paths = [ln.strip() for ln in _read(args.costs_list).splitlines()
             if ln.strip()]
    if not paths:
        raise UsageError(f"{args.costs_list} lists no matrix files")
    matrices = [load_cost_matrix(_read(p)) for p in paths]
    symbols = load_symbols(_read(args.words)) if args.words else None
    cfg = _config_from(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = decode_batch(graph, matrices, cfg)
    for path, res in zip(paths, results):
        stem = Path(path).stem
        (out_dir / f"{stem}.lat").write_text(write_lattice_text(res.lattice))
        line = _result_line(_format_words(res.words, symbols),
                            res.total_cost)
        flag = "  [partial]" if res.partial else ""
        print(f"{stem}: {line}{flag}")
    return 0


def _verify_one(seed: int, beam: float, lattice_beam: float,
                cfg: DecodeConfig) -> str | None:
    """One random instance through both suites; None when it matches."""
    w, m = random_task(seed)
    icfg = DecodeConfig(
        beam=beam, lattice_beam=lattice_beam,
        num_workers=cfg.num_workers, scheduler=cfg.scheduler,
        group_size=cfg.group_size, num_shards=cfg.num_shards,
        prune_interval=cfg.prune_interval,
    )
    res = decode_utterance(w, m, icfg)
    ref = serial_decode(w, m, beam)
    if res.words != ref.words:
        return f"words {res.words} vs reference {ref.words}"
    if res.total_cost != ref.total_cost:
        return f"cost {res.total_cost!r} vs reference {ref.total_cost!r}"
    if res.partial != ref.partial:
        return f"partial {res.partial} vs reference {ref.partial}"

    fc, blocks, terminal, live_extras = lattice_oracle_inputs(
        res.work_lattice)
    node_x, arc_x, best_total = brute_force_extra_costs(fc, blocks, terminal)
    if not res.partial and abs(best_total - res.total_cost) > 1e-6:
        return f"lattice best total {best_total} vs decode {res.total_cost}"
    for f in range(len(blocks)):
        if len(live_extras[f]) and np.max(
                np.abs(live_extras[f] - arc_x[f])) > 1e-4:
            return f"extra costs off at frame {f}"
    return None


def _cmd_verify(args) -> int:
    _apply_engine(args.engine)
    cfg = _config_from(args)
    rng = np.random.default_rng(args.seed)
    matched = 0
    for i in range(args.instances):
        beam = float(rng.uniform(4.0, 14.0))
        lattice_beam = float(rng.uniform(0.5, 6.0))
        why = _verify_one(args.seed + i, beam, lattice_beam, cfg)
        if why is None:
            matched += 1
        elif args.verbose:
            print(f"instance {i}: {why}", file=sys.stderr)
    print(f"{matched}/{args.instances} matched")
    return 0 if matched == args.instances else 1


@dataclass
class BenchRow:
    config: str
    workers: int
    scheduler: str
    wall_ms: float
    speedup: float
    timings: dict[str, float] | None = None


def run_bench(engines: list[str], kinds: list[str], workers: list[int],
              schedulers: list[str], num_states: int, arcs_per_state: int,
              num_frames: int, num_labels: int, beam: float,
              lattice_beam: float, max_lattice_arcs: int, seed: int,
              repeats: int, include_reference: bool = True) -> list[BenchRow]:
    """Time decodes across engines/schedulers/worker counts.

    Speedups are relative to the first worker count of the same
    engine/graph/scheduler row group; reference rows time the serial
    reference decoder on the same task.
    """
    rows: list[BenchRow] = []
    graphs = {}
    for kind in kinds:
        if kind == "uniform":
            graphs[kind] = uniform_bench_graph(seed, num_states,
                                               arcs_per_state, num_labels)
        elif kind == "skewed":
            graphs[kind] = skewed_bench_graph(seed, num_states,
                                              arcs_per_state, num_labels)
        else:
            raise UsageError(f"unknown graph kind {kind!r}")
    matrix = bench_matrix(seed + 1, num_frames, num_labels)

    for kind, graph in graphs.items():
        if include_reference:
            t0 = time.perf_counter()
            serial_decode(graph, matrix, beam)
            wall = (time.perf_counter() - t0) * 1000.0
            rows.append(BenchRow(f"reference-{kind}", 1, "serial", wall, 1.0))
        for engine in engines:
            if engine == "numba" and not HAVE_NUMBA:
                continue
            use_numba(engine == "numba")
            for sched in schedulers:
                base_wall = None
                for w in workers:
                    cfg = DecodeConfig(beam=beam, lattice_beam=lattice_beam,
                                       num_workers=w, scheduler=sched,
                                       max_lattice_arcs=max_lattice_arcs)
                    best = None
                    tm = None
                    for _ in range(max(repeats, 1)):
                        t0 = time.perf_counter()
                        res = decode_utterance(graph, matrix, cfg,
                                               collect_timings=True)
                        wall = (time.perf_counter() - t0) * 1000.0
                        if best is None or wall < best:
                            best, tm = wall, res.timings
                    if base_wall is None:
                        base_wall = best
                    rows.append(BenchRow(f"{engine}-{kind}", w, sched, best,
                                         base_wall / best, tm))
    return rows


def _cmd_bench(args) -> int:
    engines = [e for e in args.engines.split(",") if e]
    for e in engines:
        if e not in ("numba", "numpy"):
            raise UsageError(f"unknown engine {e!r}")
    if "numba" in engines and not HAVE_NUMBA:
        print("note: compiled engine unavailable; skipping numba rows",
              file=sys.stderr)
    kinds = [k for k in args.graphs.split(",") if k]
    workers = [int(w) for w in args.workers.split(",") if w]
    schedulers = [s for s in args.schedulers.split(",") if s]
    for s in schedulers:
        if s not in ("static", "dynamic"):
            raise UsageError(f"unknown scheduler {s!r}")
    rows = run_bench(engines, kinds, workers, schedulers, args.states,
                     args.arcs_per_state, args.frames, args.labels,
                     args.beam, args.lattice_beam, args.max_lattice_arcs,
                     args.seed, args.repeats)

    csv_lines = ["config,workers,scheduler,wall_ms,speedup"]
    for r in rows:
        csv_lines.append(f"{r.config},{r.workers},{r.scheduler},"
                         f"{r.wall_ms:.3f},{r.speedup:.3f}")
    csv_text = "\n".join(csv_lines) + "\n"
    if args.csv:
        Path(args.csv).write_text(csv_text)
    else:
        print(csv_text, end="")

    print(f"{'config':18s} {'workers':>7s} {'scheduler':>9s} "
          f"{'wall_ms':>10s} {'speedup':>8s} {'tokens%':>8s} "
          f"{'prune%':>7s} {'other%':>7s} {'partition_ms':>12s}",
          file=sys.stderr)
    for r in rows:
        if r.timings:
            tot = max(r.timings.get("total", 0.0), 1e-12)
            tp = 100.0 * r.timings.get("token_passing", 0.0) / tot
            lp = 100.0 * r.timings.get("lattice_pruning", 0.0) / tot
            ot = 100.0 * r.timings.get("other", 0.0) / tot
            part = r.timings.get("partition")
            part_s = f"{part * 1000.0:12.2f}" if part is not None else\
                f"{'-':>12s}"
            cats = f"{tp:8.1f} {lp:7.1f} {ot:7.1f} {part_s}"
        else:
            cats = f"{'-':>8s} {'-':>7s} {'-':>7s} {'-':>12s}"
        print(f"{r.config:18s} {r.workers:7d} {r.scheduler:>9s} "
              f"{r.wall_ms:10.2f} {r.speedup:8.2f} {cats}", file=sys.stderr)

    by_key = {(r.config, r.workers, r.scheduler): r.wall_ms for r in rows}
    for kind in kinds:
        for sched in schedulers:
            a = by_key.get((f"numba-{kind}", workers[0], sched))
            b = by_key.get((f"numpy-{kind}", workers[0], sched))
            if a and b:
                print(f"numba vs numpy ({kind}/{sched}, "
                      f"workers={workers[0]}): {b / a:.2f}x",
                      file=sys.stderr)
    return 0


def _parse_id_lines(text: str, path: str) -> list[list[int]]:
    out = []
    for ln_no, ln in enumerate(text.splitlines(), start=1):
        if not ln.strip():
            continue
        try:
            out.append([int(x) for x in ln.split()])
        except ValueError as exc:
            raise UsageError(
                f"{path} line {ln_no}: word ids must be integers"
            ) from exc
    return out


def _cmd_score(args) -> int:
    refs = _parse_id_lines(_read(args.ref), args.ref)
    hyps = None
    lats = None
    if args.hyp is not None:
        hyps = _parse_id_lines(_read(args.hyp), args.hyp)
        if len(hyps) != len(refs):
            raise UsageError(f"{args.hyp} has {len(hyps)} utterances but "
                             f"{args.ref} has {len(refs)}")
    if args.lattice_list is not None:
        paths = [ln.strip() for ln in
                 _read(args.lattice_list).splitlines() if ln.strip()]
        if len(paths) != len(refs):
            raise UsageError(f"{args.lattice_list} lists {len(paths)} "
                             f"lattices but {args.ref} has {len(refs)} "
                             "utterances")
        lats = [read_lattice_text(_read(p)) for p in paths]
    if hyps is None and lats is None:
        raise UsageError("score needs --hyp and/or --lattice-list")
    frames = None
    if args.frames is not None:
        frames = [int(ln) for ln in _read(args.frames).splitlines()
                  if ln.strip()]
        if len(frames) != len(refs):
            raise UsageError(f"{args.frames} lists {len(frames)} frame "
                             f"counts but {args.ref} has {len(refs)} "
                             "utterances")

    head = ["utt", "ref_words"]
    if hyps is not None:
        head += ["wer%", "sub", "ins", "del"]
    if lats is not None:
        head += ["ower%", "density"]
    print("\t".join(head))

    tot_ref = tot_err = tot_oerr = tot_arcs = tot_frames = 0
    for i, ref in enumerate(refs):
        row = [str(i + 1), str(len(ref))]
        if hyps is not None:
            r = wer(hyps[i], ref)
            tot_err += r.errors
            row += [f"{100.0 * r.errors / len(ref):.2f}",
                    str(r.substitutions), str(r.insertions),
                    str(r.deletions)]
        if lats is not None:
            fl = lats[i]
            oe = oracle_wer(fl, ref)
            tot_oerr += oe
            # Density needs the frame count, which the lattice text format
            # does not carry; take it from --frames when given.
            t = frames[i] if frames is not None else fl.num_frames
            row.append(f"{100.0 * oe / len(ref):.2f}")
            if t is not None:
                tot_arcs += len(fl.from_)
                tot_frames += t
                row.append(f"{lattice_density(fl, t):.2f}")
            else:
                row.append("-")
        tot_ref += len(ref)
        print("\t".join(row))

    agg = ["all", str(tot_ref)]
    if hyps is not None:
        agg += [f"{100.0 * tot_err / tot_ref:.2f}", "-", "-", "-"]
    if lats is not None:
        agg.append(f"{100.0 * tot_oerr / tot_ref:.2f}")
        agg.append(f"{tot_arcs / tot_frames:.2f}" if tot_frames else "-")
    print("\t".join(agg))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="latbeam",
        description="Parallel WFST beam decoding with lattice generation",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decode", help="decode one utterance")
    d.add_argument("--wfst", required=True, help="decoding graph file")
    d.add_argument("--costs", required=True, help="acoustic cost matrix")
    d.add_argument("--words", help="word symbol table")
    d.add_argument("--lattice-out", help="write the lattice here")
    _add_decode_options(d)
    d.set_defaults(fn=_cmd_decode)

    b = sub.add_parser("batch-decode", help="decode several utterances")
    b.add_argument("--wfst", required=True, help="decoding graph file")
    b.add_argument("--costs-list", required=True,
                   help="file with one matrix path per line")
    b.add_argument("--words", help="word symbol table")
    b.add_argument("--out-dir", default=".",
                   help="lattices land here, named <matrix stem>.lat")
    _add_decode_options(b)
    b.set_defaults(fn=_cmd_batch_decode)

    v = sub.add_parser("verify",
                       help="run the engine-vs-reference equivalence and "
                            "pruning-oracle suites on random tasks")
    v.add_argument("--instances", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--verbose", action="store_true")
    _add_decode_options(v)
    v.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("score", help="word error rate table")
    s.add_argument("--ref", required=True,
                   help="reference word ids, one utterance per line")
    s.add_argument("--hyp", help="hypothesis word ids, one per line")
    s.add_argument("--lattice-list",
                   help="file with one lattice path per line, for oracle "
                        "error rate and density")
    s.add_argument("--frames",
                   help="file with one frame count per line, for density")
    s.set_defaults(fn=_cmd_score)

    bench = sub.add_parser("bench", help="timing comparison")
    bench.add_argument("--engines",
                       default="numba,numpy" if HAVE_NUMBA else "numpy")
    bench.add_argument("--graphs", default="uniform")
    bench.add_argument("--workers", default="1,2,4,8")
    bench.add_argument("--schedulers", default="static,dynamic")
    bench.add_argument("--states", type=int, default=5000)
    bench.add_argument("--arcs-per-state", type=int, default=24)
    bench.add_argument("--frames", type=int, default=500)
    bench.add_argument("--labels", type=int, default=32)
    bench.add_argument("--beam", type=float, default=4.0,
                       help="narrower than the decode default so the "
                            "dense synthetic graphs stay in memory")
    bench.add_argument("--lattice-beam", type=float, default=2.0)
    bench.add_argument("--max-lattice-arcs", type=int, default=24_000_000)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--repeats", type=int, default=1)
    bench.add_argument("--csv", help="write rows here instead of stdout")
    bench.set_defaults(fn=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecodeFailure as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return 1
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3
    except LatbeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
