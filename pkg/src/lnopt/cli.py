"""Command-line interface.

Subcommands:
  lnopt bench run   execute an (algorithms x suite x budgets x seeds) grid
  lnopt rank        score a results CSV and emit stability annotations
  lnopt attack run  drive evasion attacks against a detector oracle

Exit codes: 0 success, 1 usage/config error, 2 partial failure. All outputs
start with a comment header holding the tool version and the canonical
config, so equal configs rerun to byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attack import ATTACK_CSV_COLUMNS, AttackConfig, attack_dataset, attack_rows
from .benchmarks import SUITES, default_budget_grid, suite
from .detectors import BuiltinToyDetector, SubprocessDetector
from .harness import RunRecord, run_grid
from .images import Image, PpmError, generate_synthetic_fakes, read_ppm, write_ppm
from .modifiers import ModifierError
from .ranking import RankingError, compute_scores, stability_report
from .registry import UnknownAlgorithmError, parse_algorithm_id, resolve_alias
from .report import RESULTS_COLUMNS, emit_report
from . import _kernels


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def canonical_config(params: dict) -> str:
    """Printable canonical form; json round-trips back to the same dict."""
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


def parse_canonical_config(text: str) -> dict:
    return json.loads(text)


def _header_lines(params: dict) -> list[str]:
    return [f"lnopt {__version__} (backend={_kernels.BACKEND})", f"config: {canonical_config(params)}"]


def _parse_algos(raw: str) -> list[str]:
    algos = [a.strip() for a in raw.split(",") if a.strip()]
    if not algos:
        raise CliError("no algorithms given")
    for a in algos:
        try:
            parse_algorithm_id(a)
        except UnknownAlgorithmError as exc:
            raise CliError(str(exc)) from exc
    return algos


def _parse_budgets(raw: str) -> list[int]:
    if raw.strip() == "default":
        return default_budget_grid()
    try:
        budgets = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(f"bad budget list {raw!r}: {exc}") from exc
    if not budgets or any(b < 1 for b in budgets):
        raise CliError("budgets must be positive integers")
    return budgets


def cmd_bench(args) -> int:
    try:
        problems = suite(args.suite)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from exc
    algos = _parse_algos(args.algos)
    budgets = _parse_budgets(args.budgets)
    if args.seeds < 1:
        raise CliError("--seeds must be >= 1")
    params = {
        "command": "bench run",
        "suite": args.suite,
        "algos": algos,
        "budgets": budgets,
        "seeds": args.seeds,
        "save_traces": bool(args.save_traces),
    }
    header = _header_lines(params)
    grid = run_grid(
        algos,
        problems,
        budgets,
        args.seeds,
        parallelism=args.parallelism,
        keep_traces=args.save_traces,
    )
    out = Path(args.out)
    table = None
    if grid.records:
        try:
            table = compute_scores(grid.records)
        except RankingError as exc:
            print(f"warning: scoring skipped: {exc}", file=sys.stderr)
    emit_report(grid.records, table, out, header, save_traces=args.save_traces)
    if grid.failures:
        lines = "".join(f"# {h}\n" for h in header) + "algo,problem,budget,seed,error\n"
        for f in grid.failures:
            err = f.error.replace("\n", " ").replace(",", ";")
            lines += f"{f.algo},{f.problem},{f.budget},{f.seed},{err}\n"
        (out / "failures.csv").write_text(lines)
        print(f"{len(grid.failures)} run(s) failed; see failures.csv", file=sys.stderr)
        return 2
    return 0


def _read_results_csv(path: Path) -> list[RunRecord]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    records = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if not header_seen:
            if line.strip() != RESULTS_COLUMNS:
                raise CliError(f"{path}:{lineno}: expected header {RESULTS_COLUMNS!r}, got {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise CliError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            records.append(
                RunRecord(
                    algo=parts[0],
                    problem=parts[1],
                    budget=int(parts[2]),
                    seed=int(parts[3]),
                    final_loss=float(parts[4]),
                )
            )
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: {exc}") from exc
    if not records:
        raise CliError(f"{path}: no result rows")
    return records


def cmd_rank(args) -> int:
    records = _read_results_csv(Path(args.results))
    params = {"command": "rank", "results": str(args.results)}
    header = _header_lines(params)
    try:
        table = compute_scores(records)
    except RankingError as exc:
        raise CliError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .report import write_scores_csv

    write_scores_csv(out / "scores.csv", table, header)
    lines = "".join(f"# {h}\n" for h in header) + "algo_a,algo_b,problem,k,bound\n"
    for a in table.algos:
        for b in table.algos:
            if a == b:
                continue
            for entry in stability_report(records, a, b):
                lines += f"{a},{b},{entry.problem},{entry.k},{entry.bound!r}\n"
    (out / "stability.csv").write_text(lines)
    return 0


def _load_images(spec: str) -> list[Image]:
    if spec.startswith("synthetic:"):
        try:
            count = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliError(f"bad image spec {spec!r}") from exc
        if count < 0:
            raise CliError("synthetic count must be >= 0")
        return generate_synthetic_fakes(count, seed=0)
    directory = Path(spec)
    if not directory.is_dir():
        raise CliError(f"image directory {spec!r} does not exist")
    paths = sorted(directory.glob("*.ppm"))
    if not paths:
        raise CliError(f"no .ppm files in {spec!r}")
    images = []
    unreadable = 0
    for p in paths:
        try:
            images.append(read_ppm(p))
        except (PpmError, OSError) as exc:
            unreadable += 1
            print(f"warning: skipping unreadable image {p}: {exc}", file=sys.stderr)
    if not images:
        raise CliError("all images were unreadable", code=2)
    return images


def _detector_factory(spec: str):
    if spec.startswith("builtin:"):
        try:
            det_seed = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliError(f"bad detector spec {spec!r}") from exc
        return lambda: BuiltinToyDetector(det_seed)
    if spec.startswith("subprocess:"):
        command = spec.split(":", 1)[1]
        if not command.strip():
            raise CliError("empty subprocess detector command")
        return lambda: SubprocessDetector(command)
    raise CliError(f"detector must be builtin:<seed> or subprocess:<command>, got {spec!r}")


def cmd_attack(args) -> int:
    seed = args.seed
    env_seed = os.environ.get("BBO_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise CliError(f"BBO_SEED must be an integer, got {env_seed!r}") from exc
    try:
        config = AttackConfig(
            algo=args.algo,
            budget=args.budget,
            linf=args.linf,
            threshold=args.threshold,
            early_stop=not args.no_early_stop,
        )
    except (ValueError, UnknownAlgorithmError) as exc:
        raise CliError(str(exc)) from exc
    images = _load_images(args.images)
    factory = _detector_factory(args.detector)
    params = {
        "command": "attack run",
        "detector": args.detector,
        "images": args.images,
        "algo": resolve_alias(args.algo),
        "budget": args.budget,
        "linf": args.linf,
        "seed": seed,
        "threshold": args.threshold,
        "early_stop": not args.no_early_stop,
    }
    header = _header_lines(params)
    summary = attack_dataset(
        images,
        None,
        config,
        seed,
        parallelism=args.parallelism,
        detector_factory=factory,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = "".join(f"# {h}\n" for h in header) + ATTACK_CSV_COLUMNS + "\n"
    lines += "".join(row + "\n" for row in attack_rows(summary, config, seed))
    (out / "attack.csv").write_text(lines)
    if args.save_images:
        adir = out / "attacked"
        adir.mkdir(exist_ok=True)
        by_id = {img.id: img for img in images}
        for r in summary.results:
            if r.perturbation is None or r.skipped:
                continue
            applied = np.clip(by_id[r.image_id].pixels + r.perturbation, 0.0, 1.0)
            write_ppm(adir / f"{r.image_id}.ppm", Image(applied, id=r.image_id))
    rate = summary.success_rate
    rate_text = "undefined (no images attacked)" if rate is None else f"{rate:.3f}"
    print(
        f"attacked={summary.attacked} successes={summary.successes} "
        f"skipped={summary.skipped} errors={summary.errors} success_rate={rate_text}"
    )
    return 2 if summary.errors else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lnopt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lnopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="benchmark grids")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    bench_run = bench_sub.add_parser("run", help="execute a benchmark grid")
    bench_run.add_argument("--suite", required=True, help=f"one of {sorted(SUITES)}")
    bench_run.add_argument("--algos", required=True, help="comma-separated algorithm ids")
    bench_run.add_argument("--budgets", default="default", help="'default' or comma-separated ints")
    bench_run.add_argument("--seeds", type=int, default=10, help="seeds per cell")
    bench_run.add_argument("--out", default="lnopt-out", help="output directory")
    bench_run.add_argument("--parallelism", type=int, default=os.cpu_count() or 1)
    bench_run.add_argument("--save-traces", action="store_true", help="write binary trace sidecars")
    bench_run.set_defaults(func=cmd_bench)

    rank = sub.add_parser("rank", help="score a results CSV")
    rank.add_argument("--results", required=True, help="path to results.csv")
    rank.add_argument("--out", default="lnopt-out", help="output directory")
    rank.set_defaults(func=cmd_rank)

    attack = sub.add_parser("attack", help="evasion attacks")
    attack_sub = attack.add_subparsers(dest="attack_command", required=True)
    attack_run = attack_sub.add_parser("run", help="attack a detector over an image set")
    attack_run.add_argument("--detector", required=True, help="builtin:<seed> or subprocess:<command>")
    attack_run.add_argument("--images", required=True, help="directory of PPMs or synthetic:<count>")
    attack_run.add_argument("--algo", default="lognormal", help="algorithm id or algo1..algo6 alias")
    attack_run.add_argument("--budget", type=int, default=10000)
    attack_run.add_argument("--linf", type=float, default=0.03)
    attack_run.add_argument("--seed", type=int, default=0, help="global seed (BBO_SEED overrides)")
    attack_run.add_argument("--threshold", type=float, default=0.5)
    attack_run.add_argument("--out", default="lnopt-out")
    attack_run.add_argument("--parallelism", type=int, default=os.cpu_count() or 1)
    attack_run.add_argument("--save-images", action="store_true", help="write attacked PPMs")
    attack_run.add_argument("--no-early-stop", action="store_true", help="always exhaust the budget")
    attack_run.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (UnknownAlgorithmError, ModifierError, RankingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
