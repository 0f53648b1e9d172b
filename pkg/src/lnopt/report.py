"""CSV and SVG emission for benchmark grids.

Every output file starts with comment lines carrying the canonical run
config and the tool version, so equal configs rerun to byte-identical
files. Charts are plain hand-emitted SVG: per-problem raw-loss curves plus
one cross-problem chart of min-max normalized losses.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .harness import RunRecord
from .ranking import ScoreTable, mean_losses

RESULTS_COLUMNS = "algo,problem,budget,seed,final_loss"
SCORES_COLUMNS = "algo,score,rank"

_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]


def format_mean(v: float) -> str:
    if v == 0.0 or 0.005 <= abs(v) < 1000.0:
        return f"{v:.2f}"
    return f"{v:.3g}"


def series_label(algo: str, budget_means: dict[int, float]) -> str:
    """Chart label: mean at the largest budget in parentheses, mean over the
    remaining budgets in brackets."""
    budgets = sorted(budget_means)
    label = f"{algo} ({format_mean(budget_means[budgets[-1]])})"
    if len(budgets) >= 2:
        rest = float(np.mean([budget_means[b] for b in budgets[:-1]]))
        label += f" [{format_mean(rest)}]"
    return label


def _comment_header(header_lines: Sequence[str]) -> str:
    return "".join(f"# {line}\n" for line in header_lines)


def write_results_csv(path: Path, records: Sequence[RunRecord], header_lines: Sequence[str]):
    lines = [_comment_header(header_lines), RESULTS_COLUMNS + "\n"]
    for r in records:
        lines.append(f"{r.algo},{r.problem},{r.budget},{r.seed},{r.final_loss!r}\n")
    path.write_text("".join(lines))


def write_scores_csv(path: Path, table: ScoreTable, header_lines: Sequence[str]):
    lines = [_comment_header(header_lines), SCORES_COLUMNS + "\n"]
    for i, algo in enumerate(table.algos):
        lines.append(f"{algo},{float(table.scores[i])!r},{int(table.ranks[i])}\n")
    path.write_text("".join(lines))


def write_trace_sidecar(path: Path, trace: np.ndarray):
    """Binary sidecar: u64-LE count header then count f64-LE best-so-far values."""
    payload = struct.pack("<Q", trace.size) + trace.astype("<f8").tobytes()
    path.write_bytes(payload)


def read_trace_sidecar(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    (count,) = struct.unpack_from("<Q", raw, 0)
    return np.frombuffer(raw, dtype="<f8", count=count, offset=8)


def _log_positions(budgets: Sequence[int]) -> np.ndarray:
    logs = np.log10(np.asarray(budgets, dtype=float))
    lo, hi = logs.min(), logs.max()
    span = hi - lo if hi > lo else 1.0
    return (logs - lo) / span


def line_chart_svg(
    title: str,
    budgets: Sequence[int],
    series: Sequence[tuple[str, dict[int, float]]],
    header_lines: Sequence[str],
    ylabel: str = "mean loss",
) -> str:
    """A log-x line chart; `series` maps budgets to y values per algorithm."""
    width, height = 880, 540
    ml, mr, mt, mb = 70, 300, 50, 60
    pw, ph = width - ml - mr, height - mt - mb
    budgets = sorted(budgets)
    xs = ml + _log_positions(budgets) * pw

    ymax = 0.0
    for _, vals in series:
        if vals:
            ymax = max(ymax, max(vals.values()))
    if ymax <= 0:
        ymax = 1.0

    def ypix(v: float) -> float:
        return mt + ph * (1.0 - v / ymax)

    parts = ['<?xml version="1.0" encoding="UTF-8"?>\n']
    parts.append("<!--\n" + "".join(f"  {escape(line)}\n" for line in header_lines) + "-->\n")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">\n'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>\n')
    parts.append(f'<text x="{ml}" y="24" font-size="16">{escape(title)}</text>\n')
    # axes
    parts.append(
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="#333"/>\n'
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="#333"/>\n'
    )
    for b, x in zip(budgets, xs):
        parts.append(
            f'<line x1="{x:.1f}" y1="{mt + ph}" x2="{x:.1f}" y2="{mt + ph + 4}" stroke="#333"/>\n'
            f'<text x="{x:.1f}" y="{mt + ph + 18}" text-anchor="middle">{b}</text>\n'
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = ypix(frac * ymax)
        parts.append(
            f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="#333"/>\n'
            f'<text x="{ml - 8}" y="{y + 4:.1f}" text-anchor="end">{format_mean(frac * ymax)}</text>\n'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.1f}" y="{height - 14}" text-anchor="middle">budget (log scale)</text>\n'
    )
    parts.append(
        f'<text x="18" y="{mt + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {mt + ph / 2:.1f})">{escape(ylabel)}</text>\n'
    )
    # series
    for idx, (label, vals) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = [
            f"{x:.1f},{ypix(vals[b]):.1f}" for b, x in zip(budgets, xs) if b in vals
        ]
        if pts:
            parts.append(
                f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" stroke-width="1.5"/>\n'
            )
        ly = mt + 16 * idx
        parts.append(
            f'<line x1="{ml + pw + 10}" y1="{ly + 4}" x2="{ml + pw + 30}" y2="{ly + 4}" '
            f'stroke="{color}" stroke-width="3"/>\n'
            f'<text x="{ml + pw + 36}" y="{ly + 8}">{escape(label)}</text>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts)


def _per_problem_series(records: Sequence[RunRecord]):
    means = mean_losses(records)
    problems = sorted({p for _, p, _ in means})
    algos = sorted({a for a, _, _ in means})
    for problem in problems:
        budgets = sorted({b for a, p, b in means if p == problem})
        series = []
        for algo in algos:
            vals = {b: means[(algo, problem, b)] for b in budgets if (algo, problem, b) in means}
            if vals:
                series.append((series_label(algo, vals), vals))
        yield problem, budgets, series


def _normalized_series(records: Sequence[RunRecord]):
    """Per (problem, budget) min-max normalize mean losses across algorithms,
    then average over problems."""
    means = mean_losses(records)
    algos = sorted({a for a, _, _ in means})
    cells = sorted({(p, b) for _, p, b in means})
    acc: dict[str, dict[int, list[float]]] = {a: {} for a in algos}
    for p, b in cells:
        present = [a for a in algos if (a, p, b) in means]
        vals = np.array([means[(a, p, b)] for a in present])
        lo, hi = vals.min(), vals.max()
        norm = (vals - lo) / (hi - lo) if hi > lo else np.zeros_like(vals)
        for a, v in zip(present, norm):
            acc[a].setdefault(b, []).append(float(v))
    budgets = sorted({b for _, b in cells})
    series = []
    for algo in algos:
        vals = {b: float(np.mean(acc[algo][b])) for b in sorted(acc[algo])}
        if vals:
            series.append((series_label(algo, vals), vals))
    return budgets, series


def emit_report(
    records: Sequence[RunRecord],
    table: Optional[ScoreTable],
    out_dir,
    header_lines: Sequence[str],
    save_traces: bool = False,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    results_path = out_dir / "results.csv"
    write_results_csv(results_path, records, header_lines)
    written.append(results_path)

    if table is not None:
        scores_path = out_dir / "scores.csv"
        write_scores_csv(scores_path, table, header_lines)
        written.append(scores_path)

    if save_traces:
        tdir = out_dir / "traces"
        tdir.mkdir(exist_ok=True)
        for i, rec in enumerate(records):
            if rec.trace is not None:
                tpath = tdir / f"{i:06d}.trace"
                write_trace_sidecar(tpath, rec.trace)
                written.append(tpath)

    for problem, budgets, series in _per_problem_series(records):
        svg = line_chart_svg(f"{problem}: mean best loss vs budget", budgets, series, header_lines)
        path = out_dir / f"problem-{problem}.svg"
        path.write_text(svg)
        written.append(path)

    budgets, series = _normalized_series(records)
    if budgets:
        svg = line_chart_svg(
            "all problems: normalized mean loss vs budget",
            budgets,
            series,
            header_lines,
            ylabel="normalized mean loss",
        )
        path = out_dir / "normalized.svg"
        path.write_text(svg)
        written.append(path)
    return written
