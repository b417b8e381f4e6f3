"""Render success-rate curves and a summary table from noisybench CSV files.

Input is the results.csv / summary.csv pair written by the benchmark runner.
One figure is produced per problem, with one panel per algorithm ((1+1)-EA
left, RMHC right) and one series per stopping rule: first-hitting-time solid,
fixed-budget dashed. When the two rules' peak rates differ by a wide margin
(the win/loss problem), the dashed series moves to a second y-axis on the
right so its shape stays readable.

Plotted y-values are the CSV success_rate values exactly; axes display them
as percentages via tick formatting only. Rendering never modifies its inputs
and identical inputs produce identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.ticker import PercentFormatter

RESULTS_COLUMNS = [
    "problem", "algorithm", "rule", "r", "trials", "successes",
    "success_rate", "ci_low", "ci_high", "mean_evals_used", "mean_first_hit_evals",
]
SUMMARY_COLUMNS = ["problem", "algorithm", "rule", "best_rate", "best_r"]

RULE_STYLES = {"fht": "-", "fixed-budget": "--"}
RULE_COLORS = {"fht": "tab:blue", "fixed-budget": "tab:red"}
RULE_LABELS = {"fht": "first hitting time", "fixed-budget": "fixed budget"}
ALGORITHM_PANEL_ORDER = ["opo-ea", "rmhc"]
ALGORITHM_LABELS = {"opo-ea": "(1+1)-EA", "rmhc": "RMHC"}
PROBLEM_LABELS = {"onemax": "Noisy OneMax", "pmax": "Noisy PMax"}

# Split the dashed series onto a right-hand axis when the solid series' peak
# is at least this many times larger.
DUAL_AXIS_RATIO = 4.0

# Deterministic SVG ids so identical inputs give identical files.
plt.rcParams["svg.hashsalt"] = "noisybench-figures"


class SchemaError(ValueError):
    """The input CSV does not match the expected column schema."""


def _read_csv(path: str | Path, required: list[str]) -> list[dict[str, str]]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(f"{path}: missing column '{column}'")
        return list(reader)


def load_results(path: str | Path) -> list[dict]:
    """Rows of a results.csv with numeric fields converted."""
    rows = []
    for record in _read_csv(path, RESULTS_COLUMNS):
        rows.append({
            "problem": record["problem"],
            "algorithm": record["algorithm"],
            "rule": record["rule"],
            "r": int(record["r"]),
            "success_rate": float(record["success_rate"]),
            "ci_low": float(record["ci_low"]),
            "ci_high": float(record["ci_high"]),
        })
    return rows


def load_summary(path: str | Path) -> list[dict[str, str]]:
    """Rows of a summary.csv, values kept verbatim."""
    return _read_csv(path, SUMMARY_COLUMNS)


def _ordered_unique(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _panel_algorithms(rows) -> list[str]:
    present = _ordered_unique(row["algorithm"] for row in rows)
    ordered = [a for a in ALGORITHM_PANEL_ORDER if a in present]
    return ordered + [a for a in present if a not in ordered]


def _series(rows, algorithm, rule):
    points = sorted(
        (row for row in rows if row["algorithm"] == algorithm and row["rule"] == rule),
        key=lambda row: row["r"],
    )
    return (
        [row["r"] for row in points],
        [row["success_rate"] for row in points],
        [row["ci_low"] for row in points],
        [row["ci_high"] for row in points],
    )


def build_problem_figure(rows, problem: str, ci: bool = False):
    """Figure for one problem: a panel per algorithm, a series per rule."""
    problem_rows = [row for row in rows if row["problem"] == problem]
    algorithms = _panel_algorithms(problem_rows)
    rules = _ordered_unique(row["rule"] for row in problem_rows)

    fig, axes = plt.subplots(
        1, len(algorithms), figsize=(5.5 * len(algorithms), 4.2), squeeze=False
    )
    for ax, algorithm in zip(axes[0], algorithms):
        peaks = {}
        for rule in rules:
            _, rates, _, _ = _series(problem_rows, algorithm, rule)
            peaks[rule] = max(rates, default=0.0)
        use_dual = (
            "fht" in peaks
            and "fixed-budget" in peaks
            and peaks["fht"] >= DUAL_AXIS_RATIO * peaks["fixed-budget"]
            and peaks["fht"] > 0
        )
        right = ax.twinx() if use_dual else None

        handles = []
        for rule in rules:
            rs, rates, lows, highs = _series(problem_rows, algorithm, rule)
            if not rs:
                continue
            target = right if (use_dual and rule == "fixed-budget") else ax
            (line,) = target.plot(
                rs, rates,
                linestyle=RULE_STYLES.get(rule, "-"),
                color=RULE_COLORS.get(rule),
                marker="o",
                markersize=3,
                linewidth=1.5,
                label=RULE_LABELS.get(rule, rule),
            )
            handles.append(line)
            if ci:
                target.fill_between(
                    rs, lows, highs, color=RULE_COLORS.get(rule), alpha=0.15, linewidth=0
                )

        ax.set_title(ALGORITHM_LABELS.get(algorithm, algorithm))
        ax.set_xlabel("resampling rate")
        ax.set_ylabel("optimal solution found (% of trials)")
        ax.yaxis.set_major_formatter(PercentFormatter(xmax=1.0))
        if right is not None:
            right.set_ylabel("optimal solution found, fixed budget (% of trials)")
            right.yaxis.set_major_formatter(PercentFormatter(xmax=1.0))
        ax.grid(alpha=0.3)
        if handles:
            ax.legend(handles=handles, labels=[h.get_label() for h in handles],
                      loc="best", fontsize=9)

    fig.suptitle(PROBLEM_LABELS.get(problem, problem))
    fig.tight_layout()
    return fig


def summary_markdown(summary_rows: list[dict[str, str]]) -> str:
    """Markdown table of best rates: problems as rows, algorithm x rule as
    columns; cell values are the summary.csv strings verbatim."""
    problems = _ordered_unique(row["problem"] for row in summary_rows)
    combos = _ordered_unique((row["algorithm"], row["rule"]) for row in summary_rows)
    by_key = {
        (row["problem"], row["algorithm"], row["rule"]): row for row in summary_rows
    }

    header = ["Problem"] + [
        f"{ALGORITHM_LABELS.get(alg, alg)} / {rule}" for alg, rule in combos
    ]
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join(["---"] * len(header)) + " |",
    ]
    for problem in problems:
        cells = [PROBLEM_LABELS.get(problem, problem)]
        for alg, rule in combos:
            row = by_key.get((problem, alg, rule))
            cells.append(f"{row['best_rate']} ({row['best_r']})" if row else "--")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_figures(
    results_csv: str | Path,
    out_dir: str | Path,
    summary_csv: str | Path | None = None,
    ci: bool = False,
) -> list[Path]:
    """Write one figure per problem (png + svg) and, when a summary.csv is
    given, a markdown summary table. Returns the written paths."""
    rows = load_results(results_csv)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    written = []
    for problem in _ordered_unique(row["problem"] for row in rows):
        fig = build_problem_figure(rows, problem, ci=ci)
        png_path = out / f"{problem}.png"
        svg_path = out / f"{problem}.svg"
        fig.savefig(png_path, dpi=150)
        fig.savefig(svg_path, metadata={"Date": None})
        plt.close(fig)
        written += [png_path, svg_path]

    if summary_csv is not None:
        table_path = out / "summary_table.md"
        table_path.write_text(summary_markdown(load_summary(summary_csv)))
        written.append(table_path)
    return written
