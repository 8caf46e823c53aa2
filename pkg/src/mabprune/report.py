"""Rank and t-test tables from a score matrix, as CSV and markdown."""

import csv
from pathlib import Path

from .stats import compare_to_baseline, mean_ranks, mean_scores

DEFAULT_BASELINES = ("unpruned", "ccp")


def present_baselines(matrix, wanted=DEFAULT_BASELINES):
    have = {m.lower() for m in matrix.methods}
    return [b for b in wanted if b.lower() in have]


def _md_table(header, rows):
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines)


def ttest_rows(matrix, baseline, baselines):
    """Rows of ``(method, mean, improvement %, t, p)`` or a reason string."""
    others = [b for b in baselines if b.lower() != baseline.lower()]
    out = []
    for method, res in compare_to_baseline(matrix, baseline, exclude=others):
        if isinstance(res, str):
            mean = float(matrix.column(method).mean())
            out.append((method, mean, res, res, res))
        else:
            out.append((method, res.mean_b, res.mean_improvement_pct, res.t_statistic, res.p_value))
    return out


def _fmt(v, digits=4):
    return v if isinstance(v, str) else f"{v:.{digits}f}"


def render_markdown(matrix, baselines):
    per_method, _ = mean_scores(matrix)
    parts = ["## Performance scores", ""]
    header = ["Dataset"] + list(matrix.methods)
    rows = [[d] + [f"{v:.3f}" for v in row] for d, row in zip(matrix.datasets, matrix.scores)]
    rows.append(["Mean score"] + [f"{per_method[m]:.4f}" for m in matrix.methods])
    parts += [_md_table(header, rows), "", "## Mean ranks", ""]
    parts += [_md_table(["Method", "Mean rank"], [(m, f"{r:.1f}") for m, r in mean_ranks(matrix)]), ""]
    for b in baselines:
        rows = [
            (m, _fmt(mean), imp if isinstance(imp, str) else f"{imp:.2f}%", _fmt(t), _fmt(p))
            for m, mean, imp, t, p in ttest_rows(matrix, b, baselines)
        ]
        parts += [f"## Paired t-tests against {b}", ""]
        parts += [_md_table(["Method", "Mean score", "Improvement (%)", "T-statistic", "P-value"], rows), ""]
    return "\n".join(parts)


def _num(v):
    return v if isinstance(v, str) else repr(float(v))


def write_report(matrix, out_dir, baselines=None):
    """Write scores.csv, ranks.csv, ttest_<baseline>.csv and report.md; returns the markdown."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if baselines is None:
        baselines = present_baselines(matrix)
    matrix.write_csv(out / "scores.csv")
    with (out / "ranks.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "mean_rank"])
        for m, r in mean_ranks(matrix):
            w.writerow([m, repr(r)])
    for b in baselines:
        with (out / f"ttest_{b.lower()}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "mean_score", "improvement_pct", "t_statistic", "p_value"])
            for row in ttest_rows(matrix, b, baselines):
                w.writerow([row[0]] + [_num(v) for v in row[1:]])
    md = render_markdown(matrix, baselines)
    (out / "report.md").write_text(md + "\n", encoding="utf-8")
    return md
