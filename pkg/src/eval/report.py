"""Side-by-side comparison of evaluation rows."""

from pathlib import Path

from jinja2 import Environment, FileSystemLoader

from src.exceptions import DataError
from src.models.evaluation import ComparisonReport, ComparisonRow, EvalRow

TEMPLATES_DIR = Path(__file__).parent / "templates"

_jinja_env = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    autoescape=False,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render_markdown(report: ComparisonReport) -> str:
    """Render a comparison as a markdown table."""
    template = _jinja_env.get_template("comparison.md.j2")
    return template.render(baseline=report.baseline, rows=report.rows)


def compare(rows: list[EvalRow]) -> ComparisonReport:
    """Compare retrievers against the first row.

    Rows are sorted by label (stable); deltas are row minus baseline for
    recall, average K and latency.

    Raises:
        DataError: If fewer than two rows are given
    """
    if len(rows) < 2:
        raise DataError(f"Comparison needs at least 2 rows, got {len(rows)}")
    baseline = rows[0]
    report = ComparisonReport(
        baseline=baseline.label,
        rows=[
            ComparisonRow(
                row=row,
                delta_recall=row.recall_at_k - baseline.recall_at_k,
                delta_avg_k=row.avg_k - baseline.avg_k,
                delta_latency=row.latency_seconds - baseline.latency_seconds,
            )
            for row in sorted(rows, key=lambda r: r.label)
        ],
    )
    report.markdown = render_markdown(report)
    return report
