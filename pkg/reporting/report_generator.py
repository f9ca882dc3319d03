import math
from typing import Dict, Iterable, List

import pandas as pd
import plotly.graph_objects as go
import plotly.io as pio
from jinja2 import Template

from verify.report import VerificationReport

SUMMARY_COLUMNS = ['identity', 'passed', 'failed', 'max_residual']


def summary_table(reports: Iterable[VerificationReport]) -> pd.DataFrame:
    """One row per identity: number passed, number failed, largest finite residual"""
    rows = [{'identity': r.identity_id, 'passed': r.passed, 'residual': r.residual} for r in reports]
    if not rows:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    df = pd.DataFrame(rows)
    grouped = df.groupby('identity', sort=True)
    summary = pd.DataFrame({
        'passed': grouped['passed'].sum().astype(int),
        'failed': grouped['passed'].apply(lambda s: int((~s).sum())),
        # NaN residuals mark checks that could not be built; they count as failures above
        'max_residual': grouped['residual'].max(),
    }).reset_index()
    return summary[SUMMARY_COLUMNS]


def format_summary(summary: pd.DataFrame, fmt: str = 'text') -> str:
    if fmt == 'csv':
        return summary.to_csv(index=False)
    if fmt == 'json':
        return summary.to_json(orient='records')
    return summary.to_string(index=False, float_format=lambda v: f"{v:.3e}")


class ReportGenerator:
    """Generate verification summaries in Markdown and HTML"""

    def __init__(self):
        self.html_template = self._load_html_template()
        self.markdown_template = self._load_markdown_template()

    def generate_html(self, reports: List[VerificationReport], run_info: Dict) -> str:
        """Generate HTML summary with a residual chart"""
        summary = summary_table(reports)
        template = Template(self.html_template)
        return template.render(
            run_info=run_info,
            totals=self._totals(summary),
            residual_chart=self._create_residual_chart(summary),
            summary_table=summary.to_html(index=False, float_format=lambda v: f"{v:.3e}"),
            failures=self._failures(reports),
        )

    def generate_markdown(self, reports: List[VerificationReport], run_info: Dict) -> str:
        summary = summary_table(reports)
        template = Template(self.markdown_template)
        return template.render(
            run_info=run_info,
            totals=self._totals(summary),
            rows=summary.to_dict(orient='records'),
            failures=self._failures(reports),
        )

    @staticmethod
    def _totals(summary: pd.DataFrame) -> Dict[str, int]:
        return {'passed': int(summary['passed'].sum()), 'failed': int(summary['failed'].sum())}

    @staticmethod
    def _failures(reports: List[VerificationReport], limit: int = 20) -> List[Dict]:
        failed = [r for r in reports if not r.passed][:limit]
        return [{'identity': r.identity_id, 'residual': r.residual, 'tolerance': r.tolerance,
                 'message': r.message or ''} for r in failed]

    def _create_residual_chart(self, summary: pd.DataFrame) -> str:
        """log10 of the largest residual per identity"""
        floor = 1e-17
        values = [math.log10(max(v, floor)) if math.isfinite(v) else 0.0 for v in summary['max_residual']]
        colors = ['#dc3545' if f else '#28a745' for f in summary['failed']]
        fig = go.Figure(data=[go.Bar(x=list(summary['identity']), y=values, marker_color=colors)])
        fig.update_layout(
            title='Largest residual per identity',
            xaxis_title='Identity',
            yaxis_title='log10 residual',
            showlegend=False
        )
        return pio.to_html(fig, include_plotlyjs='cdn', full_html=False, div_id="residual-chart")

    def _load_html_template(self) -> str:
        return '''
<!DOCTYPE html>
<html>
<head>
    <title>SU(1,1) Verification Report</title>
    <style>
        body { font-family: Arial, sans-serif; margin: 20px; }
        h1 { color: #333; }
        .summary { background: #f8f9fa; padding: 15px; border-radius: 5px; margin: 20px 0; }
        .failed { color: #dc3545; font-weight: bold; }
        table { width: 100%; border-collapse: collapse; margin: 20px 0; }
        th, td { padding: 10px; text-align: left; border: 1px solid #ddd; }
        th { background: #f8f9fa; }
    </style>
</head>
<body>
    <h1>SU(1,1) Verification Report</h1>

    <div class="summary">
        <h2>Summary</h2>
        <p><strong>Suite:</strong> {{ run_info.suite }}</p>
        <p><strong>Truncation N:</strong> {{ run_info.dim }}</p>
        <p><strong>Seed:</strong> {{ run_info.seed }}</p>
        <p><strong>Passed:</strong> {{ totals.passed }}</p>
        <p {% if totals.failed %}class="failed"{% endif %}><strong>Failed:</strong> {{ totals.failed }}</p>
    </div>

    <div id="residual-chart">
        {{ residual_chart|safe }}
    </div>

    <h2>Identities</h2>
    {{ summary_table|safe }}

    {% if failures %}
    <h2>Failures</h2>
    <ul>
    {% for f in failures %}
        <li><strong>{{ f.identity }}</strong>: residual {{ f.residual }} (tolerance {{ f.tolerance }}) {{ f.message }}</li>
    {% endfor %}
    </ul>
    {% endif %}
</body>
</html>
        '''

    def _load_markdown_template(self) -> str:
        return '''
# SU(1,1) Verification Report

## Run
- **Suite:** {{ run_info.suite }}
- **Truncation N:** {{ run_info.dim }}
- **Seed:** {{ run_info.seed }}

## Summary
**Passed:** {{ totals.passed }}, **Failed:** {{ totals.failed }}

| identity | passed | failed | max residual |
|----------|--------|--------|--------------|
{% for row in rows -%}
| {{ row.identity }} | {{ row.passed }} | {{ row.failed }} | {{ '%.3e' % row.max_residual }} |
{% endfor %}
{% if failures %}
## Failures
{% for f in failures -%}
- **{{ f.identity }}**: residual {{ f.residual }} (tolerance {{ f.tolerance }}) {{ f.message }}
{% endfor %}
{% endif %}
        '''
