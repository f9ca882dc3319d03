from prometheus_client import Counter, Gauge, Histogram, push_to_gateway, CollectorRegistry
from typing import Dict, Iterable, Optional
import math
import logging

from verify.report import VerificationReport

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class VerificationMetricsExporter:
    """Export identity verification metrics to Prometheus"""

    def __init__(self, pushgateway_url: Optional[str] = None, job: str = 'su11_verify'):
        self.pushgateway_url = pushgateway_url
        self.job = job
        self.registry = CollectorRegistry()

        self.checks_total = Counter(
            'su11_checks_total',
            'Number of identity checks run',
            ['identity', 'status'],
            registry=self.registry
        )

        self.max_residual = Gauge(
            'su11_max_residual',
            'Largest residual seen per identity',
            ['identity'],
            registry=self.registry
        )

        self.tail_estimate = Gauge(
            'su11_tail_estimate',
            'Largest tail estimate of a truncated series per identity',
            ['identity'],
            registry=self.registry
        )

        self.suite_duration = Histogram(
            'su11_suite_duration_seconds',
            'Wall time of a verification suite in seconds',
            ['suite'],
            registry=self.registry
        )

    def export_reports(self, reports: Iterable[VerificationReport], durations: Dict[str, float] = None):
        """Record a batch of reports and suite timings, pushing when a gateway is configured"""
        residuals: Dict[str, float] = {}
        tails: Dict[str, float] = {}
        for report in reports:
            identity = report.identity_id
            self.checks_total.labels(identity=identity, status='passed' if report.passed else 'failed').inc()
            # Unbuildable checks carry NaN and only show up in the failed count
            if math.isfinite(report.residual):
                residuals[identity] = max(residuals.get(identity, 0.0), report.residual)
            tails[identity] = max(tails.get(identity, 0.0), float(report.tail_estimate))

        for identity, value in residuals.items():
            self.max_residual.labels(identity=identity).set(value)
        for identity, value in tails.items():
            self.tail_estimate.labels(identity=identity).set(value)

        for suite, seconds in (durations or {}).items():
            self.suite_duration.labels(suite=suite).observe(seconds)

        if self.pushgateway_url:
            self.push_metrics()

        logger.info(f"Metrics recorded for {len(residuals)} identities")

    def push_metrics(self):
        """Push metrics to Prometheus Pushgateway"""
        try:
            push_to_gateway(
                self.pushgateway_url,
                job=self.job,
                registry=self.registry
            )
            logger.info("Metrics pushed to Prometheus Pushgateway")
        except Exception as e:
            logger.error(f"Error pushing metrics: {str(e)}")
            raise
