import argparse
import json
from pathlib import Path
import sys

sys.path.append(str(Path(__file__).parent.parent))

from metrics.prometheus_exporter import VerificationMetricsExporter
from verify.report import read_jsonl


def main():
    parser = argparse.ArgumentParser(description='Push verification metrics to Prometheus')
    parser.add_argument('--report', required=True, help='JSON-lines verification report')
    parser.add_argument('--pushgateway', required=True, help='Prometheus Pushgateway URL')
    parser.add_argument('--durations', help='JSON file mapping suite name to seconds')

    args = parser.parse_args()

    reports = read_jsonl(args.report)

    durations = None
    if args.durations:
        with open(args.durations, 'r') as f:
            durations = json.load(f)

    exporter = VerificationMetricsExporter(args.pushgateway)
    exporter.export_reports(reports, durations)

    print(f"Metrics for {len(reports)} checks pushed to Prometheus")


if __name__ == '__main__':
    main()
