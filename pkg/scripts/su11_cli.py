import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

sys.path.append(str(Path(__file__).parent.parent))

from algebra.fock_operator import FockSpace
from config.settings import (
    FORMATS,
    RunConfig,
    build_run_config,
    parse_cartan,
    parse_float_list,
    parse_range,
    parse_scalar,
)
from errors import ConfigError, SU11Error
from group.su11_group import CartanAngles, cartan_compose
from irrep.irrep_basis import IrrepLabel, export_csv as irrep_csv
from metrics.prometheus_exporter import VerificationMetricsExporter
from reporting.report_generator import ReportGenerator, format_summary, summary_table
from repmat.matrix_elements import export_csv as t_csv
from verify.report import VerificationReport, write_jsonl
from verify.suites import SUITES, SuiteRunner
from weyl.metaplectic_rep import u_of_g

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

SUITE_HELP = """
default grids (override per suite in config/verify-config.yaml):
  addition  labels (1,0) (2,0) (1/2,1/2) (-0.5+1i,0) (-1,0), k in -1..1, 20 random g (alpha <= 1)
  sandwich  labels (1,0) (2,0) (-0.5+1i,0), k in 0..1, 10 entries (l,s) per g, forms a, b, c
  ortho     structural zeros over a label grid with k, m in -2..2; regulated sums at s 0.5, 0.7, 0.9
  genfun    5 exact-rational samples, 35 random, 9 from the orthogonality substitution
  legendre  tau 0..3, alpha 0.25, 0.5, 1, 2
  unity     tau 0..3, alpha 0, 0.3, 1, 2
  algebra   C_kn recurrences (tau -1..2 in halves, k -4..4, n <= 10), ladder, D constructions,
            edge weights, Lie algebra, real structure, finite t-blocks, Chu-Vandermonde
  weyl      quadrature oracle (alpha 0.3, 1, 2), unitarity, 100 homomorphism pairs,
            intertwining, Hermite scaling
"""


def _label(args) -> IrrepLabel:
    return IrrepLabel(parse_scalar(args.tau), parse_scalar(args.eps))


def _angles(args) -> CartanAngles:
    if args.g and args.g != 'random':
        return CartanAngles(*parse_cartan(args.g))
    return CartanAngles(0.0, args.alpha if args.alpha is not None else 0.0, 0.0)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, 'w') as f:
            f.write(text)
        logger.info(f"Table written to {out}")
    else:
        sys.stdout.write(text)


def cmd_table(args, config: RunConfig) -> int:
    """Write U_mn(g), a t_kn block, f_k values or D_k diagonals as CSV"""
    if args.kind == 'u':
        if args.alpha is None and not args.g:
            raise ConfigError("table u needs --alpha or --g phi,alpha,psi")
        block = u_of_g(cartan_compose(_angles(args)), FockSpace(config.dim))
        _emit(block.to_json() + "\n" if config.format == 'json' else block.to_csv(), config.out)
        return EXIT_OK

    if args.tau is None:
        raise ConfigError(f"table {args.kind} needs --tau")
    label = _label(args)
    if args.kind == 't':
        ks = parse_range(args.krange or '-3:3')
        _emit(t_csv(label, ks, _angles(args), config.verifier.get('phase_convention', 'asymmetric')), config.out)
    elif args.kind == 'f':
        ks = parse_range(args.k if args.k is not None else '0')
        space = FockSpace(max(2, args.zeta_max + 1))
        _emit(irrep_csv(label, ks, space, 'f', config.verifier.get('f_convention', 'series')), config.out)
    else:
        ks = parse_range(args.k if args.k is not None else '0')
        _emit(irrep_csv(label, ks, FockSpace(config.dim), 'd', config.verifier.get('f_convention', 'series')),
              config.out)
    return EXIT_OK


def grid_overrides(args) -> Dict[str, Dict]:
    """Suite-specific flags as grid entries for the selected suite"""
    grid: Dict = {}
    if args.suite in ('legendre', 'unity'):
        if args.tau is not None:
            grid['tau'] = parse_range(args.tau)
        if args.alpha_list:
            grid['alpha'] = parse_float_list(args.alpha_list)
    elif args.suite in ('addition', 'sandwich', 'ortho'):
        if args.tau is not None:
            grid['labels'] = [(parse_scalar(args.tau), parse_scalar(args.eps))]
        if args.k is not None:
            grid['k'] = parse_range(args.k)
        if args.count is not None:
            grid['count'] = args.count
        if args.g:
            grid['g'] = 'random' if args.g == 'random' else [parse_cartan(args.g)]
    elif args.suite == 'weyl':
        if args.alpha_list:
            grid['oracle_alpha'] = grid['unitarity_alpha'] = parse_float_list(args.alpha_list)
        if args.count is not None:
            grid['pairs'] = grid['intertwining_count'] = args.count
    elif args.suite == 'genfun' and args.count is not None:
        grid['count'] = args.count
    return {args.suite: grid} if grid else {}


def cmd_verify(args, config: RunConfig) -> int:
    runner = SuiteRunner(config.runner_config())
    reports: List[VerificationReport] = runner.run(args.suite)

    if config.format == 'json':
        if config.out:
            count = write_jsonl(reports, config.out)
            logger.info(f"{count} reports written to {config.out}")
        else:
            for report in reports:
                sys.stdout.write(report.to_json() + "\n")
    else:
        if config.out:
            write_jsonl(reports, config.out)
            logger.info(f"{len(reports)} reports written to {config.out}")
        sys.stdout.write(format_summary(summary_table(reports), config.format) + "\n")

    run_info = {'suite': args.suite, 'dim': config.dim, 'seed': config.seed}
    generator = ReportGenerator()
    if args.markdown:
        Path(args.markdown).write_text(generator.generate_markdown(reports, run_info))
        logger.info(f"Markdown summary written to {args.markdown}")
    if args.html:
        Path(args.html).write_text(generator.generate_html(reports, run_info))
        logger.info(f"HTML summary written to {args.html}")
    if args.durations:
        Path(args.durations).write_text(json.dumps(runner.durations, sort_keys=True, indent=2))

    if config.pushgateway:
        try:
            VerificationMetricsExporter(config.pushgateway).export_reports(reports, runner.durations)
        except Exception as e:
            logger.error(f"Metrics push failed: {e}")

    failed = [r for r in reports if not r.passed]
    if runner.skipped:
        logger.info(f"{runner.skipped} grid points skipped at gamma poles")
    if failed:
        logger.error(f"{len(failed)} of {len(reports)} checks failed")
        return EXIT_FAILED
    logger.info(f"All {len(reports)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML configuration (default config/verify-config.yaml)')
    common.add_argument('--dim', type=int, help='Fock space truncation N')
    common.add_argument('--tol', type=float, help='Residual tolerance')
    common.add_argument('--format', choices=FORMATS, help='Output format')
    common.add_argument('--seed', type=int, help='Seed for random group elements')
    common.add_argument('--out', help='Output file (stdout when omitted)')
    common.add_argument('--log-level', help='Logging level')
    common.add_argument('--pushgateway', help='Prometheus Pushgateway URL')
    common.add_argument('--tau', help="tau as RE+IMi, or a range '0..3' for legendre/unity")
    common.add_argument('--eps', default='0', help='epsilon, 0 or 1/2')
    common.add_argument('--k', help="k or a range '-2..2'")
    common.add_argument('--g', help="'random' or Cartan angles phi,alpha,psi")
    common.add_argument('--count', type=int, help='Number of random group elements')

    parser = argparse.ArgumentParser(description='SU(1,1) representation tables and identity verification')
    sub = parser.add_subparsers(dest='command', required=True)

    table = sub.add_parser('table', parents=[common], help='Emit U, t, f or D tables')
    table.add_argument('kind', choices=['u', 't', 'f', 'd'])
    table.add_argument('--alpha', type=float, help='Boost rapidity alpha')
    table.add_argument('--krange', help="k range for t blocks, '-3:3'")
    table.add_argument('--zeta-max', type=int, default=8, help='Largest zeta for f tables')

    verify = sub.add_parser('verify', parents=[common], help='Run a verification suite',
                            epilog=SUITE_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    verify.add_argument('suite', choices=SUITES + ('all',))
    verify.add_argument('--alpha', dest='alpha_list', help="Comma separated alphas, '0.25,0.5,1'")
    verify.add_argument('--markdown', help='Write a Markdown summary here')
    verify.add_argument('--html', help='Write an HTML summary here')
    verify.add_argument('--durations', help='Write suite timings (JSON) here')
    return parser


VALUE_FLAGS = ('--tau', '--eps', '--k', '--krange', '--g', '--alpha')


def attach_negative_values(argv: List[str]) -> List[str]:
    """'--krange -3:3' becomes '--krange=-3:3' so argparse does not read the value as a flag"""
    joined, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith('-') \
                and not argv[i + 1].startswith('--'):
            joined.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        joined.append(token)
        i += 1
    return joined


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    flags = {'dim': args.dim, 'tolerance': args.tol, 'format': args.format, 'seed': args.seed,
             'out': args.out, 'log_level': args.log_level, 'pushgateway': args.pushgateway}
    if args.command == 'table' and args.format is None:
        flags['format'] = 'csv'
    try:
        overrides = grid_overrides(args) if args.command == 'verify' else {}
        config = build_run_config(args.config, flags, overrides)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    logging.getLogger().setLevel(config.log_level)

    try:
        if args.command == 'table':
            return cmd_table(args, config)
        return cmd_verify(args, config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except SU11Error as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
