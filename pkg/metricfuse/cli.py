""" Command line interface """
from __future__ import print_function

import argparse
import json
import logging
import os
import sys

import six

from . import __version__
from .bayes_opt import BoConfig, DEFAULT_KAPPA
from .calibration import (CalibrationJob, DEFAULT_PRUNE_TOLERANCE,
                          DEFAULT_ZERO_THRESHOLD, ObjectiveUndefined,
                          calibrate, metric_correlations)
from .config import load_config, load_metric_specs, write_config
from .correlation import CorrelationUndefined
from .dataset import (atomic_write, dump_lines, read_records, read_scored,
                      write_scored)
from .evaluation import LEVELS, SEGMENT, evaluate
from .gp import IllConditionedError
from .models import (CALIBRATION, REFERENCE_BASED, REFERENCE_FREE, SCORING,
                     validate_dataset)
from .preprocess import preprocess_matrix
from .scoring import score_batch

LOG = logging.getLogger(__name__)

ENV_LOG = 'METRICFUSE_LOG'
MODE_FLAGS = {
    'ref': REFERENCE_BASED,
    'qe': REFERENCE_FREE,
}
MODE_TITLES = {
    REFERENCE_BASED: 'Reference-based',
    REFERENCE_FREE: 'Reference-free',
}
CHECK = u'✓'
CROSS = u'✗'
MAX_PRINTED_ISSUES = 20

EXIT_OK = 0
EXIT_DATA = 1
EXIT_NUMERIC = 2


class ValidationFailed(ValueError):

    """ Raised when a dataset has issues; the issues are already printed """


def configure_logging(environ=None):
    """ Set up root logging from the METRICFUSE_LOG environment variable """
    environ = os.environ if environ is None else environ
    value = environ.get(ENV_LOG, 'WARNING').strip()
    if value.isdigit():
        level = int(value)
    else:
        level = logging.getLevelName(value.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    return level


def _report_issues(issues):
    for issue in issues[:MAX_PRINTED_ISSUES]:
        print(six.text_type(issue), file=sys.stderr)
    if len(issues) > MAX_PRINTED_ISSUES:
        print('... and %d more' % (len(issues) - MAX_PRINTED_ISSUES),
              file=sys.stderr)
    raise ValidationFailed("%d record(s) failed validation" % len(issues))


def _fmt_bound(value):
    return '%g' % value


def render_config(config, title=None):
    """
    Human-readable table of a composite config

    Weights print with 4 decimals. Zero weights are marked inactive.

    """
    title = title or '%s composite' % MODE_TITLES[config.mode]
    rows = [('Metric', 'clipping', 'normalization', 'inversion', 'weight')]
    for spec, weight in zip(config.specs, config.weights):
        rows.append((
            spec.name,
            '[%s,%s]' % (_fmt_bound(spec.clip_min), _fmt_bound(spec.clip_max)),
            CHECK,
            CHECK if spec.invert else CROSS,
            '%.4f' % weight + ('  inactive' if weight == 0 else ''),
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = [title]
    for row in rows:
        cells = [row[i].ljust(widths[i]) for i in range(4)]
        lines.append('  ' + '  '.join(cells + [row[4]]))
    if config.per_lang:
        lines.append('')
        lines.append('Per-language weights')
        for lang_pair, weights in six.iteritems(config.per_lang):
            lines.append('  %s: %s' % (lang_pair, ', '.join(
                '%s=%.4f' % (name, weight) for name, weight in
                zip(config.metric_names, weights))))
    return '\n'.join(lines)


def render_inspect(config):
    """ The full ``inspect`` output: primary, fallback and provenance """
    sections = [render_config(config)]
    if config.qe_fallback is not None:
        sections.append(render_config(
            config.qe_fallback, 'QE fallback: %s composite' %
            MODE_TITLES[config.qe_fallback.mode]))
    if config.provenance:
        sections.append('Provenance\n' + '\n'.join(
            '  ' + line for line in json.dumps(
                config.provenance, indent=2, sort_keys=True).splitlines()))
    return '\n\n'.join(sections)


def _load_specs(args):
    mode = MODE_FLAGS[args.mode]
    specs = load_metric_specs(args.metrics, mode)
    if not specs:
        raise ValueError("No metrics in %s apply to mode '%s'" %
                         (args.metrics, args.mode))
    return mode, specs


def cmd_calibrate(args):
    """ Calibrate weights and write a config """
    mode, specs = _load_specs(args)
    records = read_records(args.train, flip_gold=args.flip_gold)
    issues = validate_dataset(records, specs, CALIBRATION)
    if issues:
        _report_issues(issues)
    bo = BoConfig(len(specs), init_points=args.init, steps=args.steps,
                  seed=args.seed, kappa=args.kappa)
    job = CalibrationJob(records, specs, mode=mode, bo=bo,
                         per_language=args.per_lang,
                         zero_threshold=args.zero_threshold,
                         prune_tolerance=args.prune_tolerance,
                         workers=args.workers)
    result = calibrate(job)
    config = result.config
    if args.qe_fallback:
        if mode != REFERENCE_BASED:
            raise ValueError("--qe-fallback only applies to --mode ref")
        config = config.replace(qe_fallback=load_config(args.qe_fallback))
    write_config(args.out, config)
    print(result.summary())
    print('wrote %s' % args.out)
    return EXIT_OK


def cmd_score(args):
    """ Score records with a config """
    config = load_config(args.config)
    records = read_records(args.data)
    scored = score_batch(records, config, hybrid=args.hybrid,
                         strict=not args.lenient,
                         display_normalized=args.display_normalized)
    if args.out:
        write_scored(args.out, scored)
    else:
        sys.stdout.write(dump_lines(segment.dump() for segment in scored))
    skipped = sum(1 for segment in scored if segment.skipped)
    if skipped:
        print('%d record(s) skipped' % skipped, file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args):
    """ Correlate scores with gold """
    scores = read_scored(args.scores)
    records = read_records(args.data, flip_gold=args.flip_gold)
    group_by = [args.group_by] if args.group_by else None
    report = evaluate(scores, records, group_by=group_by, level=args.level)
    print(report.render())
    if args.out:
        atomic_write(args.out, json.dumps(report.dump(), indent=2,
                                          sort_keys=True) + '\n')
    return EXIT_OK


def cmd_inspect(args):
    """ Print a config """
    print(render_inspect(load_config(args.config)))
    return EXIT_OK


def cmd_correlate(args):
    """ Print tau-b of each metric against gold and each other """
    _, specs = _load_specs(args)
    records = read_records(args.data, flip_gold=args.flip_gold)
    issues = validate_dataset(records, specs, CALIBRATION)
    if issues:
        _report_issues(issues)
    gold = [record.human_score for record in records]
    report = metric_correlations(preprocess_matrix(records, specs), gold)

    names = [spec.name for spec in specs]
    columns = ['gold'] + names
    width = max(len(name) for name in names)
    cell = max(7, max(len(name) for name in columns))

    def fmt(value):
        return ('n/a' if value is None else '%.4f' % value).rjust(cell)

    print(' ' * width + ''.join('  ' + name.rjust(cell) for name in columns))
    for name in names:
        row = [report['gold'][name]] + [report['between'][name][other]
                                        for other in names]
        print(name.ljust(width) + ''.join('  ' + fmt(v) for v in row))
    return EXIT_OK


def cmd_validate(args):
    """ Check a dataset for calibration or scoring """
    records = read_records(args.data, flip_gold=False)
    fallback_specs = None
    if args.config:
        config = load_config(args.config)
        specs = config.specs
        if args.hybrid and config.qe_fallback is not None:
            fallback_specs = config.qe_fallback.specs
    else:
        _, specs = _load_specs(args)
    issues = validate_dataset(records, specs, args.purpose, fallback_specs)
    if issues:
        _report_issues(issues)
    print('%d record(s) OK' % len(records))
    return EXIT_OK


def _add_seed(parser):
    parser.add_argument('--seed', type=int, default=0,
                        help="Seed of the random stream (default %(default)s)")


def build_parser():
    """ The argument parser of the ``metricfuse`` command """
    parser = argparse.ArgumentParser(
        prog='metricfuse',
        description="Fuse machine-translation metric scores into one "
        "calibrated composite")
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    cal = sub.add_parser('calibrate', help="Calibrate composite weights")
    cal.add_argument('--train', required=True, help="Training records")
    cal.add_argument('--metrics', required=True,
                     help="Metric declaration file")
    cal.add_argument('--mode', choices=sorted(MODE_FLAGS), default='ref')
    cal.add_argument('--steps', type=int, default=100,
                     help="Optimization steps (default %(default)s)")
    cal.add_argument('--init', type=int, default=5,
                     help="Initial random points (default %(default)s)")
    cal.add_argument('--kappa', type=float, default=DEFAULT_KAPPA)
    cal.add_argument('--out', required=True, help="Config file to write")
    cal.add_argument('--per-lang', action='store_true',
                     help="Also calibrate each language pair")
    cal.add_argument('--zero-threshold', type=float,
                     default=DEFAULT_ZERO_THRESHOLD)
    cal.add_argument('--prune-tolerance', type=float,
                     default=DEFAULT_PRUNE_TOLERANCE)
    cal.add_argument('--flip-gold', action='store_true',
                     help="Negate human scores (lower is better data)")
    cal.add_argument('--qe-fallback',
                     help="Reference-free config to attach for hybrid use")
    cal.add_argument('--workers', type=int, default=1)
    _add_seed(cal)
    cal.set_defaults(func=cmd_calibrate)

    score = sub.add_parser('score', help="Score records with a config")
    score.add_argument('--data', required=True)
    score.add_argument('--config', required=True)
    score.add_argument('--out', help="Output file (default stdout)")
    score.add_argument('--hybrid', action='store_true',
                       help="Use the QE fallback for records without a "
                       "reference")
    score.add_argument('--lenient', action='store_true',
                       help="Emit skip records instead of failing")
    score.add_argument('--display-normalized', action='store_true',
                       help="Add display_score = score / sum of weights")
    _add_seed(score)
    score.set_defaults(func=cmd_score)

    ev = sub.add_parser('evaluate', help="Correlate scores with gold")
    ev.add_argument('--scores', required=True)
    ev.add_argument('--data', required=True)
    ev.add_argument('--group-by', choices=['lang', 'domain'])
    ev.add_argument('--level', choices=LEVELS, default=SEGMENT)
    ev.add_argument('--flip-gold', action='store_true')
    ev.add_argument('--out', help="Write the report as JSON")
    _add_seed(ev)
    ev.set_defaults(func=cmd_evaluate)

    ins = sub.add_parser('inspect', help="Print a config")
    ins.add_argument('--config', required=True)
    _add_seed(ins)
    ins.set_defaults(func=cmd_inspect)

    cor = sub.add_parser('correlate', help="Correlations between metrics")
    cor.add_argument('--data', required=True)
    cor.add_argument('--metrics', required=True)
    cor.add_argument('--mode', choices=sorted(MODE_FLAGS), default='ref')
    cor.add_argument('--flip-gold', action='store_true')
    _add_seed(cor)
    cor.set_defaults(func=cmd_correlate)

    val = sub.add_parser('validate', help="Check a dataset")
    val.add_argument('--data', required=True)
    source = val.add_mutually_exclusive_group(required=True)
    source.add_argument('--metrics')
    source.add_argument('--config')
    val.add_argument('--mode', choices=sorted(MODE_FLAGS), default='ref')
    val.add_argument('--for', dest='purpose', default=CALIBRATION,
                     choices=[CALIBRATION, SCORING])
    val.add_argument('--hybrid', action='store_true')
    _add_seed(val)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    """ Run the command line; returns the exit code """
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IllConditionedError, ObjectiveUndefined,
            CorrelationUndefined) as e:
        print('error: %s' % e, file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IOError, OSError) as e:
        print('error: %s' % e, file=sys.stderr)
        return EXIT_DATA
