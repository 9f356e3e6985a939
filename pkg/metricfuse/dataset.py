""" Line-delimited JSON records on disk """
import io
import json
import logging
import os
import stat
import tempfile
from collections import OrderedDict

import six

from .models import SegmentRecord

LOG = logging.getLogger(__name__)

REQUIRED_FIELDS = ('lang_pair', 'system_id', 'segment_id')


class DatasetError(ValueError):

    """
    Raised for a malformed data line

    Attributes
    ----------
    lineno : int or None
        1-based line number of the offending line

    """

    def __init__(self, reason, lineno=None, path=None):
        message = reason
        location = ''
        if path is not None:
            location = '%s:' % path
        if lineno is not None:
            location += '%d:' % lineno
        if location:
            message = '%s %s' % (location, message)
        super(DatasetError, self).__init__(message)
        self.reason = reason
        self.lineno = lineno
        self.path = path


def _output_mode(path):
    """ Mode of the file being replaced, or what open() would create """
    try:
        return stat.S_IMODE(os.stat(path).st_mode)
    except OSError:
        umask = os.umask(0)
        os.umask(umask)
        return 0o666 & ~umask


def atomic_write(path, text):
    """ Write text to a temporary file next to ``path`` and rename it """
    directory = os.path.dirname(os.path.abspath(path))
    handle, tmp_path = tempfile.mkstemp(prefix='.metricfuse-', dir=directory)
    try:
        with io.open(handle, 'w', encoding='utf-8') as ofile:
            ofile.write(text)
        # mkstemp creates 0600
        os.chmod(tmp_path, _output_mode(path))
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def parse_record(data, lineno=None, flip_gold=False):
    """
    Build a :class:`~metricfuse.models.SegmentRecord` from a decoded line

    Unknown fields are ignored. Metric scores are read from ``scores``.

    Parameters
    ----------
    data : dict
    lineno : int, optional
        Line number used in error messages
    flip_gold : bool, optional
        Negate ``human_score`` (for data where lower means better)

    """
    if not isinstance(data, dict):
        raise DatasetError("expected a JSON object, got %s" %
                           type(data).__name__, lineno)
    for name in REQUIRED_FIELDS:
        if data.get(name) is None:
            raise DatasetError("missing required field '%s'" % name, lineno)
    kwargs = dict((key, val) for key, val in six.iteritems(data)
                  if key in SegmentRecord.meta_.fields)
    scores = data.get('scores')
    if scores is not None and not isinstance(scores, dict):
        raise DatasetError("'scores' must be an object", lineno)
    kwargs['raw_scores'] = scores or {}
    if flip_gold and kwargs.get('human_score') is not None:
        human_score = kwargs['human_score']
        if isinstance(human_score, bool) or not isinstance(
                human_score, six.integer_types + (float,)):
            raise DatasetError("human_score must be a number", lineno)
        kwargs['human_score'] = -human_score
    try:
        return SegmentRecord(**kwargs)
    except (TypeError, ValueError) as e:
        raise DatasetError(str(e) or 'invalid record', lineno)


def iter_lines(path):
    """ Yield (lineno, decoded object) for each non-blank line """
    with io.open(path, 'r', encoding='utf-8') as ifile:
        for lineno, line in enumerate(ifile, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except ValueError as e:
                raise DatasetError("invalid JSON: %s" % e, lineno, path)


def read_records(path, flip_gold=False):
    """
    Read a line-delimited dataset

    Returns
    -------
    records : list
        :class:`~metricfuse.models.SegmentRecord` in file order

    Raises
    ------
    exc : :class:`.DatasetError`
        On the first malformed line, or a duplicate segment key

    """
    records = []
    seen = {}
    for lineno, data in iter_lines(path):
        try:
            record = parse_record(data, lineno, flip_gold)
        except DatasetError as e:
            raise DatasetError(e.reason, lineno, path)
        if record.key_ in seen:
            raise DatasetError("duplicate segment %s (first on line %d)" %
                               ('/'.join(record.key_), seen[record.key_]),
                               lineno, path)
        seen[record.key_] = lineno
        records.append(record)
    LOG.info("Read %d records from %s", len(records), path)
    return records


def dump_lines(rows):
    """ Serialize dicts as sorted-key JSON lines """
    return ''.join(json.dumps(row, sort_keys=True) + '\n' for row in rows)


def write_records(path, records):
    """ Write records in the dataset format """
    rows = []
    for record in records:
        row = record.dump_()
        row['scores'] = row.pop('raw_scores')
        rows.append(row)
    atomic_write(path, dump_lines(rows))


def write_scored(path, scored):
    """ Write :class:`~metricfuse.scoring.ScoredSegment` lines """
    atomic_write(path, dump_lines(segment.dump() for segment in scored))


def read_scored(path):
    """
    Read the output of the ``score`` command

    Skip entries (records lenient scoring could not score) are dropped with
    a warning.

    Returns
    -------
    scores : :class:`~collections.OrderedDict`
        Segment key to composite score

    """
    scores = OrderedDict()
    for lineno, data in iter_lines(path):
        if not isinstance(data, dict):
            raise DatasetError("expected a JSON object", lineno, path)
        try:
            key = tuple(six.text_type(data[name]) for name in REQUIRED_FIELDS)
        except KeyError as e:
            raise DatasetError("missing required field %s" % e, lineno, path)
        value = data.get('composite_score')
        if value is None:
            LOG.warning("Line %d of %s was not scored; ignoring it", lineno,
                        path)
            continue
        if isinstance(value, bool) or not isinstance(
                value, six.integer_types + (float,)):
            raise DatasetError("composite_score must be a number", lineno,
                               path)
        if key in scores:
            raise DatasetError("duplicate segment %s" % '/'.join(key),
                               lineno, path)
        scores[key] = float(value)
    return scores
