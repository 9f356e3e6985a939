""" Metric declarations and calibrated configurations as JSON documents """
import io
import json
import logging
import numbers
from collections import OrderedDict

import six

from .dataset import atomic_write
from .models import (CompositeConfig, ConfigError, MODES, MetricSpec,
                     REFERENCE_FREE)

LOG = logging.getLogger(__name__)


class ConfigFileError(ValueError):

    """
    Raised when a config document cannot be parsed

    Attributes
    ----------
    location : str
        Where the problem is, e.g. ``metrics[2].clip`` or ``line 4 column 9``

    """

    def __init__(self, reason, location=None, path=None):
        prefix = ''
        if path is not None:
            prefix = '%s: ' % path
        if location is not None:
            prefix += '%s: ' % location
        super(ConfigFileError, self).__init__(prefix + reason)
        self.reason = reason
        self.location = location
        self.path = path


def _number(value, location):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigFileError("expected a number, got %r" % (value,),
                              location)
    return float(value)


def _bool(value, location):
    if not isinstance(value, bool):
        raise ConfigFileError("expected true or false, got %r" % (value,),
                              location)
    return value


def _object(value, location):
    if not isinstance(value, dict):
        raise ConfigFileError("expected an object", location)
    return value


def spec_from_dict(data, location):
    """ Parse one metric entry into a :class:`.MetricSpec` """
    _object(data, location)
    name = data.get('name')
    if not isinstance(name, six.string_types) or not name:
        raise ConfigFileError("metric needs a non-empty 'name'",
                              location + '.name')
    clip = data.get('clip')
    if not isinstance(clip, list) or len(clip) != 2:
        raise ConfigFileError("'clip' must be a [min, max] pair",
                              location + '.clip')
    clip_min = _number(clip[0], location + '.clip[0]')
    clip_max = _number(clip[1], location + '.clip[1]')
    if data.get('normalize', True) is not True:
        raise ConfigFileError("only min-max normalized metrics are "
                              "supported", location + '.normalize')
    invert = _bool(data.get('invert', False), location + '.invert')
    needs_reference = _bool(data.get('needs_reference', True),
                            location + '.needs_reference')
    try:
        return MetricSpec(name, clip_min, clip_max, invert=invert,
                          needs_reference=needs_reference)
    except (TypeError, ValueError) as e:
        raise ConfigFileError(str(e), location)


def spec_to_dict(spec, weight=None):
    """ A metric entry, with a weight when given """
    data = OrderedDict([
        ('name', spec.name),
        ('clip', [spec.clip_min, spec.clip_max]),
        ('normalize', True),
        ('invert', spec.invert),
        ('needs_reference', spec.needs_reference),
    ])
    if weight is not None:
        data['weight'] = weight
    return data


def _metric_list(data, location):
    metrics = data.get('metrics')
    if not isinstance(metrics, list) or not metrics:
        raise ConfigFileError("'metrics' must be a non-empty list",
                              location + 'metrics')
    return metrics


def config_from_dict(data, location=''):
    """
    Parse a config document into a :class:`.CompositeConfig`

    Raises
    ------
    exc : :class:`.ConfigFileError`
        With the location of the offending entry

    """
    _object(data, location or '$')
    mode = data.get('mode')
    if mode is not None and mode not in MODES:
        raise ConfigFileError("unknown mode %r" % (mode,), location + 'mode')
    specs, weights = [], []
    for i, entry in enumerate(_metric_list(data, location)):
        entry_location = '%smetrics[%d]' % (location, i)
        specs.append(spec_from_dict(entry, entry_location))
        if 'weight' not in entry:
            raise ConfigFileError("missing 'weight'",
                                  entry_location + '.weight')
        weights.append(_number(entry['weight'], entry_location + '.weight'))
    per_lang = OrderedDict()
    raw_per_lang = _object(data.get('per_lang') or {}, location + 'per_lang')
    for lang_pair in sorted(raw_per_lang):
        pair_location = '%sper_lang.%s' % (location, lang_pair)
        vector = raw_per_lang[lang_pair]
        if not isinstance(vector, list):
            raise ConfigFileError("expected a list of weights", pair_location)
        per_lang[lang_pair] = [_number(w, '%s[%d]' % (pair_location, i))
                               for i, w in enumerate(vector)]
    qe_fallback = None
    if data.get('qe_fallback') is not None:
        qe_fallback = config_from_dict(data['qe_fallback'],
                                       location + 'qe_fallback.')
    provenance = _object(data.get('provenance') or {},
                         location + 'provenance')
    try:
        return CompositeConfig(specs, weights, per_lang=per_lang,
                               qe_fallback=qe_fallback, mode=mode,
                               provenance=provenance)
    except ConfigError as e:
        raise ConfigFileError(str(e), location or '$')


def config_to_dict(config):
    """ The canonical document for a config """
    data = OrderedDict()
    data['mode'] = config.mode
    data['metrics'] = [spec_to_dict(spec, weight) for spec, weight in
                       zip(config.specs, config.weights)]
    if config.per_lang:
        data['per_lang'] = OrderedDict(
            (lang_pair, list(weights)) for lang_pair, weights in
            six.iteritems(config.per_lang))
    if config.qe_fallback is not None:
        data['qe_fallback'] = config_to_dict(config.qe_fallback)
    if config.provenance:
        data['provenance'] = config.provenance
    return data


def dumps_config(config):
    """ Serialize a config to its canonical JSON text """
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True) + '\n'


def _load_json(path):
    try:
        with io.open(path, 'r', encoding='utf-8') as ifile:
            return json.load(ifile, object_pairs_hook=OrderedDict)
    except ValueError as e:
        location = None
        if hasattr(e, 'lineno'):
            location = 'line %d column %d' % (e.lineno, e.colno)
        raise ConfigFileError(getattr(e, 'msg', str(e)), location, path)


def loads_config(text):
    """ Parse canonical JSON text """
    try:
        data = json.loads(text, object_pairs_hook=OrderedDict)
    except ValueError as e:
        raise ConfigFileError(str(e))
    return config_from_dict(data)


def load_config(path):
    """ Read a calibrated config file """
    data = _load_json(path)
    try:
        return config_from_dict(data)
    except ConfigFileError as e:
        raise ConfigFileError(e.reason, e.location, path)


def write_config(path, config):
    """ Atomically write a config file """
    atomic_write(path, dumps_config(config))
    LOG.info("Wrote config to %s", path)


def load_metric_specs(path, mode=None):
    """
    Read a metric declaration file

    The file is either a list of metric entries or an object with a
    ``metrics`` list. Weights, if present, are ignored.

    Parameters
    ----------
    path : str
    mode : str, optional
        With 'reference_free', only metrics with ``needs_reference: false``
        are returned

    Returns
    -------
    specs : list
        :class:`~metricfuse.models.MetricSpec` in file order

    """
    data = _load_json(path)
    if isinstance(data, list):
        data = {'metrics': data}
    try:
        _object(data, '$')
        specs = [spec_from_dict(entry, 'metrics[%d]' % i) for i, entry in
                 enumerate(_metric_list(data, ''))]
    except ConfigFileError as e:
        raise ConfigFileError(e.reason, e.location, path)
    names = set()
    for spec in specs:
        if spec.name in names:
            raise ConfigFileError("duplicate metric '%s'" % spec.name,
                                  'metrics', path)
        names.add(spec.name)
    if mode is not None and mode not in MODES:
        raise ValueError("Unknown mode '%s'" % mode)
    if mode == REFERENCE_FREE:
        specs = [spec for spec in specs if not spec.needs_reference]
    return specs
