""" Model code """
import copy
import logging
import math
from collections import OrderedDict

import six

from .fields import Field
from .fields.types import is_finite
from .model_meta import ModelMetaclass, ModelMetadata

LOG = logging.getLogger(__name__)

REFERENCE_BASED = 'reference_based'
REFERENCE_FREE = 'reference_free'
MODES = (REFERENCE_BASED, REFERENCE_FREE)

CALIBRATION = 'calibration'
SCORING = 'scoring'


class ConfigError(ValueError):

    """ Raised when a composite configuration is inconsistent """


class Model(six.with_metaclass(ModelMetaclass)):

    """
    Base class for all immutable metricfuse records

    Values are coerced and validated on construction. After ``__init__``
    returns, the instance cannot be modified.

    Attributes
    ----------
    __metadata_class__ : class
        The class that is instantiated and set as ``meta_``
    __metadata__ : dict
        Model settings. ``key`` names the identifying fields.
    meta_ : :class:`~.ModelMetadata`
        The metadata for the model

    """
    __metadata_class__ = ModelMetadata
    __metadata__ = {
        '_abstract': True,
    }
    meta_ = None
    _frozen = False

    def __new__(cls, *_, **__):
        """ Override __new__ to set default field values """
        if cls.meta_.abstract:
            raise TypeError("Cannot instantiate abstract model %s" %
                            cls.meta_.name)
        obj = super(Model, cls).__new__(cls)
        for name, field in six.iteritems(cls.meta_.fields):
            object.__setattr__(obj, name, field.default)
        return obj

    def __init__(self, **kwargs):  # pylint: disable=W0231
        missing = [name for name in self.meta_.required
                   if kwargs.get(name) is None]
        if missing:
            raise ValueError("%s is missing required field(s): %s" %
                             (self.meta_.name, ', '.join(missing)))
        for key, value in six.iteritems(kwargs):
            if key not in self.meta_.fields:
                raise TypeError("%s has no field %r" % (self.meta_.name, key))
            setattr(self, key, value)
        self.validate_()
        object.__setattr__(self, '_frozen', True)

    def __setattr__(self, name, value):
        if self._frozen:
            raise AttributeError("%s is immutable" % self.meta_.name)
        field = self.meta_.fields.get(name)
        if field is None:
            return super(Model, self).__setattr__(name, value)
        return super(Model, self).__setattr__(name, field.coerce(value))

    def __delattr__(self, name):
        if self._frozen:
            raise AttributeError("%s is immutable" % self.meta_.name)
        super(Model, self).__delattr__(name)

    def validate_(self):
        """ Run the field checks. Subclasses add cross-field checks. """
        for field in six.itervalues(self.meta_.fields):
            field.validate(self)

    @property
    def key_(self):
        """ The tuple that identifies this instance """
        return self.meta_.key_tuple(self)

    @classmethod
    def load_(cls, data):
        """
        Construct a model from a dict, ignoring undeclared keys

        Parameters
        ----------
        data : dict

        """
        kwargs = {}
        for key, val in six.iteritems(data):
            if key in cls.meta_.fields:
                kwargs[key] = val
            else:
                LOG.debug("Ignoring undeclared field %r", key)
        return cls(**kwargs)

    def dump_(self):
        """ Return an ordered dict of JSON-friendly field values """
        data = OrderedDict()
        for name, field in six.iteritems(self.meta_.fields):
            data[name] = field.dump(getattr(self, name))
        return data

    def __hash__(self):
        return hash((self.meta_.name,) + tuple(
            repr(val) for val in self.key_))

    def __eq__(self, other):
        return (isinstance(other, self.__class__) and
                self.dump_() == other.dump_())

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        args = ', '.join('%s=%r' % item for item in six.iteritems(
            self.dump_()))
        return '%s(%s)' % (self.meta_.name, args)


class MetricSpec(Model):

    """
    Preprocessing rule for one base metric

    Parameters
    ----------
    name : str
        Metric identifier, unique within any collection of specs
    clip_min : float
        Lower end of the valid range, in the metric's native unit
    clip_max : float
        Upper end of the valid range (strictly greater than clip_min)
    invert : bool, optional
        True if higher raw scores indicate worse translations (default False)
    needs_reference : bool, optional
        True if the metric needs a human reference translation (default True)

    """
    __metadata__ = {
        'key': ('name',),
    }
    name = Field(nullable=False, required=True)
    clip_min = Field(data_type=float, coerce=True, nullable=False,
                     required=True, check=is_finite)
    clip_max = Field(data_type=float, coerce=True, nullable=False,
                     required=True, check=is_finite)
    invert = Field(data_type=bool, nullable=False, default=False)
    needs_reference = Field(data_type=bool, nullable=False, default=True)

    def __init__(self, name, clip_min, clip_max, invert=False,
                 needs_reference=True):
        super(MetricSpec, self).__init__(name=name, clip_min=clip_min,
                                         clip_max=clip_max, invert=invert,
                                         needs_reference=needs_reference)

    def validate_(self):
        super(MetricSpec, self).validate_()
        if not self.clip_min < self.clip_max:
            raise ValueError("Metric %s needs clip_min < clip_max, got "
                             "[%r, %r]" % (self.name, self.clip_min,
                                           self.clip_max))


class SegmentRecord(Model):

    """
    One translation segment with its human and metric scores

    Attributes
    ----------
    lang_pair : str
        Opaque language pair label, e.g. 'en-de'
    system_id : str
    segment_id : str
    domain : str or None
    has_reference : bool
        False when no human reference exists for the segment
    human_score : float or None
        Gold score, stored verbatim (higher must mean better for calibration)
    raw_scores : mapping
        Metric name to raw score. A None value means the score is absent.

    """
    __metadata__ = {
        'key': ('lang_pair', 'system_id', 'segment_id'),
    }
    lang_pair = Field(coerce=True, nullable=False, required=True)
    system_id = Field(coerce=True, nullable=False, required=True)
    segment_id = Field(coerce=True, nullable=False, required=True)
    domain = Field(coerce=True)
    has_reference = Field(data_type=bool, nullable=False, default=True)
    human_score = Field(data_type=float)
    raw_scores = Field(data_type='scores', nullable=False, default={})

    def __init__(self, **kwargs):
        if kwargs.get('raw_scores') is None:
            kwargs['raw_scores'] = {}
        if kwargs.get('has_reference') is None:
            kwargs.pop('has_reference', None)
        super(SegmentRecord, self).__init__(**kwargs)

    def score(self, metric):
        """ The raw score for a metric, or None if absent """
        return self.raw_scores.get(metric)

    def with_human_score(self, human_score):
        """ Copy of this record with a different human score """
        data = self.dump_()
        data['human_score'] = human_score
        return SegmentRecord(**data)


def group_records(records, field_name):
    """
    Split records by the value of a field

    Returns
    -------
    groups : :class:`~collections.OrderedDict`
        Field value to list of records, sorted by value. Records keep their
        input order within a group.

    """
    groups = {}
    for record in records:
        groups.setdefault(getattr(record, field_name), []).append(record)
    return OrderedDict((key, groups[key]) for key in sorted(groups))


def check_unique_names(specs):
    """ Raise :class:`.ConfigError` if two specs share a name """
    seen = set()
    for spec in specs:
        if spec.name in seen:
            raise ConfigError("Duplicate metric '%s'" % spec.name)
        seen.add(spec.name)


def _check_weights(weights, size, label):
    """ Validate a weight vector and return it as a tuple of floats """
    weights = tuple(float(w) for w in weights)
    if len(weights) != size:
        raise ConfigError("%s has %d weights for %d metrics" %
                          (label, len(weights), size))
    for weight in weights:
        if math.isnan(weight) or not 0.0 <= weight <= 1.0:
            raise ConfigError("%s weight %r is outside [0, 1]" %
                              (label, weight))
    return weights


class CompositeConfig(object):

    """
    A calibrated weighted sum over preprocessed metrics

    Parameters
    ----------
    specs : list
        Ordered list of :class:`.MetricSpec`
    weights : list
        One weight in [0, 1] per spec
    per_lang : dict, optional
        Mapping of language pair to a weight vector that replaces ``weights``
        for records of that pair
    qe_fallback : :class:`.CompositeConfig`, optional
        Reference-free configuration used by hybrid scoring when a record has
        no reference
    mode : {'reference_based', 'reference_free'}, optional
        Inferred from the specs when omitted
    provenance : dict, optional
        Settings that produced this configuration (seed, optimizer, kernel)

    """

    def __init__(self, specs, weights, per_lang=None, qe_fallback=None,
                 mode=None, provenance=None):
        self.specs = tuple(specs)
        if not self.specs:
            raise ConfigError("A composite needs at least one metric")
        check_unique_names(self.specs)
        self.weights = _check_weights(weights, len(self.specs), 'Global')
        self.per_lang = OrderedDict()
        for lang_pair in sorted(per_lang or {}):
            self.per_lang[lang_pair] = _check_weights(
                per_lang[lang_pair], len(self.specs), lang_pair)
        if qe_fallback is not None:
            if not isinstance(qe_fallback, CompositeConfig):
                raise ConfigError("qe_fallback must be a CompositeConfig")
            needs_ref = [spec.name for spec in qe_fallback.specs
                         if spec.needs_reference]
            if needs_ref:
                raise ConfigError("qe_fallback cannot use reference-based "
                                  "metrics: %s" % ', '.join(needs_ref))
        self.qe_fallback = qe_fallback
        if mode is None:
            mode = (REFERENCE_BASED if any(spec.needs_reference for spec in
                                           self.specs) else REFERENCE_FREE)
        if mode not in MODES:
            raise ConfigError("Unknown mode '%s'" % mode)
        if mode == REFERENCE_FREE and any(spec.needs_reference
                                          for spec in self.specs):
            raise ConfigError("A reference-free composite cannot use "
                              "reference-based metrics")
        self.mode = mode
        self.provenance = copy.deepcopy(provenance or {})

    @property
    def metric_names(self):
        """ Names of the metrics, in weight order """
        return tuple(spec.name for spec in self.specs)

    def weights_for(self, lang_pair=None):
        """
        Select the weight vector for a language pair

        Returns
        -------
        weights : tuple
        key : str or None
            The language pair if per-language weights were used, else None

        """
        if lang_pair is not None and lang_pair in self.per_lang:
            return self.per_lang[lang_pair], lang_pair
        return self.weights, None

    def total_weight(self, lang_pair=None):
        """ Sum of the weights that apply to a language pair """
        return math.fsum(self.weights_for(lang_pair)[0])

    def replace(self, **kwargs):
        """ Copy of this config with some attributes replaced """
        args = {
            'specs': self.specs,
            'weights': self.weights,
            'per_lang': self.per_lang,
            'qe_fallback': self.qe_fallback,
            'mode': self.mode,
            'provenance': self.provenance,
        }
        args.update(kwargs)
        return CompositeConfig(**args)

    def __eq__(self, other):
        return (isinstance(other, CompositeConfig) and
                self.specs == other.specs and
                self.weights == other.weights and
                self.per_lang == other.per_lang and
                self.qe_fallback == other.qe_fallback and
                self.mode == other.mode and
                self.provenance == other.provenance)

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return 'CompositeConfig(%s, %r)' % (
            ', '.join(self.metric_names), self.weights)


class ValidationIssue(object):

    """
    A problem found in one record

    Attributes
    ----------
    index : int
        Position of the record in the input
    key : tuple
        (lang_pair, system_id, segment_id)
    field : str
        The offending field or metric name
    message : str

    """

    def __init__(self, index, key, field, message):
        self.index = index
        self.key = key
        self.field = field
        self.message = message

    def __eq__(self, other):
        return (isinstance(other, ValidationIssue) and
                (self.index, self.key, self.field, self.message) ==
                (other.index, other.key, other.field, other.message))

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __str__(self):
        return 'record %d (%s): %s' % (self.index, '/'.join(self.key),
                                       self.message)

    def __repr__(self):
        return 'ValidationIssue(%s)' % self


def _missing_scores(record, specs):
    """ Names of the specs a record has no finite score for """
    missing = []
    for spec in specs:
        value = record.score(spec.name)
        if value is None or not math.isfinite(value):
            missing.append(spec.name)
    return missing


def validate_dataset(records, specs, mode, fallback_specs=None):
    """
    Check records against what calibration or scoring needs

    Issues are returned as data, never raised.

    Parameters
    ----------
    records : list
        List of :class:`.SegmentRecord`
    specs : list
        The metrics the records are checked against
    mode : {'calibration', 'scoring'}
        Calibration needs a human score and every metric score. Scoring needs
        every score of ``specs`` or every score of ``fallback_specs``.
    fallback_specs : list, optional
        Reference-free metrics that can score a record in hybrid mode

    Returns
    -------
    issues : list
        List of :class:`.ValidationIssue`, in record order

    """
    if mode not in (CALIBRATION, SCORING):
        raise ValueError("Unknown validation mode '%s'" % mode)
    issues = []
    for index, record in enumerate(records):
        key = record.key_
        if mode == CALIBRATION:
            if record.human_score is None:
                issues.append(ValidationIssue(index, key, 'human_score',
                                              'missing human_score'))
            elif not math.isfinite(record.human_score):
                issues.append(ValidationIssue(index, key, 'human_score',
                                              'non-finite human_score'))
            for name in _missing_scores(record, specs):
                issues.append(ValidationIssue(
                    index, key, name, "missing score for metric '%s'" % name))
        else:
            missing = _missing_scores(record, specs)
            if not missing:
                continue
            if fallback_specs and not _missing_scores(record, fallback_specs):
                continue
            issues.append(ValidationIssue(
                index, key, missing[0], 'no applicable configuration: '
                'missing %s' % ', '.join(missing)))
    return issues
