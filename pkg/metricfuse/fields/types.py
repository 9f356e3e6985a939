""" Field type definitions """
import json
import math
import six

try:
    from types import MappingProxyType
except ImportError:  # pragma: no cover
    MappingProxyType = dict

ALL_TYPES = {}


def register_type(type_class):
    """ Register a type class for use with Fields """
    ALL_TYPES[type_class.data_type] = type_class
    for alias in type_class.aliases:
        ALL_TYPES[alias] = type_class


class TypeDefinition(object):

    """
    Base class for all Field types

    Attributes
    ----------
    data_type : object
        The value you wish to pass in to Field as the data_type.
    aliases : list
        Other values that will reference this type if passed to Field

    """
    data_type = None
    aliases = []

    def coerce(self, value, force):
        """
        Check the type of a value and possible convert it

        Parameters
        ----------
        value : object
            The value to check
        force : bool
            If True, always attempt to convert a bad type to the correct type

        Returns
        -------
        value : object
            A variable of the correct type

        Raises
        ------
        exc : TypeError or ValueError
            If the value is the incorrect type and could not be converted

        """
        if not isinstance(value, self.data_type):
            raise TypeError()
        return value

    def dump(self, value):
        """ Dump a value to a form that can be written as JSON """
        return value

    def _attempt_coerce_json(self, value, obj_type):
        """
        If a value arrived as a json string, attempt to load it as an
        obj_type object
        """
        if isinstance(value, six.text_type):
            orig_value = value
            try:
                value = json.loads(orig_value)
                if not isinstance(value, obj_type):
                    value = orig_value
            except ValueError:
                value = orig_value
        return value

    def __repr__(self):
        return 'TypeDefinition(%s)' % self

    def __str__(self):
        if isinstance(self.data_type, six.string_types):
            return self.data_type
        return getattr(self.data_type, '__name__', six.text_type(
            self.data_type))


class StringType(TypeDefinition):

    """ String values, stored as unicode """
    data_type = six.text_type
    aliases = ['str']

    def coerce(self, value, force):
        if not isinstance(value, six.text_type):
            # Silently convert str to unicode using utf-8
            if isinstance(value, six.binary_type):
                return value.decode('utf-8')
            if force and not isinstance(value, (bool, dict, list)):
                return six.text_type(value)
            raise TypeError()
        return value


register_type(StringType)


class FloatType(TypeDefinition):

    """ Float values. Booleans are never accepted as numbers. """
    data_type = float

    def coerce(self, value, force):
        if isinstance(value, bool):
            raise TypeError()
        if not isinstance(value, float):
            # Auto-convert ints
            if isinstance(value, six.integer_types):
                return float(value)
            elif force and isinstance(value, six.string_types):
                return float(value)
            raise TypeError()
        return value


register_type(FloatType)


class BoolType(TypeDefinition):

    """ Boolean type """
    data_type = bool

    def coerce(self, value, force):
        value = self._attempt_coerce_json(value, bool)
        if not isinstance(value, bool):
            if force and isinstance(value, six.integer_types):
                return bool(value)
            raise TypeError()
        return value


register_type(BoolType)


class ScoreMapType(TypeDefinition):

    """
    Mapping of metric name to an optional raw score

    Values are floats or None (score absent). The coerced value is a read-only
    mapping so records stay immutable once constructed.

    """
    data_type = 'scores'

    def coerce(self, value, force):
        value = self._attempt_coerce_json(value, dict)
        if not hasattr(value, 'items'):
            raise TypeError()
        scores = {}
        for name, score in value.items():
            if not isinstance(name, six.string_types):
                raise TypeError("Metric names must be strings, got %r" %
                                (name,))
            if score is None:
                scores[name] = None
                continue
            if isinstance(score, bool) or not isinstance(
                    score, six.integer_types + (float,)):
                raise TypeError("Score for metric '%s' must be a number, got "
                                "%r" % (name, score))
            scores[name] = float(score)
        return MappingProxyType(scores)

    def dump(self, value):
        return dict(value)


register_type(ScoreMapType)


def is_finite(value):
    """ True if value is None or a finite number """
    return value is None or math.isfinite(value)
