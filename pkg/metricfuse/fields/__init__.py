""" Field declarations for models """
import copy
import inspect
import itertools

import six

from .types import TypeDefinition, ALL_TYPES

NO_ARG = object()

# Declaration order; dump_ follows it
_CREATION_COUNTER = itertools.count()


class Field(object):

    """
    A typed, validated attribute of a record model

    Parameters
    ----------
    type : object, optional
        Python type (str, float, bool) or a
        :class:`~metricfuse.fields.types.TypeDefinition` instance or class.
        Text by default.
    coerce : bool, optional
        Convert assigned values of the wrong type instead of rejecting them
        (default False)
    check : callable or list, optional
        Predicate, or list of predicates, that a non-null value must satisfy
    nullable : bool, optional
        Allow None (default True)
    required : bool, optional
        The value must be passed to the model constructor (default False)
    default : object, optional
        Value used when the constructor omits the field. Each record gets its
        own shallow copy. (default None)

    Attributes
    ----------
    name : str
        Attribute name, set by the model metaclass
    model : class
        Owning :class:`~metricfuse.models.Model` subclass

    """

    def __init__(self, data_type=NO_ARG, type=six.text_type, coerce=False,
                 check=None, nullable=True, required=False, default=NO_ARG):
        self.name = None
        self.model = None
        if data_type is NO_ARG:
            data_type = type
        if isinstance(data_type, TypeDefinition):
            self.data_type = data_type
        elif (inspect.isclass(data_type) and
              issubclass(data_type, TypeDefinition)):
            self.data_type = data_type()
        else:
            type_factory = ALL_TYPES.get(data_type)
            if type_factory is None:
                raise TypeError("Unrecognized data_type '%s'" % data_type)
            self.data_type = type_factory()
        self._coerce = coerce
        self.check = []
        if check is not None:
            if hasattr(check, '__iter__'):
                self.check = list(check)
            else:
                self.check = [check]
        self.nullable = nullable
        self.required = required
        self._default = None if default is NO_ARG else default
        self.creation_order = next(_CREATION_COUNTER)

    @property
    def default(self):
        """ Get a shallow copy of the default value """
        return copy.copy(self._default)

    def validate(self, obj):
        """ Raise ValueError if the value on obj is null but must not be, or
        fails a check """
        val = self.resolve(obj)
        if val is None:
            if not self.nullable:
                raise ValueError("Field %s cannot be null" % self.name)
            return
        for check in self.check:
            if not check(val):
                raise ValueError("Validation check on field %s failed for "
                                 "value %r" % (self.name, val))

    def coerce(self, value, force_coerce=None):
        """ Coerce the value to the field's data type """
        if value is None:
            return value
        if force_coerce is None:
            force_coerce = self._coerce
        try:
            return self.data_type.coerce(value, force_coerce)
        except (TypeError, ValueError) as e:
            if e.args:
                raise
            raise TypeError("Field '%s' must be %s! %r" %
                            (self.name, self.data_type, value))

    def dump(self, value):
        """ Dump a value to its JSON-friendly format """
        if value is None:
            return None
        return self.data_type.dump(value)

    def resolve(self, obj=None, scope=None):
        """ Resolve a field value from an object or scope dict """
        if obj is not None:
            return getattr(obj, self.name)
        else:
            return scope.get(self.name)
