""" Model metadata and metaclass objects """
import inspect
from collections import OrderedDict

import six

from .fields import Field


class ValidationError(Exception):

    """ Raised for a malformed model declaration """


def merge_metadata(cls):
    """
    Combine __metadata__ along the base classes

    Keys with a leading underscore (such as ``_name``) stay on the class that
    declares them. Other keys are inherited.

    """
    cls_meta = cls.__dict__.get('__metadata__', {})
    meta = {}
    for base in cls.__bases__:
        meta.update(getattr(base, '__metadata__', {}))
    for key in list(meta.keys()):
        if key.startswith('_'):
            del meta[key]
    meta.update(cls_meta)
    return meta


class ModelMetaclass(type):

    """ Builds ``meta_`` for each Model subclass and checks its declaration """

    def __new__(mcs, name, bases, dct):
        cls = super(ModelMetaclass, mcs).__new__(mcs, name, bases, dct)

        cls.__metadata__ = merge_metadata(cls)

        if hasattr(cls, '__metadata_class__'):
            cls.meta_ = cls.__metadata_class__(cls)
            cls.meta_.post_create()
            cls.meta_.validate_model()
            cls.meta_.post_validate()

        return cls


class ModelMetadata(object):

    """
    Container for model metadata

    Parameters
    ----------
    model : :class:`.Model`

    Attributes
    ----------
    name : str
        Model name for messages, from ``_name`` in __metadata__ or the class
        name
    abstract : bool
        Abstract models declare no fields of their own and cannot be built
    key : tuple
        Names of the fields that identify an instance (e.g. the segment key of
        a record). Empty means every field takes part in the identity.
    fields : :class:`~collections.OrderedDict`
        Mapping of field name to :class:`~metricfuse.fields.Field`, in
        declaration order
    required : list
        Names of the fields that must be supplied on construction

    """

    def __init__(self, model):
        self.model = model
        self._name = model.__name__
        self._abstract = False
        self.key = ()
        self.__dict__.update(model.__metadata__)
        self.key = tuple(self.key)
        self.name = self._name
        self.fields = OrderedDict()
        self.required = []

    def post_create(self):
        """ Collect the declared fields """
        found = []
        for name, member in inspect.getmembers(self.model):
            if isinstance(member, Field):
                if name.startswith('__') or name.endswith('_'):
                    raise ValidationError("Field '%s' cannot begin with '__' "
                                          "or end with '_'" % name)
                member.name = name
                member.model = self.model
                found.append(member)
        found.sort(key=lambda field: field.creation_order)
        for field in found:
            self.fields[field.name] = field

    def post_validate(self):
        """ Build the list of required fields """
        self.required = [name for name, field in six.iteritems(self.fields)
                         if field.required]

    @property
    def abstract(self):
        """ Getter for abstract """
        return self._abstract

    def key_tuple(self, obj=None, scope=None):
        """ Get a tuple that identifies an instance """
        names = self.key or tuple(self.fields)
        return tuple(self.fields[name].resolve(obj, scope) for name in names)

    def validate_model(self):
        """ Perform validation checks on the model declaration """
        if self.abstract:
            return
        name = self.name
        if not self.fields:
            raise ValidationError("Model %s must declare at least one field" %
                                  name)
        for key in self.key:
            if key not in self.fields:
                raise ValidationError("Model %s key references unknown field "
                                      "'%s'" % (name, key))
