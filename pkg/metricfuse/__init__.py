""" metricfuse """
from .fields import Field
from .fields.types import TypeDefinition
from .models import (CompositeConfig, ConfigError, MetricSpec, Model,
                     REFERENCE_BASED, REFERENCE_FREE, SegmentRecord,
                     ValidationIssue, validate_dataset)
from .engine import Engine

__version__ = '0.1.0'
