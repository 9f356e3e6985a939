""" Run the command line with ``python -m metricfuse`` """
import sys

from .cli import main

sys.exit(main())
