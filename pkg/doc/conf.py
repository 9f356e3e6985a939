# -*- coding: utf-8 -*-
""" Sphinx conf. """
import sys
import os
import sphinx_rtd_theme

# pylint: disable=C0103
docs_basepath = os.path.abspath(os.path.dirname(__file__))
sys.path.insert(0, os.path.abspath(os.path.join(docs_basepath, os.pardir)))

extensions = ['sphinx.ext.autodoc', 'numpydoc', 'sphinx.ext.intersphinx',
              'sphinx.ext.viewcode', 'sphinx.ext.autosummary']

master_doc = 'index'
project = u'metricfuse'
copyright = u'2026, metricfuse developers'

release = '0.1.0'
version = '.'.join(release.split('.')[:2])

exclude_patterns = ['_build']
pygments_style = 'sphinx'
html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
numpydoc_show_class_members = False
intersphinx_mapping = {
    'python': ('http://docs.python.org/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}
