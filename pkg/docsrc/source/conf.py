# Configuration file for the Sphinx documentation builder.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

# -- Project information -----------------------------------------------------

project = 'vggfer'
copyright = '2021, the vggfer authors'
author = 'the vggfer authors'
release = '0.1.0'

# -- General configuration ---------------------------------------------------

extensions = [
    'm2r',
    'sphinx_rtd_theme',
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx_autodoc_typehints'
]

templates_path = ['_templates']
napoleon_use_param = True
exclude_patterns = []
autodoc_mock_imports = ['numba']

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ['_static']
