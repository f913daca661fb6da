#
# uhr_wavelets documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys

sys.path.insert(0, os.path.abspath("../"))  # NOQA

import uhr_wavelets  # noqa: E402


# -- General configuration ------------------------------------------------

project = "uhr_wavelets"
copyright = "2026, The uhr_wavelets Authors"
author = "The uhr_wavelets Authors"

# The short X.Y version.
version = ".".join(uhr_wavelets.__version__.split(".")[:2])
# The full version, including alpha/beta/rc tags.
release = uhr_wavelets.__version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"


# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"
html_theme_options = {
    "page_width": "1040px",
    "show_related": True,
    "sidebar_collapse": True,
}
html_sidebars = {
    "**": [
        "about.html",
        "navigation.html",
        "relations.html",  # needs 'show_related': True theme option to display
        "searchbox.html",
    ]
}

htmlhelp_basename = "UhrWaveletsdoc"


# -- Options for manual page output ---------------------------------------

man_pages = [("uhr-wavelets", "uhr-wavelets", "uhr-wavelets CLI", [author], 1)]


# -- Extension configuration ----------------------------------------------

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "jsonschema": ("https://python-jsonschema.readthedocs.io/en/latest/", None),
    "blinker": ("https://pythonhosted.org/blinker/", None),
}
