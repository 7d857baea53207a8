"""Desk-scale fundamental groups of posets, flat net bundles and their
holonomy, Toeplitz-style Fredholm modules with loop-group valued index,
Cheeger-Chern-Simons classes, and nets of spectral triples."""

__version__ = "0.1.0"
