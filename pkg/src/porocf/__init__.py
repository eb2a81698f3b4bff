"""Porosity of limit sets of complex continued fractions and other conformal IFS."""
__version__ = "0.1.0"
