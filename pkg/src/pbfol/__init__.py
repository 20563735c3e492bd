"""Pull-back foliations by surfaces on projective space: exact constructions and checks."""

__version__ = "0.1.0"
