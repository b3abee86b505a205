"""Heat dispersion of insulated conductors: formulas, FEM, bounds and shape search."""

__version__ = "0.1.0"
