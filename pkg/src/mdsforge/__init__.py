"""Double Dirichlet series over quadratic twists of a GL(2) newform."""

__version__ = "0.1.0"
