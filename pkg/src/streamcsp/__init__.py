"""Streaming approximability of Boolean Max-CSPs: the easy/hard decision,
bias-sketch classifier, hard-instance generators and polarization engine."""
from .core import Constraint, CSPError, Instance, TruthTable, opt_value, rho, value
from .dist import Dist, canonical, marginals
from .separability import Easy, Hard, approx_ratio, decide, resistance

__all__ = [
    "Constraint", "CSPError", "Instance", "TruthTable", "opt_value", "rho", "value",
    "Dist", "canonical", "marginals",
    "Easy", "Hard", "approx_ratio", "decide", "resistance",
]
__version__ = "0.1.0"
