"""Chance-constraint learning toolkit.

Trains point/quantile/superquantile estimators, compiles them into exact
mixed-integer-linear constraint blocks, embeds the blocks as probabilistic
bounds inside optimization problems, solves the result, and validates
solutions against the learned variable's estimated distribution.
"""

__version__ = "0.1.0"
