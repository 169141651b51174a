"""Exact measure-algebra combinatorics on finite Cantor cubes."""
from .cube import (ClopenSet, Coordinate, Dyadic, PartialAssignment, PreconditionError,
                   UndefinedConditional, combine, conditional, cylinder, determining_coords,
                   measure, project_below, split_half)

__all__ = ["ClopenSet", "Coordinate", "Dyadic", "PartialAssignment", "PreconditionError",
           "UndefinedConditional", "combine", "conditional", "cylinder", "determining_coords",
           "measure", "project_below", "split_half"]
