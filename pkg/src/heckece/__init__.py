"""Exact homology of graded and Hecke Lie algebras over p-local coefficient rings."""

from .chain import BigradedComplex, HomologyEntry, HomologySummary, homology
from .coeff import RingSpec, smith_normal_form
from .hecke import (
    HeckeLieAlgebra,
    WeightPOpModel,
    atomic_algebra,
    euclidean_algebra,
    hecke_homology,
    height1_model,
    model_from_euler_poly,
    surface_algebra,
)
from .lie import GradedLieAlgebra, ce_complex, ce_homology, free_lie_basis, lie_homology_via_bar
from .wgmod import BasisElement, FreeWGModule

__version__ = "0.1.0"
