"""Flexible polyhedra near a rigid limit: Bricard octahedra, the glued polyhedron P and its flexible neighbours P_n."""
from .assembly import AuxPlacement, Construction, construct, flex_path_Pn, sector_data
from .bricard import CFG0, BricardConfig, alpha, beta, build_bricard, flex_interval
from .config import RunConfig, load_config, parse_config
from .geometry import EmbeddedPolyhedron, dihedral, integral_mean_curvature, signed_volume
from .rigidity import (ConstraintSystem, bellows_check, certify_flexible, certify_rigid_evidence,
                       continue_flex, flex_space, lemma_congruence_check, phi, rigidity_matrix)
from .surface import SimplicialSurface, build_surface, validate_closed_sphere

__version__ = "0.1.0"

__all__ = [
    "AuxPlacement", "Construction", "construct", "flex_path_Pn", "sector_data",
    "CFG0", "BricardConfig", "alpha", "beta", "build_bricard", "flex_interval",
    "RunConfig", "load_config", "parse_config",
    "EmbeddedPolyhedron", "dihedral", "integral_mean_curvature", "signed_volume",
    "ConstraintSystem", "bellows_check", "certify_flexible", "certify_rigid_evidence",
    "continue_flex", "flex_space", "lemma_congruence_check", "phi", "rigidity_matrix",
    "SimplicialSurface", "build_surface", "validate_closed_sphere",
]
