"""Graph distances built on fractional isomorphism, with exact homomorphism counts."""

from .cutnorm import cut_norm
from .distances import (DistanceReport, SolverOptions, color_distance, cut_distance_upper,
                        cut_objective, d_cut_at, objective_matrix, path_dist_spectral,
                        spectral_objective, tree_dist_cutnorm, tree_dist_spectral)
from .errors import (ConvergenceError, HomdistError, InvariantError, ParseError,
                     PreconditionError)
from .generators import figure1_graph, gen_gnp, gen_regular, three_part_graph
from .graphs import (Graph, WeightedGraph, as_weighted, blow_up, complete_graph, cycle_graph,
                     disjoint_union, empty_graph, parse_graph, parse_weighted, path_graph,
                     serialize_graph, serialize_weighted, star_graph)
from .homomorphism import (brute_force_hom, density, enumerate_trees, hom_path, hom_tree,
                           path_density, tree_density)
from .inversion import diagonal_overlay, invert, verify_inversion
from .linalg import jacobi_eigh, spectral_norm
from .overlays import (FractionalOverlay, SignedOverlay, compose, dykstra_signed,
                       dykstra_transportation, path_certificate, tree_certificate,
                       uniform_overlay)
from .refinement import (color_refine, cr_equivalent, path_equivalent, path_spectrum, quotient,
                         quotient_match)
from .transport import transportation_lmo

__version__ = "0.1.0"
