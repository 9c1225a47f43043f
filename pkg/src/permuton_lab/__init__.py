"""d-dimensional permutations, permutons, Schnyder wood and separable samplers."""
from .core import (BudgetExceeded, DPermutation, EnumerationLimit, InvalidPermutation,
                   SignSequence, TieError, as_perm, block_sum, format_pattern, freq,
                   freq_sampled, inverse_marginal, occ, parse_pattern, pattern_at,
                   pattern_table, perm_of_points, validate)
from .permuton import (ConvergenceReport, EmpiricalPermuton, PointCloud, approximation_curve,
                       box_distance, cdf_sup_distance, convergence_report, freq_permuton,
                       freq_permuton_exact, sample_pattern, sample_points)
from .schnyder import (ConeWalk, CoalescentWalkProcess, RootedForest, build_process,
                       sample_uniform_schnyder, schnyder_perm_from_string, string_to_walk,
                       walk_to_string)
from .separable import (PlaneTree, is_separable, offspring_law, sample_brownian_pattern,
                        sample_uniform_separable, sample_uniform_swap_tree, sign_tree,
                        sign_tree_inverse, swap_tree)
from .oracle import EnumerationBudget, exact_pattern_law, verify

__version__ = "0.1.0"
