"""Max-plus finite element method for finite-horizon optimal control.

The value function is represented as a max-plus combination of concave
quadratic elements and propagated by a min-max recursion on the
coefficients, with max-plus "mass" and "stiffness" matrices obtained from
scalar products against test functions.
"""
from .assembly import (K_DUAL, K_DUAL_TILDE, K_H, K_TILDE, AssemblyConfig, StiffnessMatrices,
                       approx_semigroup_image, assemble, assemble_fm_kernel, assemble_mass,
                       assemble_stiffness_dual, assemble_stiffness_H, assemble_stiffness_tilde,
                       element_images)
from .bench import (CASES, BenchmarkCase, CaseParams, ConvergenceTable, DomainError, UnknownCase,
                    brute_force_hamiltonian, convergence_study, get_case, lq_semigroup_image,
                    reference_value, riccati_reference, run_case)
from .elements import (BasisFamily, BoxDomain, DegenerateSampling, LipschitzElement,
                       QuadraticElement, UnsupportedOperation, batched_sup, evaluate, family_sup,
                       gradient, pairwise_sup, sampled_sup)
from .problem import (BoundMetadata, ControlProblem, EmptyGridError, GridSpec, regular_grid,
                      sample_lattice, voronoi_radius)
from .projections import (GridFunction, primal_coefficients, project_combined, project_dual,
                          project_primal)
from .solver import (ComparisonReport, ConfigurationError, RunGrids, RunReport, SolverState,
                     compare_methods, fm_run, init_coefficients, reconstruct_value, run, step)
from .tropical import (BandMatrix, ContractError, max_plus_matvec, oplus, otimes, read_matrix_csv,
                       residual_apply, residual_matrix, residuate_scalar, sup_norm_distance,
                       write_matrix_csv)

__version__ = "0.1.0"
