"""Classical and quantum states of a kappa-deformed oscillator with an
inverse-square core, cross-validated by independent numerical oracles."""

from .model import (DOMAIN_MARGIN, DomainError, SystemParams,
                    DimensionlessParams, Domain, nondimensionalize,
                    params_for_dimensionless, potential, half_line_domain)
from .classical import (AdmissibilityError, MeasurementError, Family,
                        MotionKind, TrajectoryCoeffs, MotionClass, Trajectory,
                        solve_trig, solve_hyperbolic, solve_border, classify,
                        integrate_el, measure_period, energy_of, bound_energy,
                        potential_floor)
from .hypergeo import HypergeoPolynomial, build, evaluate, verify_ode, horner
from .spectrum import (NormalizabilityViolation, DegenerateLevelError,
                       ComplexRootError, HypergeoParams, BoundState,
                       SpectrumSummary, normalizability_bound,
                       count_bound_states, energy_level, energy_gap,
                       hypergeo_params, quantization_root, companion_b,
                       level_polynomial, radial_series, level_tail_converges,
                       bound_state, wavefunction, normalize, overlap,
                       spectrum_summary)
from .slsolver import (DivergentIntegralError, QuadratureConvergenceError,
                       SLWeights, SLDiscretization, EigenResult, sl_weights,
                       quad_weighted, discretize, eigen_lowest, suggested_box)

__version__ = "0.1.0"
