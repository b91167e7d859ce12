"""Combinatorial complexity measures and ERM experiments for finite binary classes."""

from .classes import (DomainDistribution, HypothesisClass, LabeledSample,
                      MassartInstance, PointDomain, load_class,
                      make_linear_separators, make_massart_instance,
                      make_star_class, make_thresholds, sample, save_class)
from .erm import (AdversarialSpec, ErmPolicy, TrialReport,
                  build_adversarial_family, erm, excess_risk, kl_product,
                  run_trial, version_space_disagreement)
from .experiments import (SweepConfig, SweepTable, check_sandwich,
                          check_star_theorem, fit_loglog_slope, run_rate_sweep)
from .geometry import (FixedPointResult, PackingResult, alexander_capacity,
                       doubling_dimension, gamma_loc, gamma_star,
                       global_packing_number, local_packing_number,
                       max_packing, project, pseudoconvexity_constant)
from .measures import MeasureResult, growth_function, star_number, vc_dimension
from .processes import (LossClassView, ProcessEstimate, check_contraction,
                        check_localization_bound,
                        check_symmetrization_expectation, offset_rademacher_sup,
                        shifted_process_sup, sudakov_check)

__version__ = "0.1.0"
