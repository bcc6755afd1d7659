"""Triadic cardinality distributions of sampled social activity streams."""

from .errors import (InfeasibleError, InputFormatError, NoSignalError, NumericalError,
                     OrderingError, ParseError, SingularDesignError, SingularModelError,
                     TriadicError, ValidationError)
from .estimator import (DistributionEstimate, EmOptions, em_binned, em_known_n, em_unknown_n,
                        estimate_n_plus, loglikelihood, mixture, optimal_mixture_weight,
                        phi_from_theta_plus, rescale_to_theta_plus)
from .fisher import (CrlbReport, constrained_crlb, crlb_known, crlb_theta_plus, fisher_known,
                     fisher_unknown, jacobian_H)
from .model import (SamplingModel, a_matrix, betabin_logpmf_dalpha, betabin_pmf, bin_model,
                    build_model, q_vector, sgs_bji)
from .oracle import (GroundTruth, exact_distribution, influence_cardinality,
                     interaction_cardinality, triangle_count_series)
from .sampling import (ItsColorConfig, ItsColorSampler, ItsConfig, ItsSampler, SampledGraph,
                       SgsConfig, SgsSampler, SgsState, TriangleStatistics, calibrate_g0,
                       collect_statistics, its_verify_social_edge, sgs_init)
from .stream import (ActivityWindow, InteractionMultigraph, SocialActivity, SocialGraph,
                     build_multigraph, parse_activity, window_partition)

__version__ = "0.1.0"
