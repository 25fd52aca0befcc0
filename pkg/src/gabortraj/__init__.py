"""Gabor sampling trajectories.

Hermite-basis short-time Fourier transforms, trajectory families in the
time-frequency plane, frame-bound estimates, reconstruction from trajectory
samples and weak limits of translated trajectories.
"""

from .density import DensityReport, density_scan, phi_regularity_check, scan_grid
from .estimators import CauchyCircleReconstructor, FrameReconstructor, TrajectorySampler
from .exceptions import (ConfigError, ConvergenceError, GaborTrajError, IllPosedError,
                         NumericalError, PreconditionError)
from .frames import (DeltaCriterion, FrameReport, PeriodicOffsets, condition_ii_check,
                     critical_radius, delta_criterion, gram_frame_bounds, line_frame_bounds,
                     ortega_cerda_count)
from .hermite import (HermiteExpansion, derivative, eval_expansion, eval_hermite,
                      hermite_functions, metaplectic_rotate, mult_by_t, sobolev_norms)
from .reconstruction import (PolyanalyticSamples, ReconstructionResult, cauchy_reconstruct,
                             cg_reconstruct, line_uniqueness_check, stft_circle_reconstruct)
from .spiraling import SpiralingReport, singular_directions, spiraling_validate
from .stft import (SampledField, covariance_residual, kernel_table, orthogonality_residual,
                   polyanalytic_lift, sample_field, stft_point, stft_quadrature, stft_values)
from .trajectory import (QuadratureSet, Trajectory, lattice_offsets, make_archimedes,
                         make_circles, make_edges, make_parallel_lines, make_point_path,
                         make_polygon_family, quadrature)
from .weak_limits import (BumpFamily, PredictedLimit, TranslateSequence, WeakLimitReport,
                          predict_limit, verify_limit, weak_discrepancy)

__version__ = "0.1.0"
