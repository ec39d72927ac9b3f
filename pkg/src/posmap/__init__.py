"""Moment-based detectors for Schmidt number, bound entanglement and channel properties."""
from ._backend import BACKEND
from .channels import (ChannelMomentVector, Dephasing, Depolarizing, KrausChannel, channel_choi,
                       channel_moments, snbc_threshold, theorem4_check, theorem5_check)
from .discrimination import (WitnessReport, channel_pair_from_ta, discrimination_witness, end_to_end_advantage,
                             helstrom, reduction_tp, trace_annihilating)
from .errors import PosMapError
from .maps import (ANTISYMMETRIC_U3, BreuerHall, Custom, GeneralizedChoi, Identity, PositiveMap, Reduction,
                   Transpose, choi_matrix, mu_of)
from .moments import (DetectionReport, MomentVector, hankel_criterion, hankel_matrix, map_moments,
                      normalized_output, p3_ppt_check, pt_moments, schmidt_number_lower_bound, theorem1_check)
from . import states

__version__ = "0.1.0"
