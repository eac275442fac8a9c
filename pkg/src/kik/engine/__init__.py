from .folding import (
    FoldedEstimates, FoldedPropagators, MitigatedResult, circuit_inverse_residual, folded_schedule,
    mitigate_exact, mitigated_state, mitigated_superop, mitigation_bias, survival_moment, survival_probability,
)
from .sampling import MeasurementMatrix, allocate_shots, mitigate_sampled
from .twirling import RCRealization, rc_propagators, rc_realizations, twirl_average, twirled_propagators
from .states import rotation_averaged_state
from .drift import set_averaged_mitigate, shot_layout

__all__ = [
    'FoldedEstimates', 'FoldedPropagators', 'MitigatedResult', 'circuit_inverse_residual', 'folded_schedule',
    'mitigate_exact', 'mitigated_state', 'mitigated_superop', 'mitigation_bias', 'survival_moment',
    'survival_probability', 'MeasurementMatrix', 'allocate_shots', 'mitigate_sampled', 'RCRealization',
    'rc_propagators', 'rc_realizations', 'twirl_average', 'twirled_propagators', 'rotation_averaged_state',
    'set_averaged_mitigate', 'shot_layout',
]
