"""
Cross-resonance amplitude calibration through a CNOT chain.

The single-qubit dressings of a CNOT commute with the cross-resonance pulse,
so in time order a chain of n CNOTs is R_X(-pi/2)^n on the target, then n
bare noisy pulses, then R_Z(-pi/2)^n on the control. Only the bare pulses
are folded: the R_X block is absorbed into the input state and the R_Z block
commutes with <I Y>.

For every amplitude on the grid <I Y> is mitigated with Taylor coefficients;
a straight line through those values gives the calibrated amplitude at its
zero. The calibrated pulse is then scored by the average gate fidelity of its
mitigated superoperator.
"""
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from sklearn.linear_model import LinearRegression

from kik import liouville
from kik.coefficients import taylor_coefficients
from kik.engine.folding import FoldedPropagators, mitigate_exact
from kik.engine.twirling import rc_propagators, rc_realizations
from kik.errors import RegressionDegenerate
from kik.noise import build_generator
from kik.records import ScenarioResult
from .base import BaseScenario, point_seed
from .gates import calibration_noise, cross_resonance_chain, cross_resonance_schedule, cross_resonance_unitary

logger = logging.getLogger(__name__)


def calibration_observable() -> np.ndarray:
    return liouville.embed(liouville.pauli_matrix("Y"), 1, 2)


def calibration_state(n_cnots: int = 0) -> np.ndarray:
    """|+>|0>, carried through the target R_X dressings of ``n_cnots`` CNOTs."""
    rho = np.kron(liouville.pure_state([1.0, 1.0]), liouville.basis_state("0"))
    rx = expm(0.25j * np.pi * n_cnots * liouville.embed(liouville.pauli_matrix("X"), 1, 2))
    return rx @ rho @ rx.conj().T


def fit_zero_crossing(amplitudes: Sequence[float], values: Sequence[float]) -> Tuple[float, float, float]:
    """Ordinary least-squares line through (amplitude, value); returns (zero, slope, intercept)."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    if np.unique(amplitudes).size < 2:
        raise RegressionDegenerate("calibration needs at least two distinct amplitudes")
    model = LinearRegression().fit(amplitudes.reshape(-1, 1), np.asarray(values, dtype=float))
    slope, intercept = float(model.coef_[0]), float(model.intercept_)
    if slope == 0.0:
        raise RegressionDegenerate("calibration line is flat")
    return -intercept / slope, slope, intercept


def gate_fidelities(superop: np.ndarray, R_ideal: np.ndarray) -> Dict[str, float]:
    R = liouville.ptm_of(superop)
    return {"adjoint": liouville.avg_gate_fidelity_ptm_adjoint(R, R_ideal),
            "inverse": liouville.avg_gate_fidelity_ptm(R, R_ideal)}


class CnotCalibrationScenario(BaseScenario):
    kind = "cnot_calib"

    def points(self) -> List[dict]:
        return [{"xi": float(xi)} for xi in self.config.noise["xi"]]

    def _dissipator(self, xi: float):
        n = self.config.noise
        return build_generator(calibration_noise(xi, n["dephasing_rate"], n["decay_rate"])) if xi else None

    def calibrate(self, xi: float) -> Dict[int, Tuple[float, float, float]]:
        """Calibrated amplitude, slope and intercept for every mitigation order and for M = 0."""
        s = self.config.scenario
        L = self._dissipator(xi)
        A, rho = calibration_observable(), calibration_state(s["n_cnots"])
        amplitudes = [float(a) for a in s["amplitudes"]]
        orders = sorted(set(self.orders) | {0})
        values = np.empty((len(amplitudes), len(orders)))
        for i, amplitude in enumerate(amplitudes):
            props = FoldedPropagators(cross_resonance_chain(s["n_cnots"], amplitude, L))
            for j, M in enumerate(orders):
                values[i, j] = mitigate_exact(props, A, rho, M, "1").estimate
        return {M: fit_zero_crossing(amplitudes, values[:, j]) for j, M in enumerate(orders)}

    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        xi = point["xi"]
        L = self._dissipator(xi)
        fits = self.calibrate(xi)
        R_ideal = liouville.ptm_of(liouville.unitary_superop(cross_resonance_unitary(1.0)))

        ideal_pulse = cross_resonance_schedule(1.0, L)
        realizations = rc_realizations(ideal_pulse, self.config.scenario["rc_realizations"],
                                       point_seed(self.seed, point), policy="enumerate")
        amplitude_0 = fits[0][0]
        calibrated_0 = cross_resonance_schedule(amplitude_0, L)
        props_0 = FoldedPropagators(calibrated_0)
        rc_props = rc_propagators(calibrated_0, realizations)

        records = []
        for M in self.orders:
            amplitude, slope, intercept = fits[M]
            coeffs = taylor_coefficients(M)
            fid_0 = gate_fidelities(props_0.mitigated_superop(coeffs), R_ideal)
            fid_m = gate_fidelities(FoldedPropagators(cross_resonance_schedule(amplitude, L)).mitigated_superop(coeffs),
                                    R_ideal)
            twirled = sum(p.mitigated_superop(coeffs) for p in rc_props) / len(rc_props)
            fid_rc = gate_fidelities(twirled, R_ideal)
            logger.info("cnot calibration xi=%g M=%d: amplitude %.6f, F_M %.6f", xi, M, amplitude, fid_m["adjoint"])
            records.append(self._result(point, M, "1", amplitude, 1.0, extra={
                "slope": slope, "intercept": intercept,
                "fidelity_0": fid_0["adjoint"], "fidelity_m": fid_m["adjoint"], "fidelity_rc": fid_rc["adjoint"],
                "fidelity_0_inverse_form": fid_0["inverse"], "fidelity_m_inverse_form": fid_m["inverse"],
                "fidelity_rc_inverse_form": fid_rc["inverse"],
            }))
        return records
