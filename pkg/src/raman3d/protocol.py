"""Figures of merit for heralded entanglement between two ensembles.

A noise budget enters the two-ensemble scheme in two places.  Spontaneous
emission loss lowers the heralding rate at fixed fidelity imperfection Δf,
and mode-mismatch noise leaves a vacuum admixture c0 in the heralded state

    ρ = (|Ψφ⁺⟩⟨Ψφ⁺| + c0 |vac⟩⟨vac|) / (1 + c0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ProtocolParams:
    fidelity_imperfection_target: float = 0.01
    phase_phi: float = 0.0
    c0_extra: float = 0.0  # dark counts, detector inefficiency; added to c0 as given

    def __post_init__(self):
        if not (0.0 < self.fidelity_imperfection_target < 0.5):
            raise DomainError("fidelity imperfection target must lie in (0, 0.5)")
        if self.c0_extra < 0.0:
            raise DomainError("c0_extra must be non-negative")


@dataclass(frozen=True)
class ProtocolMetrics:
    required_pc: float
    p_click_per_round: float
    expected_rounds: float
    c0: float
    state_fidelity: float
    repetition_factor: float


def required_pc(delta_f: float, p_spon: float) -> float:
    """Excitation probability per pulse that keeps p_c/(1-p_spon) at Δf."""
    if not (0.0 <= p_spon < 1.0):
        raise DomainError("p_spon must lie in [0, 1)")
    if delta_f < 0.0:
        raise DomainError("delta_f must be non-negative")
    return delta_f * (1.0 - p_spon)


def repetition_factor(p_spon: float) -> float:
    """Extra rounds caused by spontaneous-emission loss, 1/(1-p_spon)."""
    if not (0.0 <= p_spon < 1.0):
        raise DomainError("p_spon must lie in [0, 1)")
    return 1.0 / (1.0 - p_spon)


def vacuum_coefficient(p_mode: float, c0_extra: float = 0.0) -> float:
    """c0 as the odds p_mode/(1-p_mode), plus any externally supplied contribution."""
    if not (0.0 <= p_mode < 1.0):
        raise DomainError("p_mode must lie in [0, 1)")
    return p_mode / (1.0 - p_mode) + c0_extra


def success_metrics(params: ProtocolParams, budget, double_loss: bool = False) -> ProtocolMetrics:
    """Heralding probability, expected rounds and state fidelity for one budget.

    The click probability per round is 2·p_c at p_c = Δf(1-p_spon), so the rate
    drops by one factor of (1-p_spon).  ``double_loss=True`` applies the loss a
    second time on detection, the stricter reading.
    """
    p_spon, p_mode = budget.p_spon, budget.p_mode
    if p_spon >= 1.0 or p_mode >= 1.0:
        raise DomainError("budget is degenerate (p_spon or p_mode equals 1)")
    pc = required_pc(params.fidelity_imperfection_target, p_spon)
    p_click = 2.0 * pc * ((1.0 - p_spon) if double_loss else 1.0)
    c0 = vacuum_coefficient(p_mode, params.c0_extra)
    return ProtocolMetrics(
        required_pc=pc,
        p_click_per_round=p_click,
        expected_rounds=1.0 / p_click,
        c0=c0,
        state_fidelity=1.0 / (1.0 + c0),
        repetition_factor=repetition_factor(p_spon),
    )


def heralded_state(c0: float, phi: float) -> np.ndarray:
    """Density matrix on span{|vac⟩, |1_L 0_R⟩, |0_L 1_R⟩}."""
    if c0 < 0.0:
        raise DomainError("c0 must be non-negative")
    v = _unnormalised(phi)
    rho = np.outer(v, v.conj()) / np.vdot(v, v).real
    rho[0, 0] += c0
    return rho / (1.0 + c0)


def mixed_state_fidelity(c0: float, phi: float = 0.0) -> float:
    """⟨Ψφ⁺|ρ|Ψφ⁺⟩ for the heralded state with vacuum coefficient c0."""
    v = _unnormalised(phi)
    return float(np.real(v.conj() @ heralded_state(c0, phi) @ v) / np.vdot(v, v).real)


def _unnormalised(phi):
    # dividing by <v|v> = 2 instead of multiplying by 1/sqrt(2) keeps phi = 0 free of rounding
    return np.array([0.0, 1.0, np.exp(1j * phi)])
