"""Delay-limited balancing of an inverted pendulum."""

from ._core import (
    DomainError,
    PendulumParams,
    StabilityInconclusiveError,
    bode_integral,
    complementary_response,
    effective_params,
    fragility,
    fragility_curve,
    nyquist_stable,
    plant_tf,
    poles_zeros,
    simulate,
    singular_fixation_point,
    welch_psd,
)

__all__ = [
    "DomainError",
    "PendulumParams",
    "StabilityInconclusiveError",
    "bode_integral",
    "complementary_response",
    "effective_params",
    "fragility",
    "fragility_curve",
    "nyquist_stable",
    "plant_tf",
    "poles_zeros",
    "simulate",
    "singular_fixation_point",
    "welch_psd",
]
