"""Pseudo-spectral experiments on inviscid damping of perturbed Couette flow."""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    DomainSpec,
    RealField,
    SpectralField,
    dealias,
    derivative,
    gevrey_norm,
    l2_norm,
    shear_derivative,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .linear import (  # noqa: F401
    OrrResult,
    decay_exponent_fit,
    linear_velocity,
    orr_amplification,
    orr_streamfunction,
)
from .gevrey import LambdaParams, epsilon_threshold, lambda_of_t, weighted_energy  # noqa: F401
from .sim import SimConfig, SimState, run, step_rk4  # noqa: F401
from .toy import ToyParams, ToyState, chain_amplification, integrate_interval  # noqa: F401
from .datagen import DataSpec, generate_data  # noqa: F401
