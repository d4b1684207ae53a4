import numpy as np
import pytest

from inviscid_damping_lab.spectral import (
    DomainSpec,
    RealField,
    SpectralField,
    dealias,
    to_spectral,
)


@pytest.fixture
def small_domain():
    return DomainSpec(L_y=np.pi, N_x=16, N_y=32)


def random_field(domain, seed=0, band_limited=True, amplitude=1.0):
    """Random real-data spectrum; band_limited keeps it inside the 2/3 ball."""
    rng = np.random.default_rng(seed)
    g = RealField(domain, amplitude * rng.standard_normal((domain.N_x, domain.N_y)))
    f = to_spectral(g)
    if band_limited:
        f = dealias(f)
    return f


def single_mode(domain, k, n, amp=1.0):
    """Hermitian pair at (k, eta0*n) and its mirror."""
    c = np.zeros((domain.N_x, domain.N_y), dtype=complex)
    c[k % domain.N_x, n % domain.N_y] = amp
    c[(-k) % domain.N_x, (-n) % domain.N_y] = np.conj(amp)
    return SpectralField(domain, c)
