"""Physical constants (CODATA 2018, SI units)."""

import math

HBAR = 1.054571817e-34      # J s
K_B = 1.380649e-23          # J / K
C_LIGHT = 299792458.0       # m / s
EPS0 = 8.8541878128e-12     # F / m

EV = 1.602176634e-19        # J


def n0_scale(omega: float) -> float:
    """Commutator normalization (pi hbar / eps0) (omega/c)^2, in SI.

    All commutator coefficients in this package are stored divided by this
    factor, so they carry units of length (1/beta-like) and identities stay
    dimensionless-tame across the optical range.
    """
    return math.pi * HBAR / EPS0 * (omega / C_LIGHT) ** 2
