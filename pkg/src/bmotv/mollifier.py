"""Polynomial smoothing kernels on [-1, 1] and their antiderivatives."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly


@dataclass(frozen=True)
class Mollifier:
    """Even, nonnegative, unit-mass polynomial bump supported on [-1, 1].

    ``coeffs`` are ascending power coefficients of the profile on [-1, 1].
    The default is the biweight (15/16)(1 - z^2)^2.
    """

    coeffs: tuple = (15 / 16, 0.0, -15 / 8, 0.0, 15 / 16)
    name: str = field(default="biweight", compare=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if np.any(c[1::2] != 0.0):
            raise ValueError("mollifier profile must be even")
        mass = npoly.polyval(1.0, npoly.polyint(c, lbnd=-1.0))
        if abs(mass - 1.0) > 1e-10:
            raise ValueError(f"mollifier profile must have unit mass, got {mass!r}")
        z = np.linspace(-1.0, 1.0, 201)
        if np.any(npoly.polyval(z, c) < -1e-14):
            raise ValueError("mollifier profile must be nonnegative")

    @classmethod
    def triweight(cls):
        # (35/32)(1 - z^2)^3, twice continuously differentiable
        return cls((35 / 32, 0.0, -105 / 32, 0.0, 105 / 32, 0.0, -35 / 32), name="triweight")

    @cached_property
    def rho(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @cached_property
    def cdf(self) -> np.ndarray:
        """Coefficients of z -> int_{-1}^z rho."""
        return npoly.polyint(self.rho, lbnd=-1.0)

    @cached_property
    def cdf_integral(self) -> np.ndarray:
        """Coefficients of z -> int_{-1}^z cdf; equals z for z >= 1."""
        return npoly.polyint(self.cdf, lbnd=-1.0)

    def density(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(np.abs(z) < 1.0, npoly.polyval(z, self.rho), 0.0)

    def step(self, z):
        """Mollified unit step at scale 1: 0 below -1, 1 above 1."""
        z = np.asarray(z, dtype=float)
        inner = npoly.polyval(np.clip(z, -1.0, 1.0), self.cdf)
        return np.where(z <= -1.0, 0.0, np.where(z >= 1.0, 1.0, inner))

    def ramp(self, z):
        """Antiderivative of :meth:`step` vanishing below -1."""
        z = np.asarray(z, dtype=float)
        inner = npoly.polyval(np.clip(z, -1.0, 1.0), self.cdf_integral)
        return np.where(z <= -1.0, 0.0, np.where(z >= 1.0, z, inner))

    def scaled(self, x, delta):
        """rho_delta(x) = rho(x / delta) / delta."""
        return self.density(np.asarray(x) / delta) / delta

    def l1_step_defect(self) -> float:
        """int |step(s) - 1_{s>0}| ds, the L1 distance per unit scale between
        a mollified unit jump and the jump itself."""
        # by evenness the two halves contribute equally
        return 2.0 * (1.0 - (npoly.polyval(1.0, self.cdf_integral) - npoly.polyval(0.0, self.cdf_integral)))


DEFAULT_MOLLIFIER = Mollifier()
