"""Laplacian model of the difference between a WZ frame and its side information.

The residual of the two motion-compensated predictions stands in for the
unknown WZ-minus-SI difference. It is transformed like the WZ frame and a
Laplacian decay rate is fitted per band and, where a coefficient is far
from its band's spread, per coefficient.
"""

from dataclasses import dataclass

import numpy as np

from apps.common.errors import DimensionMismatch
from apps.transform.transform import plane_to_bands

# variances are floored here, capping alpha at sqrt(2 / 1e-6) ~ 1414
VARIANCE_FLOOR = 1e-6

BAND = "band"
COEFF = "coeff"
GRANULARITIES = (BAND, COEFF)


@dataclass(frozen=True, eq=False)
class LaplacianModel:
    alpha_band: np.ndarray  # (16,)
    alpha_coeff: np.ndarray  # (16, band length)
    band_var: np.ndarray  # (16,)

    def alphas(self, granularity=COEFF):
        """Per-coefficient alpha, either fitted or broadcast from the band."""
        if granularity == COEFF:
            return self.alpha_coeff
        if granularity == BAND:
            return np.broadcast_to(self.alpha_band[:, None], self.alpha_coeff.shape)
        raise ValueError(f"unknown granularity {granularity!r}; expected one of {GRANULARITIES}")


def alpha_from_variance(variance):
    return np.sqrt(2.0 / np.maximum(variance, VARIANCE_FLOOR))


def fit(residual, shape=None):
    """Fit band- and coefficient-level Laplacian parameters to a residual.

    Args:
        residual (ndarray): real residual plane, same size as the frame
        shape (tuple): expected (height, width), checked when given

    Returns:
        model (LaplacianModel)

    """
    residual = np.asarray(residual, dtype=np.float64)
    if shape is not None and residual.shape != tuple(shape):
        raise DimensionMismatch(f"residual is {residual.shape}, expected {tuple(shape)}")
    coeffs = plane_to_bands(residual).bands

    band_var = coeffs.var(axis=1)
    alpha_band = alpha_from_variance(band_var)
    energy = coeffs * coeffs
    alpha_coeff = np.where(
        energy > band_var[:, None],
        alpha_from_variance(energy),
        alpha_band[:, None],
    )
    return LaplacianModel(alpha_band, alpha_coeff, band_var)
