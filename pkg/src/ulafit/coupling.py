"""B-banded mutual-coupling model and the coupling-leakage metric."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# Phase decrement between successive coupling coefficients.  The magnitude
# law |c_a| = |c_1| / a fixes only magnitudes; the phase rotation is the
# conventional experimental choice.
PHASE_DECAY = math.pi / 8

DEFAULT_C1 = 0.5 * cmath.exp(1j * math.pi / 3)
DEFAULT_BAND = 100


@dataclass(frozen=True)
class CouplingModel:
    """Banded coupling coefficients ``c_a = c_1 * exp(-j (a-1) pi/8) / a``.

    ``c_0 = 1``; coefficients vanish beyond the band ``B``.  The magnitude
    decay satisfies ``|c_g / c_h| = h / g`` for all g, h in the band.
    """

    c1: complex = DEFAULT_C1
    band: int = DEFAULT_BAND

    def __post_init__(self):
        mag = abs(self.c1)
        if not 0.0 < mag < 1.0:
            raise ValueError(f"|c1| must lie in (0, 1), got {mag}")
        if self.band < 0:
            raise ValueError(f"band must be >= 0, got {self.band}")

    def coefficient(self, a: int) -> complex:
        """Coupling coefficient for sensor separation ``a`` grid units."""
        if a < 0:
            raise ValueError(f"separation must be >= 0, got {a}")
        if a == 0:
            return 1.0 + 0.0j
        if a > self.band:
            return 0.0 + 0.0j
        return self.c1 * cmath.exp(-1j * (a - 1) * PHASE_DECAY) / a


def coupling_matrix(positions, model: CouplingModel) -> np.ndarray:
    """Coupling matrix with entries ``c_{|p_i - p_j|}`` inside the band.

    The entry depends only on the separation, so the matrix is complex
    symmetric with a unit diagonal.
    """
    pos = np.asarray(sorted(positions), dtype=np.int64)
    seps = np.abs(pos[:, None] - pos[None, :])
    table = np.array([model.coefficient(a) for a in range(int(seps.max()) + 1)],
                     dtype=np.complex128)
    return table[seps]


def coupling_leakage(matrix: np.ndarray) -> float:
    """Off-diagonal Frobenius energy ratio ``||C - diag C||_F / ||C||_F``."""
    c = np.asarray(matrix)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {c.shape}")
    off = c - np.diag(np.diag(c))
    return float(np.linalg.norm(off) / np.linalg.norm(c))
