"""Gaussian pointer state of the von Neumann meter."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation

_NORM = (2.0 / math.pi) ** 0.25


def pointer_profile(alpha, y):
    """G_alpha(y) = (2/pi)^(1/4) alpha^(1/2) exp(-alpha^2 y^2), unit L2 norm."""
    if not alpha > 0:
        raise ContractViolation("pointer alpha must be positive")
    y = np.asarray(y, dtype=float)
    return _NORM * math.sqrt(alpha) * np.exp(-(alpha * y) ** 2)


def pointer_spectrum(alpha, lam):
    """int G_alpha(y) exp(-i lam y) dy, in closed form (a real Gaussian in lam)."""
    if not alpha > 0:
        raise ContractViolation("pointer alpha must be positive")
    lam = np.asarray(lam, dtype=float)
    return _NORM * math.sqrt(math.pi / alpha) * np.exp(-((lam / (2.0 * alpha)) ** 2))


def alpha_for_accuracy(dy):
    """Pointer alpha whose reading uncertainty (std of |G_alpha|^2) equals ``dy``."""
    if not dy > 0:
        raise ContractViolation("accuracy must be positive")
    return 1.0 / (2.0 * dy)


@dataclass(frozen=True)
class GaussianPointer:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ContractViolation("pointer alpha must be positive")

    @property
    def accuracy(self):
        """Standard deviation of the reading distribution |G_alpha|^2."""
        return 1.0 / (2.0 * self.alpha)

    def __call__(self, y):
        return pointer_profile(self.alpha, y)

    def spectrum(self, lam):
        return pointer_spectrum(self.alpha, lam)
