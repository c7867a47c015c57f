"""Torsion and eigenvalue bounds computed from the inner parallel profile alone."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon, InnerParallelProfile, inner_profile, profile_integral


@dataclass(frozen=True)
class BoundValues:
    web_torsion: float
    makai_torsion_upper: float
    polya_lambda_upper: float

    def to_dict(self) -> dict:
        return {
            "web_torsion": self.web_torsion,
            "makai_torsion_upper": self.makai_torsion_upper,
            "polya_lambda_upper": self.polya_lambda_upper,
        }


def web_torsion_lower(profile: InnerParallelProfile) -> float:
    """Torsion quotient of the best web function, ``int_0^R mu^2 / P dt``; a lower bound for T."""
    return profile_integral(profile, "mu2_over_per")


def makai_torsion_upper(profile: InnerParallelProfile) -> float:
    """``int_Omega d(x)^2 dx = int_0^R t^2 P(t) dt``; an upper bound for T in the plane."""
    return profile_integral(profile, "t2_per")


def polya_lambda_upper(profile: InnerParallelProfile) -> float:
    """Rayleigh quotient of ``cos(pi mu(d(x)) / (2 |Omega|))``, an upper bound for lambda.

    By the coarea formula the denominator is ``|Omega| / 2`` exactly, leaving
    ``pi^2 / (2 |Omega|^3) * int_0^R sin^2(pi mu / (2 |Omega|)) P^3 dt``.
    """
    omega = profile.area
    k = math.pi / (2.0 * omega)

    def integrand(t, mu, per):
        return np.sin(k * mu) ** 2 * per**3

    return math.pi**2 / (2.0 * omega**3) * profile_integral(profile, integrand)


def compute_bounds(shape: ConvexPolygon | InnerParallelProfile, n_samples: int = 512) -> BoundValues:
    profile = shape if isinstance(shape, InnerParallelProfile) else inner_profile(shape, n_samples)
    return BoundValues(
        web_torsion_lower(profile),
        makai_torsion_upper(profile),
        polya_lambda_upper(profile),
    )
