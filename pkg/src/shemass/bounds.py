"""Analytic covariance bounds and the decorrelation horizons built on them."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .kernels import DiffusionParams, mutual_energy

__all__ = [
    "BoundReport",
    "theorem_threshold",
    "theorem_prefactor",
    "theorem_bound",
    "optimize_beta",
    "corollary1_beta",
    "corollary1_exponent",
    "corollary1_bound",
    "default_delta_param",
    "corollary2_energy_bound",
    "pam_variance_budget",
]


def _nonneg(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be nonnegative and finite, got {value}")


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value}")


def theorem_threshold(lip1, lip2, theta):
    """Smallest excluded beta: the bound needs beta > (lip1 lip2)^2 / (4 theta)."""
    _nonneg("lip1", lip1)
    _nonneg("lip2", lip2)
    _positive("theta", theta)
    return (lip1 * lip2) ** 2 / (4 * theta)


def theorem_prefactor(beta, lip1, lip2, theta):
    """``2 sqrt(beta theta) L1 L2 / (2 sqrt(beta theta) - L1 L2)``."""
    threshold = theorem_threshold(lip1, lip2, theta)
    _positive("beta", beta)
    if not beta > threshold:
        raise DomainError(
            f"beta={beta} is not admissible: need beta > (lip1*lip2)^2/(4*theta) = {threshold:.6g}")
    root = 2 * math.sqrt(beta * theta)
    return root * lip1 * lip2 / (root - lip1 * lip2)


@dataclass(frozen=True)
class BoundReport:
    beta: float
    t: float
    lip1: float
    lip2: float
    theta: float
    energy: float
    bound_value: float
    admissible: bool
    energy_error: float = 0.0
    # for optimize_beta: "interior", "lower_endpoint", "upper_endpoint" or "single_point"
    position: str | None = None

    def to_dict(self):
        return asdict(self)


def theorem_bound(beta, t, lip1, lip2, theta, energy, energy_error=0.0):
    """Covariance bound ``prefactor * exp(beta t) * energy``."""
    _nonneg("t", t)
    _nonneg("energy", energy)
    prefactor = theorem_prefactor(beta, lip1, lip2, theta)
    value = prefactor * math.exp(beta * t) * energy if energy > 0 else 0.0
    return BoundReport(float(beta), float(t), float(lip1), float(lip2), float(theta),
                       float(energy), value, True, float(energy_error))


def optimize_beta(t, lip1, lip2, theta, u0, v0, beta_grid, route="real-space"):
    """Scan ``beta_grid`` for the smallest theorem bound.

    The energy is recomputed for each candidate.  Ties keep the first minimum.
    """
    grid = sorted(float(b) for b in beta_grid)
    if not grid:
        raise DomainError("beta grid is empty")
    threshold = theorem_threshold(lip1, lip2, theta)
    bad = [b for b in grid if not b > threshold]
    if bad:
        raise DomainError(f"beta grid has inadmissible values {bad}; need beta > {threshold:.6g}")
    params = DiffusionParams(theta)
    reports = []
    for b in grid:
        e = mutual_energy(u0, v0, b, params, route=route)
        reports.append(theorem_bound(b, t, lip1, lip2, theta, e.value, e.quadrature_error_estimate))
    i = int(np.argmin([r.bound_value for r in reports]))
    if len(grid) == 1:
        pos = "single_point"
    elif i == 0:
        pos = "lower_endpoint"
    elif i == len(grid) - 1:
        pos = "upper_endpoint"
    else:
        pos = "interior"
    best = reports[i]
    return BoundReport(**{**best.to_dict(), "position": pos})


def default_delta_param(theta):
    """``1 / (4 theta)``: minimizes the exponent, which becomes ``-Delta^2 / (4 theta t)``."""
    _positive("theta", theta)
    return 1.0 / (4 * theta)


def corollary1_beta(t, separation, delta_param):
    return delta_param * (separation / t) ** 2


def corollary1_exponent(t, separation, theta, delta_param):
    """``beta t - separation sqrt(beta / theta)`` at ``beta = delta_param (separation / t)^2``."""
    beta = corollary1_beta(t, separation, delta_param)
    return beta * t - separation * math.sqrt(beta / theta)


def corollary1_bound(t, separation, lip1, lip2, theta, l1_u0, l1_v0, delta_param=None):
    """Covariance bound for data whose supports are ``separation`` apart.

    ``K exp(beta t - separation sqrt(beta/theta)) / (2 sqrt(beta theta) - lip1 lip2)``
    with ``K = lip1 lip2 |u0|_1 |v0|_1`` and ``beta = delta_param (separation/t)^2``.
    """
    _positive("t", t)
    _positive("separation", separation)
    _nonneg("l1_u0", l1_u0)
    _nonneg("l1_v0", l1_v0)
    if delta_param is None:
        delta_param = default_delta_param(theta)
    _positive("delta_param", delta_param)
    beta = corollary1_beta(t, separation, delta_param)
    threshold = theorem_threshold(lip1, lip2, theta)
    if not beta > threshold:
        raise DomainError(
            f"induced beta={beta:.6g} is not above {threshold:.6g}; "
            "use a larger delta_param or a smaller t")
    k = lip1 * lip2 * l1_u0 * l1_v0
    if k == 0:
        return 0.0
    exponent = corollary1_exponent(t, separation, theta, delta_param)
    return k * math.exp(exponent) / (2 * math.sqrt(beta * theta) - lip1 * lip2)


def corollary2_energy_bound(beta, l1_u0, l1_v0, overlap_measure):
    """``l1_u0 l1_v0 overlap / (2 pi beta)``, an upper bound for the mutual energy."""
    _positive("beta", beta)
    _nonneg("l1_u0", l1_u0)
    _nonneg("l1_v0", l1_v0)
    _nonneg("overlap_measure", overlap_measure)
    return l1_u0 * l1_v0 * overlap_measure / (2 * math.pi * beta)


def pam_variance_budget(beta, t, lip, theta, linf_u0, mean_mass):
    """Ceiling on the variance of the total mass when both fields coincide.

    ``prefactor(beta, lip, lip) exp(beta t) |u0|_inf mean_mass / beta``.
    """
    _nonneg("t", t)
    _nonneg("linf_u0", linf_u0)
    _nonneg("mean_mass", mean_mass)
    prefactor = theorem_prefactor(beta, lip, lip, theta)
    return prefactor * math.exp(beta * t) * linf_u0 * mean_mass / beta
