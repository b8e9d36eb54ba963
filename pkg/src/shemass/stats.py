"""Monte Carlo estimators with jackknife standard errors.

All functions take samples along axis 0 (one row per path) and broadcast over
the remaining axes, so a ``(n_paths, n_times)`` table is handled in one call.
Leave-one-out estimates use closed forms; nothing here loops over paths.
"""

import numpy as np
from scipy.stats import norm

Z_TWO_SIDED_95 = float(norm.ppf(0.975))
Z_ONE_SIDED_95 = float(norm.ppf(0.95))


def _deviations(x):
    # shifting by the first row first makes identical samples give exact zeros
    a = x - x[:1]
    return a - a.mean(axis=0)


def mean_and_se(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n < 2:
        return mean, np.full_like(mean, np.nan)
    dev = _deviations(x)
    return mean, np.sqrt((dev * dev).sum(axis=0) / (n - 1)) / np.sqrt(n)


def sample_cov(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    a = _deviations(x)
    b = _deviations(y)
    return (a * b).sum(axis=0) / (n - 1)


def loo_cov(x, y):
    """Leave-one-out sample covariances, one row per left-out path.

    With a, b the deviations from the full means and S = sum(a b), dropping
    path i gives (S - n a_i b_i / (n - 1)) / (n - 2).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    a = _deviations(x)
    b = _deviations(y)
    s = (a * b).sum(axis=0)
    return (s - n * a * b / (n - 1)) / (n - 2)


def loo_mean(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    return (x.sum(axis=0) - x) / (n - 1)


def jackknife_se(replicates):
    r = np.asarray(replicates, dtype=float)
    n = r.shape[0]
    dev = _deviations(r)
    return np.sqrt((n - 1) / n * (dev * dev).sum(axis=0))


def cov_with_se(x, y):
    """Sample covariance and its jackknife standard error."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] < 3:
        c = sample_cov(x, y)
        return c, np.full_like(np.asarray(c, dtype=float), np.nan)
    return sample_cov(x, y), jackknife_se(loo_cov(x, y))


def cov_minus_mean_with_se(x, y, r):
    """``cov(x, y) - mean(r)`` with a jackknife SE that keeps their correlation."""
    x = np.asarray(x, dtype=float)
    diff = sample_cov(x, y) - np.asarray(r, dtype=float).mean(axis=0)
    if x.shape[0] < 3:
        return diff, np.full_like(np.asarray(diff, dtype=float), np.nan)
    return diff, jackknife_se(loo_cov(x, y) - loo_mean(r))
