"""Total-mass covariance of stochastic heat equations sharing one white noise.

Modules:

* ``kernels``: heat and resolvent kernels, mutual beta-energy
* ``profiles``: sampled nonnegative initial data
* ``simulator``: finite-difference Monte Carlo for one or two coupled fields
* ``bounds``: analytic covariance bounds and decorrelation horizons
* ``experiments``: configured verification campaigns
* ``cli``: the ``shemass`` command
"""

from importlib.metadata import PackageNotFoundError, version as _dist_version

try:
    __version__ = _dist_version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"
