"""Numerical toolkit for space-time Volterra equations driven by Levy noise.

Subpackages:

* :mod:`lvx.levy` -- noise characteristics, jump-moment functionals, sampling
* :mod:`lvx.kernels` -- evaluable Volterra kernels and their Lp functionals
* :mod:`lvx.volterra` -- deterministic Picard solver and moment bounds
* :mod:`lvx.wellposedness` -- mechanized existence/stability condition checks
* :mod:`lvx.simulator` -- Monte Carlo path simulation and statistical probes
* :mod:`lvx.cli` -- batch front-end (``lvx`` executable)
"""

__version__ = "0.1.0"
