"""Independent reference values, computed without the package.

Run ``python tests/oracles/h3_closed_forms.py`` to regenerate the literals
frozen in the test modules.  Everything here uses Bessel-K closed forms on
three-dimensional hyperbolic space, Gamma-function c-functions and adaptive
quadrature from scipy.
"""

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, kv, loggamma

C0_H3 = 1 / (4 * math.pi**2)


def oscillatory_I_origin(s, t):
    tau = complex(s, -t)
    return 2 * kv(2, tau) / tau


def poisson_h3(tau, r, c0=C0_H3):
    if r == 0:
        return 2 * c0 * kv(2, tau) / tau
    w = np.sqrt(r * r + tau * tau)
    return 2 * c0 * tau * r * kv(2, w) / (w * w * np.sinh(r))


def _cquad(f, a, b, points=None):
    kw = dict(limit=2000, epsabs=0, epsrel=1e-11)
    if points:
        kw["points"] = points
    return quad(lambda s: f(s).real, a, b, **kw)[0] + 1j * quad(lambda s: f(s).imag, a, b, **kw)[0]


def wave_tilde0_h3(t, sigma, r):
    f = lambda s: s ** (sigma - 1) * poisson_h3(s - 1j * t, r)
    scale = np.exp(sigma**2 - loggamma(2 - sigma) - loggamma(sigma))
    return scale * _cquad(f, 0, 1, [t / 10, t, min(0.99, 10 * t)])


def wave_infty_h3(t, sigma, r):
    f = lambda s: s ** (sigma - 1) * poisson_h3(s - 1j * t, r)
    return _cquad(f, 1, 80) / gamma(sigma)


def hyperbolic_density(d, lam):
    """|c(lambda)|^-2 for H^d with a unit root: c = G(il) G(m) / (G(il + m/2) G(m/2)), m = d - 1."""
    m = d - 1
    logc = loggamma(1j * lam) + loggamma(m) - loggamma(1j * lam + m / 2) - loggamma(m / 2)
    return float(np.exp(-2 * logc.real))


if __name__ == "__main__":
    for s, t in [(0.1, 4.0), (1.0, 0.5), (0.5, -3.0)]:
        print("I", s, t, repr(oscillatory_I_origin(s, t)))
    for tau, r in [(0.5 - 0.5j, 1.0), (1.0, 0.3), (0.2 + 1j, 2.0)]:
        print("poisson", tau, r, repr(poisson_h3(tau, r)))
    print("tilde0", repr(wave_tilde0_h3(0.3, 2 + 1j, 0.01)))
    print("infty", repr(wave_infty_h3(8.0, 1.0, 0.0)))
    for d, lam in [(3, 0.7), (5, 2.0), (7, 1.3)]:
        print("density", d, lam, repr(hyperbolic_density(d, lam)))
