"""Product quadrature on the unit 3-sphere and radial Gauss rules.

Hyperspherical coordinates x = (cos a, sin a cos b, sin a sin b cos c,
sin a sin b sin c) give the measure sin^2(a) sin(b) da db dc.  The a-integral
carries the Chebyshev weight sqrt(1 - t^2) and uses the Gauss-Chebyshev rule
of the second kind, the b-integral uses Gauss-Legendre, and the periodic
c-integral a uniform grid.  With n nodes per angle the rule integrates
polynomial integrands of total degree up to roughly 2n - 2 exactly, which is
what the independent cross-checks of the exact monomial integrals need.
"""

import numpy as np

__all__ = ["s3_quadrature", "radial_gauss"]


def s3_quadrature(n):
    """Nodes (m, 4) and weights (m,) integrating smooth functions over S^3.

    The weights sum to 2 pi^2, the sphere's total measure.
    """
    if n < 2:
        raise ValueError("need at least two nodes per angle")
    k = np.arange(1, n + 1)
    t = np.cos(k * np.pi / (n + 1))              # Chebyshev-U nodes, cos(a)
    wa = (np.pi / (n + 1)) * np.sin(k * np.pi / (n + 1)) ** 2
    u, wb = np.polynomial.legendre.leggauss(n)   # cos(b) nodes
    c = 2 * np.pi * np.arange(n) / n             # periodic angle
    wc = np.full(n, 2 * np.pi / n)

    sa = np.sqrt(1 - t ** 2)
    sb = np.sqrt(1 - u ** 2)
    pts = np.empty((n, n, n, 4))
    pts[..., 0] = t[:, None, None]
    pts[..., 1] = sa[:, None, None] * u[None, :, None]
    pts[..., 2] = sa[:, None, None] * sb[None, :, None] * np.cos(c)[None, None, :]
    pts[..., 3] = sa[:, None, None] * sb[None, :, None] * np.sin(c)[None, None, :]
    wts = wa[:, None, None] * wb[None, :, None] * wc[None, None, :]
    return pts.reshape(-1, 4), wts.reshape(-1)


def radial_gauss(a, b, n):
    """Gauss-Legendre nodes and weights on the interval [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    return mid + half * x, half * w
