"""
Invariant frames and exact calculus on the 3-sphere
===================================================

The sphere is the unit quaternions.  Multiplying by i, j, k on one side
gives a global orthonormal frame whose coframe satisfies

    d eta^1 = 2 eta^2 ^ eta^3      (and cyclic permutations),

and multiplying on the other side flips the sign.  Scalar functions are
polynomials on R^4 reduced modulo |x|^2 = 1, so derivatives, integrals and
the div/curl operators are all exact finite computations.
"""

import numpy as np

from sdforms import (
    PolyScalar,
    curl,
    div,
    frame_derivative,
    left_frame_at,
    left_invariant_coframe,
    right_frame_at,
    right_invariant_coframe,
    sphere_integral,
    star_d,
    structure_residual,
)

rng = np.random.default_rng(0)

# frames at a random point of the sphere
p = rng.standard_normal(4)
p /= np.linalg.norm(p)
print("point p                    :", np.round(p, 4))
print("left frame rows            :\n", np.round(left_frame_at(p), 4))
print("right frame rows           :\n", np.round(right_frame_at(p), 4))
print("structure residual (left)  :", structure_residual(p))
print("structure residual (right) :", structure_residual(p, frame="right"))

# the frame derivative of the first coordinate along e_1 is -x1
f = PolyScalar.coordinate(0)
print("\ne_1(x0) =", frame_derivative(f, 1))

# integrals are exact: the sphere has measure 2 pi^2, and x0^2 averages 1/4
print("integral of 1    :", sphere_integral(PolyScalar.constant(1.0)))
print("integral of x0^2 :", sphere_integral(PolyScalar({(2, 0, 0, 0): 1.0})))

# the invariant coframes are divergence-free curl eigenfields:
# curl(eta^1) = 0 (so *d eta^1 = 2 eta^1), curl(phi^1) = -4 phi^1
eta1 = left_invariant_coframe(1)
phi1 = right_invariant_coframe(1)
print("\ndiv eta^1        :", div(eta1))
print("curl eta^1       :", curl(eta1).alpha)
print("star_d eta^1     :", star_d(eta1).alpha, " (eigenvalue +2)")
print("div phi^1        :", div(phi1))
print("star_d phi^1 + 2 phi^1 components all zero:",
      all(not (star_d(phi1) + 2.0 * phi1).alpha[m].coeffs for m in range(3)),
      " (eigenvalue -2)")
