"""Evolution of divergence-free 1-form fields on the 3-sphere.

The first-order system div(eta) = 0, d eta/du = curl(eta) (u the logarithm
of the radial variable) propagates each *d eigenfield by the factor
(t/t0)^(lambda - 2).  Two independent integration paths are provided and
cross-checked against each other:

* :func:`propagate` applies the exact per-mode power law to a spectral
  expansion of the initial field;
* :func:`evolve_ode` integrates the coefficient ODE with a classical
  fourth-order Runge-Kutta scheme, never using the spectral decomposition.

Initial fields can be read from a JSON file holding a list of records
``{"monomial": [e0, e1, e2, e3], "axis": i, "coefficient": c}`` with 1-based
frame axis; the monomial exponents refer to the canonical reduced basis.
"""

import json
from dataclasses import dataclass

import numpy as np

from .polys import (
    CoframeField,
    PolyScalar,
    coframe_inner,
    div,
    make_basis,
    operator_matrix,
    sphere_integral,
)

__all__ = [
    "ModeExpansion",
    "decompose_initial",
    "propagate",
    "evolve_ode",
    "div_residual",
    "load_initial_field",
    "dump_initial_field",
]

DIV_TOL = 1e-8


def div_residual(eta):
    """L^2 norm of div(eta) over the sphere."""
    d = div(eta)
    return float(np.sqrt(max(sphere_integral(d * d), 0.0)))


@dataclass
class ModeExpansion:
    """Spectral expansion sum_m C_m eta_m of a divergence-free field."""

    terms: list  # (SpectralMode, coefficient) pairs
    t0: float = 1.0
    residual: float = 0.0  # L^2 distance between the input and the expansion

    def field(self):
        out = CoframeField.zero()
        for mode, c in self.terms:
            if c:
                out = out + c * mode.field
        return out


def decompose_initial(eta0, modes, drop_tol=1e-13):
    """Expand a divergence-free field over Gram-orthonormal eigenfields.

    Coefficients are the L^2 pairings <eta0, eta_m>.  The reconstruction
    residual is reported on the returned expansion; it vanishes whenever
    eta0 lies in the degree window spanned by the modes.  Fields that are
    not divergence-free are rejected.
    """
    r = div_residual(eta0)
    if r > DIV_TOL:
        raise ValueError(f"initial field is not divergence-free (residual {r:.3e})")
    terms = []
    recon = CoframeField.zero()
    for mode in modes:
        c = float(coframe_inner(eta0, mode.field))
        if abs(c) > drop_tol:
            terms.append((mode, c))
            recon = recon + c * mode.field
    diff = eta0.as_float() - recon
    residual = float(np.sqrt(max(sphere_integral(diff.norm_sq_poly()), 0.0)))
    return ModeExpansion(terms=terms, t0=1.0, residual=residual)


def propagate(expansion, t):
    """Exact solution at radius t: sum_m C_m (t/t0)^(lambda_m - 2) eta_m."""
    if t <= 0:
        raise ValueError(f"the evolution lives on t > 0, got t = {t}")
    out = CoframeField.zero()
    for mode, c in expansion.terms:
        factor = c * (t / expansion.t0) ** (mode.lam_int - 2)
        if factor:
            out = out + factor * mode.field
    return out


def evolve_ode(eta0, u0, u1, steps):
    """Fourth-order Runge-Kutta integration of d eta/du = curl(eta).

    Runs in the polynomial coefficient space at the degree of eta0; the curl
    operator does not raise the degree, so the truncation is exact.  The
    divergence constraint is preserved along the flow.
    """
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps}")
    r = div_residual(eta0)
    if r > DIV_TOL:
        raise ValueError(f"initial field is not divergence-free (residual {r:.3e})")
    D = eta0.degree
    basis = make_basis(D)
    C = operator_matrix("curl", D).matrix
    y = basis.coframe_to_vector(eta0.as_float())
    h = (u1 - u0) / steps
    for _ in range(steps):
        k1 = C @ y
        k2 = C @ (y + 0.5 * h * k1)
        k3 = C @ (y + 0.5 * h * k2)
        k4 = C @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return basis.coframe_from_vector(y)


def load_initial_field(source):
    """Read a coframe field from the JSON initial-data format.

    ``source`` is a path, file object, or already-parsed list of records
    {"monomial": [e0, e1, e2, e3], "axis": i, "coefficient": c}.
    """
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            records = json.load(fh)
    elif hasattr(source, "read"):
        records = json.load(source)
    else:
        records = source
    comps = [PolyScalar.zero(), PolyScalar.zero(), PolyScalar.zero()]
    for rec in records:
        e = tuple(int(v) for v in rec["monomial"])
        if len(e) != 4 or any(v < 0 for v in e):
            raise ValueError(f"bad monomial multi-index {rec['monomial']!r}")
        axis = int(rec["axis"])
        if axis not in (1, 2, 3):
            raise ValueError(f"frame axis must be 1, 2 or 3, got {axis}")
        c = float(rec["coefficient"])
        comps[axis - 1] = comps[axis - 1] + PolyScalar({e: c})
    return CoframeField(tuple(comps))


def dump_initial_field(eta, path=None):
    """Inverse of :func:`load_initial_field`; returns the record list."""
    records = []
    for axis in (1, 2, 3):
        for e, c in sorted(eta.alpha[axis - 1].coeffs.items()):
            records.append({"monomial": list(e), "axis": axis,
                            "coefficient": float(c)})
    if path is not None:
        with open(path, "w") as fh:
            json.dump(records, fh, indent=1)
    return records
