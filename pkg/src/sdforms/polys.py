"""Exact calculus on the 3-sphere in a finite polynomial model.

Scalar functions on the sphere are polynomials on R^4 taken modulo
(x0^2 + x1^2 + x2^2 + x3^2 - 1).  The canonical representative substitutes
x3^2 -> 1 - x0^2 - x1^2 - x2^2 until every monomial has x3-exponent at most
one; the reduced monomials of total degree <= D then form a basis of
dimension sum_{d<=D} (d+1)^2.

Frame derivatives, divergence, curl and the first-order operator *d all act
degree-non-increasingly on this model, so every operator is realized as an
exact finite matrix.  Coefficients live either in 64-bit floats or in exact
rationals (``fractions.Fraction``); the integral of a monomial over the
sphere is a rational multiple of pi^2 in both cases.

Coframe fields eta = a_i eta^i are triples of such polynomials in the frame
of :mod:`sdforms.frames`; axis labels are 1-based to match eta^1, eta^2,
eta^3.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, pi

import numpy as np

from .frames import LEFT_MULT, RIGHT_MULT, LEVI_CIVITA

__all__ = [
    "PolyScalar",
    "CoframeField",
    "PolyBasis",
    "OperatorMatrix",
    "make_basis",
    "frame_derivative",
    "monomial_integral_over_pi2",
    "sphere_integral",
    "l2_inner",
    "div",
    "curl",
    "star_d",
    "coframe_inner",
    "operator_matrix",
    "coframe_gram",
    "left_invariant_coframe",
    "right_invariant_coframe",
    "gradient_coframe",
]


def _reduced(coeffs):
    """Substitute x3^2 -> 1 - x0^2 - x1^2 - x2^2 until canonical."""
    out = {}
    stack = list(coeffs.items())
    while stack:
        e, c = stack.pop()
        if not c:
            continue
        if e[3] >= 2:
            base = (e[0], e[1], e[2], e[3] - 2)
            stack.append((base, c))
            stack.append(((base[0] + 2, base[1], base[2], base[3]), -c))
            stack.append(((base[0], base[1] + 2, base[2], base[3]), -c))
            stack.append(((base[0], base[1], base[2] + 2, base[3]), -c))
        else:
            acc = out.get(e)
            acc = c if acc is None else acc + c
            if acc:
                out[e] = acc
            elif e in out:
                del out[e]
    return out


class PolyScalar:
    """Polynomial on R^4 modulo (|x|^2 - 1), kept in canonical reduced form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = _reduced(coeffs or {})

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def coordinate(cls, nu, ring="float"):
        one = Fraction(1) if ring == "exact" else 1.0
        e = [0, 0, 0, 0]
        e[nu] = 1
        return cls({tuple(e): one})

    @property
    def degree(self):
        return max((sum(e) for e in self.coeffs), default=0)

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc = out.get(e)
            out[e] = c if acc is None else acc + c
        return PolyScalar(out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc = out.get(e)
            out[e] = -c if acc is None else acc - c
        return PolyScalar(out)

    def __neg__(self):
        return PolyScalar({e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, PolyScalar):
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                    acc = out.get(e)
                    out[e] = c1 * c2 if acc is None else acc + c1 * c2
            return PolyScalar(out)
        return PolyScalar({e: c * other for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def as_float(self):
        return PolyScalar({e: float(c) for e, c in self.coeffs.items()})

    def as_exact(self):
        return PolyScalar({e: Fraction(c) for e, c in self.coeffs.items()})

    def __call__(self, x):
        """Evaluate at points x of shape (..., 4)."""
        x = np.asarray(x, dtype=float)
        val = np.zeros(x.shape[:-1])
        for e, c in self.coeffs.items():
            term = float(c) * np.ones(x.shape[:-1])
            for nu in range(4):
                if e[nu]:
                    term = term * x[..., nu] ** e[nu]
            val += term
        return val

    def __eq__(self, other):
        return isinstance(other, PolyScalar) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "PolyScalar(0)"
        terms = sorted(self.coeffs.items(), key=lambda ec: (sum(ec[0]), ec[0]))
        body = " + ".join(f"{c}*x^{e}" for e, c in terms)
        return f"PolyScalar({body})"


def _axis_index(axis):
    if axis not in (1, 2, 3):
        raise ValueError(f"frame axis must be 1, 2 or 3, got {axis!r}")
    return axis - 1


def frame_derivative(f, axis):
    """Derivative e_axis(f) along the frame field generated by e_hat_axis.

    The generating field is linear, X(x) = L x with L antisymmetric, so the
    derivative of a polynomial is again a polynomial of no higher degree and
    the result is exact in both coefficient rings.
    """
    m = _axis_index(axis)
    out = {}
    for e, c in f.coeffs.items():
        for nu in range(4):
            if not e[nu]:
                continue
            for mu in range(4):
                a = LEFT_MULT[m][nu, mu]
                if not a:
                    continue
                ee = list(e)
                ee[nu] -= 1
                ee[mu] += 1
                ee = tuple(ee)
                term = c * e[nu] * (int(a) if not isinstance(c, float) else a)
                acc = out.get(ee)
                out[ee] = term if acc is None else acc + term
    return PolyScalar(out)


def monomial_integral_over_pi2(e):
    """Integral of x^e over the unit 3-sphere, divided by pi^2, as a Fraction.

    Vanishes if any exponent is odd; the total measure is 2*pi^2.
    """
    if any(k % 2 for k in e):
        return Fraction(0)
    m = [k // 2 for k in e]
    num = 1
    den = 1
    for mi in m:
        num *= factorial(2 * mi)
        den *= 4 ** mi * factorial(mi)
    return Fraction(2 * num, den * factorial(sum(m) + 1))


def sphere_integral(f, over_pi2=False):
    """Integral of f over the unit 3-sphere.

    With ``over_pi2`` the exact rational coefficient of pi^2 is returned
    (a Fraction when f has Fraction coefficients); otherwise a float.
    """
    total = Fraction(0)
    exact = True
    acc = 0.0
    for e, c in f.coeffs.items():
        w = monomial_integral_over_pi2(e)
        if isinstance(c, float):
            exact = False
            acc += c * float(w)
        else:
            total += c * w
    if over_pi2:
        return total if exact else acc + float(total)
    return (float(total) + acc) * pi * pi


def l2_inner(f, g, over_pi2=False):
    """L^2 inner product of two scalars over the sphere."""
    return sphere_integral(f * g, over_pi2=over_pi2)


@dataclass(frozen=True)
class CoframeField:
    """A 1-form a_1 eta^1 + a_2 eta^2 + a_3 eta^3 with polynomial coefficients."""

    alpha: tuple

    def __post_init__(self):
        if len(self.alpha) != 3:
            raise ValueError("a coframe field needs exactly three components")

    @classmethod
    def zero(cls):
        z = PolyScalar.zero()
        return cls((z, z, z))

    @classmethod
    def constant(cls, triple, ring="float"):
        conv = Fraction if ring == "exact" else float
        return cls(tuple(PolyScalar.constant(conv(c)) if c else PolyScalar.zero()
                         for c in triple))

    def component(self, axis):
        return self.alpha[_axis_index(axis)]

    @property
    def degree(self):
        return max(a.degree for a in self.alpha)

    def __add__(self, other):
        return CoframeField(tuple(a + b for a, b in zip(self.alpha, other.alpha)))

    def __sub__(self, other):
        return CoframeField(tuple(a - b for a, b in zip(self.alpha, other.alpha)))

    def __mul__(self, scalar):
        return CoframeField(tuple(a * scalar for a in self.alpha))

    __rmul__ = __mul__

    def as_float(self):
        return CoframeField(tuple(a.as_float() for a in self.alpha))

    def evaluate(self, x):
        """Frame components at points x of shape (..., 4); returns (..., 3)."""
        return np.stack([a(x) for a in self.alpha], axis=-1)

    def norm_sq_poly(self):
        """Pointwise squared norm sum_i a_i^2 as a PolyScalar."""
        out = PolyScalar.zero()
        for a in self.alpha:
            out = out + a * a
        return out

    def l2_norm(self):
        return float(np.sqrt(max(sphere_integral(self.norm_sq_poly()), 0.0)))


def div(eta):
    """Divergence sum_i e_i(a_i); equals *d* eta on the round sphere."""
    out = PolyScalar.zero()
    for m in range(3):
        out = out + frame_derivative(eta.alpha[m], m + 1)
    return out


def curl(eta):
    """Frame-component curl, (curl eta)^k = eps_{kij} e_i(a_j).

    Identically equal to *d eta - 2 eta; the constant shift comes from the
    structure equation d eta^i = 2 eta^j ^ eta^k.
    """
    comps = []
    for k in range(3):
        acc = PolyScalar.zero()
        for i in range(3):
            for j in range(3):
                s = LEVI_CIVITA[k, i, j]
                if s:
                    term = frame_derivative(eta.alpha[j], i + 1)
                    acc = acc + (term if s > 0 else -term)
        comps.append(acc)
    return CoframeField(tuple(comps))


def star_d(eta):
    """The operator *d on 1-forms, star_d = curl + 2*id."""
    c = curl(eta)
    two = Fraction(2) if any(
        not isinstance(v, float) for a in eta.alpha for v in a.coeffs.values()
    ) else 2.0
    return CoframeField(tuple(ck + two * ak for ck, ak in zip(c.alpha, eta.alpha)))


def coframe_inner(eta, xi, over_pi2=False):
    """L^2 inner product of two coframe fields (frame-orthonormal metric)."""
    total = PolyScalar.zero()
    for a, b in zip(eta.alpha, xi.alpha):
        total = total + a * b
    return sphere_integral(total, over_pi2=over_pi2)


def left_invariant_coframe(axis, ring="float"):
    """The constant field eta^axis, a *d eigenfield with eigenvalue +2."""
    triple = [0, 0, 0]
    triple[_axis_index(axis)] = 1
    return CoframeField.constant(triple, ring=ring)


def right_invariant_coframe(axis, ring="float"):
    """The right-frame covector phi^axis written in left-frame components.

    Its coefficients are the quadratic polynomials <x * e_hat_axis, e_hat_i * x>;
    these fields are *d eigenfields with eigenvalue -2 and unit pointwise norm.
    """
    m = _axis_index(axis)
    comps = []
    for i in range(3):
        Q = RIGHT_MULT[m].T @ LEFT_MULT[i]
        coeffs = {}
        for a in range(4):
            for b in range(4):
                v = Q[a, b]
                if not v:
                    continue
                e = [0, 0, 0, 0]
                e[a] += 1
                e[b] += 1
                e = tuple(e)
                w = Fraction(int(v)) if ring == "exact" else float(v)
                acc = coeffs.get(e)
                coeffs[e] = w if acc is None else acc + w
        comps.append(PolyScalar(coeffs))
    return CoframeField(tuple(comps))


def gradient_coframe(f):
    """df in frame components, a_i = e_i(f)."""
    return CoframeField(tuple(frame_derivative(f, i) for i in (1, 2, 3)))


def _reduced_monomials(D):
    out = []
    for d in range(D + 1):
        for e0 in range(d, -1, -1):
            for e1 in range(d - e0, -1, -1):
                for e2 in range(d - e0 - e1, -1, -1):
                    e3 = d - e0 - e1 - e2
                    if e3 <= 1:
                        out.append((e0, e1, e2, e3))
    return out


class PolyBasis:
    """Reduced-monomial basis of the degree <= D polynomial model of the sphere."""

    def __init__(self, D):
        if D < 0:
            raise ValueError(f"degree bound must be >= 0, got {D}")
        self.D = D
        self.monomials = _reduced_monomials(D)
        self.index = {e: k for k, e in enumerate(self.monomials)}
        self.dim = len(self.monomials)

    def to_vector(self, f, ring="float"):
        if ring == "exact":
            v = [Fraction(0)] * self.dim
        else:
            v = np.zeros(self.dim)
        for e, c in f.coeffs.items():
            k = self.index.get(e)
            if k is None:
                raise ValueError(f"monomial {e} outside degree-{self.D} basis")
            v[k] = Fraction(c) if ring == "exact" else float(c)
        return v

    def from_vector(self, v):
        return PolyScalar({self.monomials[k]: c for k, c in enumerate(v) if c})

    def coframe_to_vector(self, eta, ring="float"):
        parts = [self.to_vector(a, ring=ring) for a in eta.alpha]
        if ring == "exact":
            return parts[0] + parts[1] + parts[2]
        return np.concatenate(parts)

    def coframe_from_vector(self, v):
        n = self.dim
        return CoframeField(tuple(self.from_vector(v[m * n:(m + 1) * n]) for m in range(3)))

    def gram_over_pi2(self):
        """Exact scalar Gram matrix, entries in units of pi^2."""
        G = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for a in range(self.dim):
            ea = self.monomials[a]
            for b in range(a, self.dim):
                eb = self.monomials[b]
                w = monomial_integral_over_pi2(tuple(i + j for i, j in zip(ea, eb)))
                G[a][b] = G[b][a] = w
        return G

    def gram(self):
        """Scalar Gram matrix as floats, actual integrals including pi^2."""
        G = self.gram_over_pi2()
        return np.array([[float(w) for w in row] for row in G]) * pi * pi


@lru_cache(maxsize=8)
def make_basis(D):
    """Basis descriptor for polynomials of degree <= D on the sphere."""
    return PolyBasis(D)


@lru_cache(maxsize=8)
def _derivative_matrices(D):
    """The three N x N frame-derivative matrices on the reduced basis (floats)."""
    basis = make_basis(D)
    n = basis.dim
    mats = []
    for axis in (1, 2, 3):
        M = np.zeros((n, n))
        for col, e in enumerate(basis.monomials):
            df = frame_derivative(PolyScalar({e: 1.0}), axis)
            M[:, col] = basis.to_vector(df)
        mats.append(M)
    return mats


@dataclass
class OperatorMatrix:
    """Dense matrix of an operator between coframe/scalar polynomial spaces."""

    matrix: np.ndarray
    domain: str
    codomain: str
    degree: int
    gram: np.ndarray

    def to_json(self):
        return {
            "domain": self.domain,
            "codomain": self.codomain,
            "degree": self.degree,
            "shape": list(self.matrix.shape),
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }


def _div_matrix(D):
    mats = _derivative_matrices(D)
    return np.hstack(mats)


def _curl_matrix(D):
    mats = _derivative_matrices(D)
    n = make_basis(D).dim
    M = np.zeros((3 * n, 3 * n))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                s = LEVI_CIVITA[k, i, j]
                if s:
                    M[k * n:(k + 1) * n, j * n:(j + 1) * n] += s * mats[i]
    return M


def coframe_gram(D):
    """Gram matrix of the coframe basis (block-diagonal scalar Gram)."""
    return np.kron(np.eye(3), make_basis(D).gram())


def operator_matrix(kind, D):
    """Matrix of div, curl or star_d on the degree <= D coframe space.

    Columns follow the coframe vectorization: component-major order over the
    reduced monomial basis.  The attached Gram matrix is that of the domain.
    """
    if D < 0:
        raise ValueError(f"degree bound must be >= 0, got {D}")
    n = make_basis(D).dim
    gram = coframe_gram(D)
    if kind == "div":
        return OperatorMatrix(_div_matrix(D), "coframe", "scalar", D, gram)
    if kind == "curl":
        return OperatorMatrix(_curl_matrix(D), "coframe", "coframe", D, gram)
    if kind == "star_d":
        return OperatorMatrix(_curl_matrix(D) + 2.0 * np.eye(3 * n),
                              "coframe", "coframe", D, gram)
    raise ValueError(f"unknown operator kind {kind!r}")
