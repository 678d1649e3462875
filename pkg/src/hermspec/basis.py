"""Tensor Hermite basis on R^d: enumeration, evaluation, derivatives, eigenvalues.

The one-dimensional functions phi_k are the orthonormal eigenfunctions of
-d^2/dt^2 + t^2 with eigenvalue 2k+1.  They are evaluated with the stable
forward recurrence

    phi_0(t)     = pi^(-1/4) exp(-t^2/2)
    phi_{k+1}(t) = sqrt(2/(k+1)) t phi_k(t) - sqrt(k/(k+1)) phi_{k-1}(t),

which also provides the entire extension for complex arguments.  The tensor
basis Phi_alpha(x) = prod_j phi_{alpha_j}(x_j) is indexed by multi-indices of
total degree at most N, enumerated in graded lexicographic order.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import InputError

_PI_QUARTER = math.pi ** -0.25


def multi_indices(d, max_degree):
    """All alpha in N_0^d with |alpha| <= max_degree, graded lex order."""
    if d < 1 or max_degree < 0:
        raise InputError(f"need d >= 1 and max_degree >= 0, got d={d}, N={max_degree}")
    out = []
    for n in range(max_degree + 1):
        out.extend(_compositions(n, d))
    return out


def _compositions(n, d):
    """Weak compositions of n into d parts, lexicographically increasing."""
    if d == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        out.extend((first,) + rest for rest in _compositions(n - first, d - 1))
    return out


@dataclass(frozen=True)
class BasisIndexSet:
    """Ordered enumeration of the multi-indices spanning degree <= N in dimension d."""

    dimension: int
    max_degree: int
    indices: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(multi_indices(self.dimension, self.max_degree)))

    @property
    def size(self):
        return len(self.indices)

    @lru_cache(maxsize=None)
    def _positions(self):
        return {alpha: i for i, alpha in enumerate(self.indices)}

    def position(self, alpha):
        return self._positions()[tuple(alpha)]

    def degrees(self):
        return np.array([sum(a) for a in self.indices])

    def semigroup_eigenvalues(self):
        """Eigenvalues 2|alpha| + d of -Delta + |x|^2 in enumeration order."""
        return 2.0 * self.degrees() + self.dimension


def semigroup_eigenvalue(alpha):
    """Eigenvalue 2|alpha| + d of -Delta + |x|^2 on Phi_alpha (d = len(alpha))."""
    alpha = tuple(alpha)
    return 2 * sum(alpha) + len(alpha)


def eval_phi_table(kmax, t):
    """Values of phi_0..phi_kmax at the points t; shape t.shape + (kmax+1,)."""
    t = np.asarray(t)
    if not np.all(np.isfinite(t)):
        raise InputError("non-finite evaluation point")
    dtype = complex if np.iscomplexobj(t) else float
    out = np.empty(t.shape + (kmax + 1,), dtype=dtype)
    out[..., 0] = _PI_QUARTER * np.exp(-0.5 * t * t)
    if kmax >= 1:
        out[..., 1] = math.sqrt(2.0) * t * out[..., 0]
    for k in range(1, kmax):
        out[..., k + 1] = (
            math.sqrt(2.0 / (k + 1)) * t * out[..., k]
            - math.sqrt(k / (k + 1.0)) * out[..., k - 1]
        )
    return out


def eval_phi(k, t):
    """k-th Hermite function at a real or complex scalar (or array) t."""
    if k < 0:
        raise InputError(f"degree must be non-negative, got {k}")
    table = eval_phi_table(k, t)
    return table[..., k]


def eval_Phi(alpha, x):
    """Tensor Hermite function Phi_alpha at the point(s) x.

    x may be a single d-vector or an (n, d) array of points.
    """
    alpha = tuple(alpha)
    x = np.asarray(x)
    if x.ndim == 1:
        if x.shape[0] != len(alpha):
            raise InputError(f"point has dimension {x.shape[0]}, index has {len(alpha)}")
        vals = [eval_phi(alpha[j], x[j]) for j in range(len(alpha))]
        return math.prod(vals) if not np.iscomplexobj(x) else np.prod(vals)
    if x.shape[1] != len(alpha):
        raise InputError(f"points have dimension {x.shape[1]}, index has {len(alpha)}")
    out = np.ones(x.shape[0], dtype=complex if np.iscomplexobj(x) else float)
    for j, aj in enumerate(alpha):
        out = out * eval_phi(aj, x[:, j])
    return out


@dataclass
class HermiteVector:
    """An element of E_N given by its coefficients in the orthonormal tensor basis."""

    basis: BasisIndexSet
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise InputError(
                f"coefficient vector has length {self.coeffs.shape}, basis has {self.basis.size}"
            )

    def norm2(self):
        """Squared L^2(R^d) norm (orthonormality)."""
        return float(self.coeffs @ self.coeffs)

    def evaluate(self, points):
        """Evaluate at an (n, d) array of real or complex points (or (n,) for d=1)."""
        points = np.asarray(points)
        if self.basis.dimension == 1 and points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[1] != self.basis.dimension:
            raise InputError("points must have shape (n, d)")
        tables = [
            eval_phi_table(self.basis.max_degree, points[:, j])
            for j in range(self.basis.dimension)
        ]
        out = np.zeros(points.shape[0], dtype=tables[0].dtype)
        for c, alpha in zip(self.coeffs, self.basis.indices):
            if c == 0.0:
                continue
            term = np.full(points.shape[0], c, dtype=out.dtype)
            for j, aj in enumerate(alpha):
                term = term * tables[j][:, aj]
            out += term
        return out

    def embedded(self, max_degree):
        """Same function viewed in the basis of degree max_degree >= self degree."""
        if max_degree < self.basis.max_degree:
            raise InputError("cannot embed into a smaller basis")
        target = BasisIndexSet(self.basis.dimension, max_degree)
        c = np.zeros(target.size)
        for coef, alpha in zip(self.coeffs, self.basis.indices):
            c[target.position(alpha)] = coef
        return HermiteVector(target, c)


def basis_vector(basis, alpha, scale=1.0):
    """The HermiteVector scale * Phi_alpha in the given basis."""
    c = np.zeros(basis.size)
    c[basis.position(alpha)] = scale
    return HermiteVector(basis, c)


def derivative_operator(f, axis):
    """Exact partial derivative d/dx_axis of f, as a HermiteVector of degree N+1.

    Uses the ladder identity phi_k' = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1}
    coordinate-wise; axis is 0-based.
    """
    d = f.basis.dimension
    if not 0 <= axis < d:
        raise InputError(f"axis {axis} outside 0..{d - 1}")
    target = BasisIndexSet(d, f.basis.max_degree + 1)
    out = np.zeros(target.size)
    for coef, alpha in zip(f.coeffs, f.basis.indices):
        if coef == 0.0:
            continue
        k = alpha[axis]
        if k > 0:
            down = alpha[:axis] + (k - 1,) + alpha[axis + 1:]
            out[target.position(down)] += coef * math.sqrt(k / 2.0)
        up = alpha[:axis] + (k + 1,) + alpha[axis + 1:]
        out[target.position(up)] -= coef * math.sqrt((k + 1) / 2.0)
    return HermiteVector(target, out)


def derivative_multi(f, alpha):
    """Iterated exact derivative d^alpha f (alpha a multi-index of order m)."""
    g = f
    for axis, reps in enumerate(alpha):
        for _ in range(reps):
            g = derivative_operator(g, axis)
    return g
