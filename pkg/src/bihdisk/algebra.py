"""Arithmetic and calculus in the commutative biharmonic algebra.

The algebra is two-dimensional over the complex field with a basis
``{e1, e2}`` multiplying by

    e1*e1 = e1,   e2*e1 = e2,   e2*e2 = e1 + 2i*e2,

so that ``(e1^2 + e2^2)^2 = 0`` while ``e1^2 + e2^2 != 0``.  Elements are
stored as the ordered complex pair ``(z1, z2)`` with ``a = z1*e1 + z2*e2``;
the Euclidean norm is ``sqrt(|z1|^2 + |z2|^2)``.  The radical is spanned by
the nilpotent ``rho = 2*e1 + 2i*e2`` (``rho^2 = 0``); an element is
invertible exactly when ``z1 + i*z2 != 0``.

A second coordinate system, the *spectral form*, diagonalises the algebra:
with ``n = e2 - i*e1`` (``n^2 = 0``) every element reads ``w*e1 + v*n``
where ``w = z1 + i*z2`` and ``v = z2``.  Multiplication there is
dual-number style, ``(w, v)*(w', v') = (w*w', w*v' + v*w')``; the inverse
and power maps use it internally while the e-basis pair stays the single
canonical store.

Plane points embed as ``zeta = x*e1 + y*e2``.  A function of ``zeta`` is
monogenic when ``dF/dy = (dF/dx)*e2``; its four real components are then
biharmonic, which is what the residual checkers at the bottom of this
module probe with centered differences and the 13-point bilaplacian
stencil.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall, NonInvertible

# Scale-relative invertibility cutoff: |z1 + i*z2| below this multiple of
# max(1, norm) is treated as a zero divisor.
INVERTIBILITY_TOL = 1e-14


@dataclass(frozen=True)
class BihNumber:
    """Element ``z1*e1 + z2*e2`` of the biharmonic algebra."""

    z1: complex
    z2: complex

    def __add__(self, other: "BihNumber") -> "BihNumber":
        return BihNumber(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other: "BihNumber") -> "BihNumber":
        return BihNumber(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self) -> "BihNumber":
        return BihNumber(-self.z1, -self.z2)

    def __mul__(self, other):
        if isinstance(other, BihNumber):
            return mul(self, other)
        return BihNumber(self.z1 * other, self.z2 * other)

    def __rmul__(self, other):
        # complex scalars act as multiplication by other*e1
        return BihNumber(self.z1 * other, self.z2 * other)

    @property
    def norm(self) -> float:
        return float(np.hypot(abs(self.z1), abs(self.z2)))

    def spectral(self) -> tuple[complex, complex]:
        """Coordinates ``(w, v)`` in the basis ``{e1, n}``, ``n = e2 - i*e1``."""
        return self.z1 + 1j * self.z2, self.z2

    @classmethod
    def from_spectral(cls, w: complex, v: complex) -> "BihNumber":
        return cls(w - 1j * v, v)

    def components(self) -> "MonogenicComponents":
        return MonogenicComponents(
            self.z1.real, self.z1.imag, self.z2.real, self.z2.imag
        )

    def isclose(self, other: "BihNumber", tol: float = 1e-12) -> bool:
        return (self - other).norm <= tol


@dataclass(frozen=True)
class MonogenicComponents:
    """Real components ``U1*e1 + U2*i*e1 + U3*e2 + U4*i*e2`` of an element."""

    U1: float
    U2: float
    U3: float
    U4: float

    def reassemble(self) -> BihNumber:
        return BihNumber(complex(self.U1, self.U2), complex(self.U3, self.U4))


ZERO = BihNumber(0.0, 0.0)
E1 = BihNumber(1.0, 0.0)
E2 = BihNumber(0.0, 1.0)
RHO = BihNumber(2.0, 2.0j)
NIL = BihNumber(-1.0j, 1.0)  # n = e2 - i*e1, n^2 = 0


def mul(a: BihNumber, b: BihNumber) -> BihNumber:
    """Product in the e-basis; commutative and associative, e1 is the identity."""
    return BihNumber(
        a.z1 * b.z1 + a.z2 * b.z2,
        a.z1 * b.z2 + a.z2 * b.z1 + 2j * a.z2 * b.z2,
    )


def inverse(a: BihNumber, tol: float = INVERTIBILITY_TOL) -> BihNumber:
    """Multiplicative inverse, computed in spectral form.

    Raises
    ------
    NonInvertible
        When ``|z1 + i*z2| <= tol * max(1, ||a||)``, i.e. the element sits
        (numerically) in the radical.
    """
    w, v = a.spectral()
    if abs(w) <= tol * max(1.0, a.norm):
        raise NonInvertible(f"element {a} has spectral part |w|={abs(w):.3e}")
    return BihNumber.from_spectral(1.0 / w, -v / (w * w))


def inverse_difference(tau: BihNumber, zeta: BihNumber, chord=None) -> BihNumber:
    """Evaluate ``(tau - zeta)^{-1}``.

    With ``chord = (sigma_s, sigma_z)`` supplied (the complex images of the
    two points under the domain map), uses the two-term split

        1/(sigma_s - sigma_z) + (i*rho/2) * Im(sigma_s - sigma_z)
                                          / (sigma_s - sigma_z)^2,

    which is how the pulled-back Cauchy kernel is assembled on the circle.
    Without a chord it falls back to ``inverse(tau - zeta)``; both paths
    agree to floating accuracy where both apply.
    """
    if chord is None:
        return inverse(tau - zeta)
    sigma_s, sigma_z = chord
    dw = sigma_s - sigma_z
    if abs(dw) <= INVERTIBILITY_TOL * max(1.0, abs(sigma_s), abs(sigma_z)):
        raise NonInvertible("map images coincide; chord form undefined")
    lead = 1.0 / dw
    # i*rho/2 = -n, so the correction term is -(Im dw / dw^2) * n
    return BihNumber.from_spectral(lead, -dw.imag / (dw * dw))


def embed_point(x: float, y: float) -> BihNumber:
    """Plane point as ``x*e1 + y*e2``."""
    return BihNumber(complex(x), complex(y))


def monomial(zeta: BihNumber, n: int) -> BihNumber:
    """Power ``zeta**n`` by repeated multiplication (n >= 0).

    The components of ``zeta^n`` as functions of (x, y) are biharmonic
    polynomials, which makes this the manufactured-solution family.
    """
    if n < 0:
        raise ValueError("monomial requires n >= 0")
    out = E1
    for _ in range(n):
        out = mul(out, zeta)
    return out


# ---------------------------------------------------------------------------
# Grid-based residual checkers
# ---------------------------------------------------------------------------


def _split_grid(F) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(F, dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D grid of BihNumber samples")
    z1 = np.empty(arr.shape, dtype=complex)
    z2 = np.empty(arr.shape, dtype=complex)
    for idx, val in np.ndenumerate(arr):
        z1[idx] = val.z1
        z2[idx] = val.z2
    return z1, z2


def sample_field(f, xs, ys) -> np.ndarray:
    """Sample ``f(zeta)`` on the tensor grid; result[i, j] = f at (xs[i], ys[j])."""
    out = np.empty((len(xs), len(ys)), dtype=object)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            out[i, j] = f(embed_point(x, y))
    return out


def cauchy_riemann_residual(F, h: float) -> float:
    """Max norm of ``D_y F - (D_x F) * e2`` over interior grid points.

    ``F[i, j]`` must sample a field at ``(x0 + i*h, y0 + j*h)`` on a uniform
    grid with at least 3 points per axis; centered differences are used, so
    the residual of an exact monogenic field is O(h^2).
    """
    z1, z2 = _split_grid(F)
    if min(z1.shape) < 3:
        raise GridTooSmall("need at least 3 points per axis")
    dx1 = (z1[2:, 1:-1] - z1[:-2, 1:-1]) / (2.0 * h)
    dx2 = (z2[2:, 1:-1] - z2[:-2, 1:-1]) / (2.0 * h)
    dy1 = (z1[1:-1, 2:] - z1[1:-1, :-2]) / (2.0 * h)
    dy2 = (z2[1:-1, 2:] - z2[1:-1, :-2]) / (2.0 * h)
    # (a1*e1 + a2*e2) * e2 = a2*e1 + (a1 + 2i*a2)*e2
    r1 = dy1 - dx2
    r2 = dy2 - (dx1 + 2j * dx2)
    return float(np.sqrt(np.abs(r1) ** 2 + np.abs(r2) ** 2).max())


def biharmonic_residual(u, h: float) -> float:
    """Max of ``|13-point bilaplacian stencil / h^4|`` over admissible points.

    The grid must be at least 5x5.  The stencil is exact for polynomials of
    degree <= 5; for an exactly biharmonic field the residual is pure
    truncation plus rounding.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or min(u.shape) < 5:
        raise GridTooSmall("need at least a 5x5 grid")
    c = u[2:-2, 2:-2]
    stencil = (
        20.0 * c
        - 8.0 * (u[1:-3, 2:-2] + u[3:-1, 2:-2] + u[2:-2, 1:-3] + u[2:-2, 3:-1])
        + 2.0 * (u[1:-3, 1:-3] + u[1:-3, 3:-1] + u[3:-1, 1:-3] + u[3:-1, 3:-1])
        + (u[:-4, 2:-2] + u[4:, 2:-2] + u[2:-2, :-4] + u[2:-2, 4:])
    )
    return float(np.abs(stencil).max() / h**4)
