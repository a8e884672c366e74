"""Boundary-system kernels and the weighted density class.

For a scalar density component phi on the circle the two base kernels are

    Omega_1[phi](S, Z) = phi(S) * (sigma'(S)/d(S,Z) - 1),
    Omega_2[phi](S, Z) = (phi(S)/2) * (sigma'(S)*d_2(S,Z)/d(S,Z)^2
                                       - sigma_2'(S)/d(S,Z)),

both extended by 0 on the diagonal S = Z along the circle.  Near the
diagonal the Omega_2 formula subtracts two O(1) quantities whose difference
is O(|S-Z|); the rearranged form

    (phi/2) * [d_2*(sigma_1' - d_1) - d_1*(sigma_2' - d_2)] / d^2

computes the small differences first and is used once |S-Z| drops below a
tenth of the distance from Z to the corner set.  The combined kernels
entering the boundary system are the fixed linear combinations

    Omega_*  = Omega_1[phi1] + 2i*Omega_2[phi1] - 2*Omega_2[phi3],
    Omega_** = Omega_1[phi3] - 2i*Omega_2[phi3] - 2*Omega_2[phi1].

Densities live in the weighted class K{gamma_j}: continuous away from the
corners with |phi(S)| <= c * prod_j |S - X_j|^{-gamma_j}, gamma_j < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import MapViolation
from .geometry import CornerDomainMap, CornerSpec, validate_corner_exponents

REARRANGE_FACTOR = 0.1  # switch to the cancellation-safe Omega_2 form


# ---------------------------------------------------------------------------
# Exponent bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentBook:
    """Derived exponents for the kernel envelopes of a corner set."""

    beta: float
    beta0: float
    gammas: tuple[float, ...]
    gamma_primes: tuple[float, ...]


def exponent_bookkeeping(corners) -> ExponentBook:
    """Compute (beta, beta0, gamma_j, gamma_j') from corner exponent pairs.

    Accepts CornerSpec instances or raw (beta_j, alpha_j) pairs.  Per
    corner, gamma_j = (beta_j+1)*alpha_j; gamma_j' = -beta_j for
    beta_j < 0 and 0 otherwise.  The aggregate beta takes the larger of
    the two branch maxima, and beta0 = max(0, -beta_1, ..., -beta_m).

    Raises
    ------
    ExponentOutOfRange
        If any pair is inadmissible, or the derived exponents violate
        beta < 1 or gamma_j + gamma_j' < 1.
    """
    pairs = []
    for c in corners:
        if isinstance(c, CornerSpec):
            pairs.append((c.beta, c.alpha))
        else:
            pairs.append((float(c[0]), float(c[1])))
    for beta_j, alpha_j in pairs:
        validate_corner_exponents(beta_j, alpha_j)

    gammas, gamma_primes, branch_vals = [], [], [0.0]
    for beta_j, alpha_j in pairs:
        g = (beta_j + 1.0) * alpha_j
        gammas.append(g)
        if beta_j < 0.0:
            gamma_primes.append(-beta_j)
            branch_vals.append(g - beta_j)
        else:
            gamma_primes.append(0.0)
            branch_vals.append(g)
    beta = max(branch_vals)
    beta0 = max([0.0] + [-b for b, _ in pairs])

    # admissible pairs force these, so a failure flags an internal bug
    assert beta < 1.0, beta
    assert all(g + gp < 1.0 for g, gp in zip(gammas, gamma_primes))
    return ExponentBook(beta, beta0, tuple(gammas), tuple(gamma_primes))


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------


def _as_boundary_fn(fn: Callable) -> Callable:
    def wrapped(S):
        S = np.asarray(S, dtype=complex)
        vals = np.asarray(fn(S), dtype=float)
        return vals if S.shape else float(vals)

    return wrapped


@dataclass(frozen=True)
class BoundaryDensity:
    """Pair of real boundary functions (phi1, phi3) in the class K{gamma_j}.

    ``phi1``/``phi3`` map circle points (complex arrays) to real values;
    closed-form rules are used for manufactured problems, node samples with
    piecewise-cubic interpolation for solver output.  Instances are
    immutable; evaluation is pure.
    """

    phi1: Callable
    phi3: Callable
    gammas: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_rules(cls, phi1, phi3, gammas=(), **meta) -> "BoundaryDensity":
        return cls(_as_boundary_fn(phi1), _as_boundary_fn(phi3), tuple(gammas), meta)

    @classmethod
    def zero(cls) -> "BoundaryDensity":
        return cls.from_rules(lambda S: np.zeros(S.shape), lambda S: np.zeros(S.shape))

    def weighted_sup(self, corners: Sequence[CornerSpec], n: int = 4000,
                     exclude: float = 1e-5) -> tuple[float, float]:
        """Class-membership fit: sup of |phi_l(S)| * prod_j |S-X_j|^{gamma_j}.

        Returns the fitted sup at n and 4n samples so that the caller can
        judge refinement stability.  Corners are approached down to the
        ``exclude`` chordal distance.
        """

        def fitted(m: int) -> float:
            theta = (np.arange(m) + 0.5) * 2.0 * np.pi / m
            S = np.exp(1j * theta)
            if corners:
                X = np.array([c.X for c in corners])
                dist = np.min(np.abs(S[:, None] - X[None, :]), axis=1)
                S = S[dist > exclude]
                weight = np.ones(S.shape)
                for c, g in zip(corners, self.gammas or [c.gamma for c in corners]):
                    weight = weight * np.abs(S - c.X) ** g
            else:
                weight = np.ones(S.shape)
            vals = np.maximum(np.abs(self.phi1(S)), np.abs(self.phi3(S))) * weight
            return float(np.quantile(vals, 0.999))

        return fitted(n), fitted(4 * n)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def _base_quotients(domain_map: CornerDomainMap, S, Z):
    S = np.asarray(S, dtype=complex)
    Z = np.asarray(Z, dtype=complex)
    Sb, Zb = np.broadcast_arrays(S, Z)
    dval = np.asarray(domain_map.d(Sb, Zb), dtype=complex)
    diag = Sb == Zb
    bad = (np.abs(dval) == 0.0) & ~diag
    if bad.any():
        raise MapViolation("difference quotient vanished off the diagonal")
    return Sb, Zb, dval, diag


def kernel_k1(domain_map: CornerDomainMap, S, Z):
    """Density-free factor sigma'(S)/d(S,Z) - 1 of Omega_1; 0 on the diagonal."""
    Sb, Zb, dval, diag = _base_quotients(domain_map, S, Z)
    safe = np.where(diag, 1.0, dval)
    out = domain_map.sigma_prime(Sb) / safe - 1.0
    out = np.where(diag, 0.0, out)
    return out if (np.shape(S) or np.shape(Z)) else complex(out)


def kernel_k2(domain_map: CornerDomainMap, S, Z, rearranged: bool | None = None):
    """Density-free factor of Omega_2; 0 on the diagonal.

    ``rearranged`` forces the form choice; the default switches to the
    transformed expression when |S-Z| < 0.1 * R(Z).  Both agree to ~1e-10
    wherever they overlap.
    """
    Sb, Zb, dval, diag = _base_quotients(domain_map, S, Z)
    safe = np.where(diag, 1.0, dval)
    s1p, s2p = domain_map.contour_derivatives(Sb)
    d1, d2 = domain_map.d12(Sb, Zb)
    if rearranged is None:
        use_re = np.abs(Sb - Zb) < REARRANGE_FACTOR * np.asarray(domain_map.R(Zb))
    else:
        use_re = np.full(Sb.shape, bool(rearranged))
    direct = 0.5 * (domain_map.sigma_prime(Sb) * d2 / safe**2 - s2p / safe)
    trans = 0.5 * (d2 * (s1p - d1) - d1 * (s2p - d2)) / safe**2
    out = np.where(use_re, trans, direct)
    out = np.where(diag, 0.0, out)
    return out if (np.shape(S) or np.shape(Z)) else complex(out)


def kernel_omega1(domain_map: CornerDomainMap, phi: Callable, S, Z):
    """Omega_1 for a scalar density component phi."""
    S = np.asarray(S, dtype=complex)
    return phi(S) * kernel_k1(domain_map, S, Z)


def kernel_omega2(domain_map: CornerDomainMap, phi: Callable, S, Z,
                  rearranged: bool | None = None):
    """Omega_2 for a scalar density component phi."""
    S = np.asarray(S, dtype=complex)
    return phi(S) * kernel_k2(domain_map, S, Z, rearranged=rearranged)


def kernel_omega_star(domain_map: CornerDomainMap, density: BoundaryDensity, S, Z):
    """Omega_1[phi1] + 2i*Omega_2[phi1] - 2*Omega_2[phi3]."""
    S = np.asarray(S, dtype=complex)
    k1 = kernel_k1(domain_map, S, Z)
    k2 = kernel_k2(domain_map, S, Z)
    return density.phi1(S) * (k1 + 2j * k2) - 2.0 * density.phi3(S) * k2


def kernel_omega_star_star(domain_map: CornerDomainMap, density: BoundaryDensity, S, Z):
    """Omega_1[phi3] - 2i*Omega_2[phi3] - 2*Omega_2[phi1]."""
    S = np.asarray(S, dtype=complex)
    k1 = kernel_k1(domain_map, S, Z)
    k2 = kernel_k2(domain_map, S, Z)
    return density.phi3(S) * (k1 - 2j * k2) - 2.0 * density.phi1(S) * k2
