"""Conformal maps of the unit disk onto corner domains and their difference quotients.

A map ``sigma`` carries corner metadata ``(X_j, beta_j, alpha_j)``: ``X_j``
is the unit-circle preimage of the j-th corner, ``beta_j in (-1, 1]`` the
exponent with which ``|sigma'|`` vanishes or blows up there, and
``alpha_j`` the admissible growth of boundary data.  Every kernel estimate
in this package runs through the difference quotients

    d(S, Z)  = (sigma(S) - sigma(Z)) / (S - Z),
    d_k(S,Z) = (sigma_k(S) - sigma_k(Z)) / (S - Z),   sigma_1 = Re sigma,
                                                      sigma_2 = Im sigma,

whose stable evaluation near the diagonal is the whole point of this
module: below ``H_SWITCH`` the raw quotient loses ~12 digits to
cancellation, so built-in maps either carry an exact algebraic form of d
(identity, cusp) or fall back to a midpoint Taylor form with a
third-derivative correction (power family).

Built-in maps:

* ``identity``  - the disk itself, no corners, d == 1;
* ``cusp``      - sigma(Z) = (Z+1)^2, one corner at Z = -1 with beta = 1
                  (a zero angle with the spike pointing into the domain);
                  d = S + Z + 2 exactly;
* ``power``     - sigma'(Z) = prod_j (1 - Z/X_j)^{beta_j}, so that
                  |sigma'(Z)| = prod_j |Z - X_j|^{beta_j} exactly; sigma is
                  recovered by integrating sigma' along [0, Z] with a
                  graded rule cached at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, ExponentOutOfRange

H_SWITCH = 1e-6  # |S - Z| below which the direct quotient is abandoned

_EXACT_ZERO = 0.0


def validate_corner_exponents(beta: float, alpha: float) -> None:
    """Admissibility of a corner exponent pair.

    Requires ``beta in (-1, 1]`` and ``alpha in (0, 1)`` with
    ``alpha < 1/(beta+1)`` whenever ``beta >= 0`` (for ``beta < 0`` the
    plain ``alpha < 1`` suffices).  Raises ExponentOutOfRange otherwise.
    """
    if not -1.0 < beta <= 1.0:
        raise ExponentOutOfRange(f"beta must lie in (-1, 1], got {beta}")
    if not 0.0 < alpha < 1.0:
        raise ExponentOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if beta >= 0.0 and alpha >= 1.0 / (beta + 1.0):
        raise ExponentOutOfRange(
            f"alpha={alpha} must be < 1/(beta+1)={1.0 / (beta + 1.0):g} for beta={beta}"
        )


@dataclass(frozen=True)
class CornerSpec:
    """One corner: circle preimage X, map exponent beta, data exponent alpha."""

    X: complex
    beta: float
    alpha: float

    def __post_init__(self):
        if abs(abs(self.X) - 1.0) > 1e-14:
            raise ConfigError(f"corner preimage must have unit modulus, got |X|={abs(self.X)}")
        validate_corner_exponents(self.beta, self.alpha)

    @property
    def gamma(self) -> float:
        """Density-class exponent (beta+1)*alpha; always < 1 for admissible pairs."""
        return (self.beta + 1.0) * self.alpha

    @property
    def angle(self) -> float:
        return float(np.angle(self.X) % (2.0 * np.pi))


@dataclass(eq=False)
class CornerDomainMap:
    """Conformal map of the unit disk with corner metadata.

    Immutable after construction; all evaluations are pure, so instances
    are safe to share across threads.  ``d_exact`` (when present) is an
    algebraically simplified difference quotient valid for every argument
    pair, including the diagonal.
    """

    name: str
    corners: tuple[CornerSpec, ...]
    sigma_fn: Callable[[np.ndarray], np.ndarray]
    sigma_prime_fn: Callable[[np.ndarray], np.ndarray]
    d_exact: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    log_deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    log_deriv_prime: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self._spot_check()

    # -- map evaluation -----------------------------------------------------

    def sigma(self, Z):
        return self.sigma_fn(np.asarray(Z, dtype=complex))

    def sigma_prime(self, Z):
        return self.sigma_prime_fn(np.asarray(Z, dtype=complex))

    def chord(self, S, Z) -> tuple:
        """Pair (sigma(S), sigma(Z)) for the split Cauchy-kernel form."""
        return self.sigma(S), self.sigma(Z)

    # -- corner metadata ------------------------------------------------------

    @property
    def corner_points(self) -> np.ndarray:
        return np.array([c.X for c in self.corners], dtype=complex)

    @property
    def corner_angles(self) -> np.ndarray:
        return np.array(sorted(c.angle for c in self.corners), dtype=float)

    @property
    def R0(self) -> float:
        """Minimal pairwise corner separation; 1 when fewer than two corners."""
        X = self.corner_points
        if len(X) < 2:
            return 1.0
        diffs = [abs(X[i] - X[j]) for i in range(len(X)) for j in range(i + 1, len(X))]
        return float(min(diffs))

    def R(self, Z):
        """Distance to the nearest corner preimage; identically 1 when m = 0.

        The smooth case m = 0 is outside the corner framework; R == 1 there
        makes every min{omega(.)/omega(R/2), 1} clamp degrade gracefully.
        """
        Z = np.asarray(Z, dtype=complex)
        if not self.corners:
            return np.ones(Z.shape) if Z.shape else 1.0
        d = np.min(np.abs(Z[..., None] - self.corner_points), axis=-1)
        return d if Z.shape else float(d)

    # -- difference quotients -------------------------------------------------

    def d(self, S, Z):
        """Stable evaluation of (sigma(S) - sigma(Z))/(S - Z); sigma'(S) at S = Z."""
        S = np.asarray(S, dtype=complex)
        Z = np.asarray(Z, dtype=complex)
        if self.d_exact is not None:
            out = self.d_exact(S, Z)
            return out if (S.shape or Z.shape) else complex(out)
        Sb, Zb = np.broadcast_arrays(S, Z)
        delta = Sb - Zb
        out = np.empty(Sb.shape, dtype=complex)
        near = np.abs(delta) < H_SWITCH
        far = ~near
        if far.any():
            out[far] = (self.sigma(Sb[far]) - self.sigma(Zb[far])) / delta[far]
        if near.any():
            mid = 0.5 * (Sb[near] + Zb[near])
            val = self.sigma_prime(mid)
            if self.log_deriv is not None and self.log_deriv_prime is not None:
                ell = self.log_deriv(mid)
                sig3 = val * (ell * ell + self.log_deriv_prime(mid))
                val = val + sig3 * delta[near] ** 2 / 24.0
            out[near] = val
        return out if (S.shape or Z.shape) else complex(out)

    def d12(self, S, Z):
        """Component quotients (d1, d2); the identity d = d1 + i*d2 is exact.

        Both are derived from the stable d, not from raw sigma differences:
        the numerators Re/Im(d*(S-Z)) avoid the near-diagonal cancellation.
        """
        S = np.asarray(S, dtype=complex)
        Z = np.asarray(Z, dtype=complex)
        Sb, Zb = np.broadcast_arrays(S, Z)
        delta = Sb - Zb
        dval = np.asarray(self.d(Sb, Zb), dtype=complex)
        num = dval * delta
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = np.where(delta != 0, num.real / delta, 0.0)
            d2 = np.where(delta != 0, num.imag / delta, 0.0)
        if (delta == 0).any():
            # continuous extension along the circle: the contour derivatives
            s1p, s2p = self.contour_derivatives(Sb)
            d1 = np.where(delta == 0, s1p, d1)
            d2 = np.where(delta == 0, s2p, d2)
        if S.shape or Z.shape:
            return d1, d2
        return complex(d1), complex(d2)

    def contour_derivatives(self, S):
        """Tangential derivatives (sigma_1', sigma_2') of Re/Im sigma along the circle.

        With S = e^{i theta}, d(sigma_k)/d(theta) = Re/Im(i*S*sigma'(S));
        dividing by dS/d(theta) = i*S gives the contour derivative.  Their
        combination sigma_1' + i*sigma_2' equals sigma' identically.
        """
        S = np.asarray(S, dtype=complex)
        tang = 1j * S * self.sigma_prime(S)
        inv = 1.0 / (1j * S)
        return tang.real * inv, tang.imag * inv

    # -- construction-time spot checks ---------------------------------------

    def _spot_check(self, n_pairs: int = 300, n_boundary: int = 720):
        rng = np.random.default_rng(20240611)
        r = np.sqrt(rng.uniform(0.0, 1.0, n_pairs))
        th = rng.uniform(0.0, 2.0 * np.pi, n_pairs)
        Z1 = r * np.exp(1j * th)
        r2 = np.sqrt(rng.uniform(0.0, 1.0, n_pairs))
        th2 = rng.uniform(0.0, 2.0 * np.pi, n_pairs)
        Z2 = r2 * np.exp(1j * th2)
        keep = np.abs(Z1 - Z2) > 1e-6
        img = np.abs(self.sigma(Z1[keep]) - self.sigma(Z2[keep]))
        if img.min() <= 1e-12:
            raise ConfigError(f"map {self.name!r} failed the injectivity spot check")
        theta = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False) + 0.5 / n_boundary
        S = np.exp(1j * theta)
        if self.corners:
            far = np.min(np.abs(S[:, None] - self.corner_points[None, :]), axis=1) > 0.05
            S = S[far]
        if np.abs(self.sigma_prime(S)).min() <= 1e-12:
            raise ConfigError(f"map {self.name!r} has vanishing sigma' away from corners")


# ---------------------------------------------------------------------------
# Module-level operation aliases
# ---------------------------------------------------------------------------


def corner_distance(domain_map: CornerDomainMap, Z):
    """Distance from Z to the nearest corner preimage on the circle."""
    return domain_map.R(Z)


def diff_quotient(domain_map: CornerDomainMap, S, Z):
    return domain_map.d(S, Z)


def diff_quotients_12(domain_map: CornerDomainMap, S, Z):
    return domain_map.d12(S, Z)


def arc_chord_ratio(S: complex, T: complex) -> float:
    """Shorter-arc length over chord length for two distinct circle points.

    Always lies in [1, pi/2]; the upper bound is attained at antipodes.
    """
    if S == T:
        raise ValueError("arc_chord_ratio requires S != T")
    delta = abs(np.angle(S * np.conj(T)))
    if delta < 1e-8:
        return 1.0 + delta * delta / 24.0
    return float(delta / (2.0 * np.sin(delta / 2.0)))


# ---------------------------------------------------------------------------
# Built-in maps
# ---------------------------------------------------------------------------


def identity_map() -> CornerDomainMap:
    """The unit disk itself: sigma(Z) = Z, no corners, d == 1."""
    return CornerDomainMap(
        name="identity",
        corners=(),
        sigma_fn=lambda Z: Z,
        sigma_prime_fn=lambda Z: np.ones_like(Z),
        d_exact=lambda S, Z: np.ones(np.broadcast(S, Z).shape, dtype=complex),
        params={},
    )


def cusp_map(alpha: float = 0.3) -> CornerDomainMap:
    """sigma(Z) = (Z+1)^2: a zero-angle cusp at the image of Z = -1.

    The corner carries beta = 1 since sigma'(Z) = 2(Z+1); admissibility
    then requires alpha < 1/2.  The difference quotient simplifies to
    d = S + Z + 2 exactly, which is used verbatim.
    """
    corner = CornerSpec(X=-1.0 + 0.0j, beta=1.0, alpha=alpha)
    return CornerDomainMap(
        name="cusp",
        corners=(corner,),
        sigma_fn=lambda Z: (Z + 1.0) ** 2,
        sigma_prime_fn=lambda Z: 2.0 * (Z + 1.0),
        d_exact=lambda S, Z: np.asarray(S + Z + 2.0, dtype=complex),
        params={"alpha": alpha},
    )


def _radial_rule(levels: int = 40, p: int = 6, n_gl: int = 12):
    """Graded quadrature nodes/weights on t in (0, 1) for radial integration.

    Substitution t = 1 - (1-s)^p flattens endpoint singularities of
    sigma'(t*Z) at t = 1 (corner exponents beta > -1); dyadic s-panels
    toward s = 1 finish the job.  Full accuracy is reached for
    beta >= -0.5; closer to -1 the rule degrades gracefully.
    """
    x, w = np.polynomial.legendre.leggauss(n_gl)
    breaks = [0.0, 0.25, 0.5] + [1.0 - 2.0 ** -(k + 1) for k in range(1, levels)] + [1.0]
    t_nodes, t_weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        ws = 0.5 * (b - a) * w
        one_minus = (1.0 - s) ** (p - 1)
        t_nodes.append(1.0 - (1.0 - s) ** p)
        t_weights.append(ws * p * one_minus)
    return np.concatenate(t_nodes), np.concatenate(t_weights)


def power_map(corners, scale: complex = 1.0) -> CornerDomainMap:
    """Corner-exponent family: sigma'(Z) = scale * prod_j (1 - Z/X_j)^{beta_j}.

    ``corners`` is a sequence of CornerSpec (or (angle_radians, beta, alpha)
    triples).  Since |1 - Z/X| = |Z - X| on and inside the circle, |sigma'|
    matches the corner-exponent hypothesis with constant |scale| exactly.
    sigma itself has no closed form for several corners; it is evaluated by
    integrating sigma' along the segment [0, Z] with a graded rule whose
    nodes and weights are cached at construction (sigma(0) = 0).

    The principal branch of each factor is safe: Re(1 - Z/X) >= 0 on the
    closed disk, vanishing only at the corner itself.
    """
    specs = []
    for c in corners:
        if isinstance(c, CornerSpec):
            specs.append(c)
        else:
            ang, beta, alpha = c
            specs.append(CornerSpec(np.exp(1j * ang), beta, alpha))
    if not specs:
        raise ConfigError("power_map needs at least one corner")
    specs = tuple(specs)
    X = np.array([c.X for c in specs])
    B = np.array([c.beta for c in specs])

    def sigma_prime(Z):
        logs = np.log(1.0 - Z[..., None] / X)
        return scale * np.exp(np.sum(B * logs, axis=-1))

    t_nodes, t_weights = _radial_rule()

    def sigma(Z):
        flat = np.ravel(Z)
        vals = sigma_prime(np.multiply.outer(t_nodes, flat))
        out = (t_weights @ vals) * flat
        return out.reshape(np.shape(Z)) if np.shape(Z) else complex(out[0])

    def log_deriv(Z):
        return np.sum(B / (Z[..., None] - X), axis=-1)

    def log_deriv_prime(Z):
        return -np.sum(B / (Z[..., None] - X) ** 2, axis=-1)

    return CornerDomainMap(
        name="power",
        corners=specs,
        sigma_fn=sigma,
        sigma_prime_fn=sigma_prime,
        log_deriv=log_deriv,
        log_deriv_prime=log_deriv_prime,
        params={"scale": scale,
                "corners": [(c.angle, c.beta, c.alpha) for c in specs]},
    )


def builtin_maps() -> dict:
    """Catalog of map factories addressable by name from run configurations."""
    return {"identity": identity_map, "cusp": cusp_map, "power": power_map}


def make_map(name: str, corners=None, **params) -> CornerDomainMap:
    """Build a catalog map from config-style arguments.

    ``corners`` is a list of (angle_radians, beta, alpha) triples; it is
    required for ``power``, optional for ``cusp`` (which fixes its own
    corner), and must be absent for ``identity``.
    """
    catalog = builtin_maps()
    if name not in catalog:
        raise ConfigError(f"unknown map {name!r}; choose one of {sorted(catalog)}")
    if name == "identity":
        if corners:
            raise ConfigError("identity map takes no corners")
        return identity_map()
    if name == "cusp":
        if corners and len(corners) == 1:
            ang, beta, alpha = corners[0]
            if beta != 1.0 or abs((ang % (2 * np.pi)) - np.pi) > 1e-12:
                raise ConfigError("cusp map has a fixed corner at angle pi with beta=1")
            return cusp_map(alpha=alpha)
        return cusp_map(**params)
    if not corners:
        raise ConfigError("power map requires a corner list")
    return power_map(corners, **params)
