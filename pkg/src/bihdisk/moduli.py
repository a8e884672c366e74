"""Moduli of continuity and the Dini-type admissibility validators.

Two integral conditions gate the modulus functions used in the kernel
estimates:

* plain Dini:      integral_0^2 omega(eta)/eta d(eta) < infinity,
* strong Dini:     integral_0^eps omega(eta)/eta d(eta) <= c * omega(eps)
                   for all small eps.

Both are checked numerically on dyadic intervals.  ``omega(eta) = eta**lam``
passes both for lam in (0, 1]; ``omega(eta) = 1/log(e + 1/eta)`` fails the
strong form (and, in fact, the plain form: the dyadic contributions decay
like the harmonic series).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError

_GL32 = np.polynomial.legendre.leggauss(32)

# Arguments are chord lengths on the unit circle, so 2 is the natural cap
# that keeps the built-in power modulus bounded without touching its
# behaviour near zero.
_DIAMETER = 2.0


@dataclass(frozen=True)
class Modulus:
    """Nondecreasing bounded modulus of continuity on (0, infinity)."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str

    def __call__(self, eta):
        return self.fn(np.asarray(eta, dtype=float))

    def __add__(self, other: "Modulus") -> "Modulus":
        return Modulus(
            lambda eta, f=self.fn, g=other.fn: f(eta) + g(eta),
            f"{self.name}+{other.name}",
        )


def power_modulus(lam: float) -> Modulus:
    """``omega(eta) = min(eta, 2)**lam`` for lam in (0, 1]."""
    if not 0.0 < lam <= 1.0:
        raise ConfigError(f"power modulus exponent must lie in (0, 1], got {lam}")
    return Modulus(lambda eta: np.minimum(eta, _DIAMETER) ** lam, f"eta^{lam:g}")


def log_modulus() -> Modulus:
    """``omega(eta) = 1/log(e + 1/eta)``; bounded, but not strongly Dini."""
    return Modulus(lambda eta: 1.0 / np.log(np.e + 1.0 / np.maximum(eta, 1e-300)),
                   "1/log(e+1/eta)")


def _dyadic_term(omega: Modulus, k: int) -> float:
    """Gauss-Legendre value of integral over [2^-k-1, 2^-k] of omega/eta."""
    lo, hi = 2.0 ** -(k + 1), 2.0**-k
    x, w = _GL32
    eta = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    vals = omega(eta) / eta
    return float(0.5 * (hi - lo) * np.dot(w, vals))


def dini_ok(omega: Modulus, levels: int = 60, tail_ratio: float = 0.98) -> tuple[bool, dict]:
    """Numerically decide whether integral_0^2 omega/eta d(eta) converges.

    Sums dyadic contributions a_k; convergence is accepted when the late
    terms decay geometrically (ratio bounded away from 1), which separates
    eta^lam (ratio 2^-lam) from 1/log (ratio -> 1).
    """
    terms = np.array([_dyadic_term(omega, k) for k in range(-1, levels)])
    late = terms[-12:]
    ratios = late[1:] / np.maximum(late[:-1], 1e-300)
    worst = float(ratios.max())
    ok = worst < tail_ratio and late[-1] < 1e-3 * max(terms.sum(), 1e-300)
    return ok, {
        "partial_sum": float(terms.sum()),
        "worst_late_ratio": worst,
        "last_term": float(late[-1]),
    }


def strong_dini_ok(omega: Modulus, k_range=range(2, 26), c_cap: float = 50.0) -> tuple[bool, dict]:
    """Check integral_0^eps omega/eta <= c*omega(eps) at eps = 2^-k.

    The tail of the integral below the smallest resolved dyadic level is
    extrapolated geometrically; ratios I(eps)/omega(eps) must stay bounded
    (by ``c_cap``) and must not trend upward, otherwise the modulus is
    rejected.
    """
    deep = 220
    terms = np.array([_dyadic_term(omega, k) for k in range(0, deep)])
    # geometric tail estimate below level `deep`
    r = terms[-1] / max(terms[-2], 1e-300)
    tail = terms[-1] * r / (1.0 - r) if r < 0.95 else np.inf
    ratios = []
    for k in k_range:
        integral = terms[k:].sum() + tail
        ratios.append(integral / float(omega(2.0**-k)))
    ratios = np.array(ratios)
    growing = ratios[-1] > 1.25 * ratios[0]
    ok = bool(np.isfinite(ratios).all() and ratios.max() < c_cap and not growing)
    return ok, {
        "max_ratio": float(ratios.max()) if np.isfinite(ratios).any() else np.inf,
        "first_ratio": float(ratios[0]),
        "last_ratio": float(ratios[-1]),
    }


def semi_additive_ok(omega: Modulus, n: int = 2000, seed: int = 0) -> bool:
    """Sampled check of omega(a+b) <= omega(a) + omega(b)."""
    rng = np.random.default_rng(seed)
    a = 10.0 ** rng.uniform(-8, 0.3, n)
    b = 10.0 ** rng.uniform(-8, 0.3, n)
    return bool(np.all(omega(a + b) <= omega(a) + omega(b) + 1e-12))


@dataclass(frozen=True)
class ModulusConfig:
    """Moduli for the kernel envelopes plus the position-dependent assembly rule.

    ``omega1`` must satisfy the plain Dini condition, ``omega1_star`` the
    strong one; both are validated at construction.  ``omega_for`` applies
    the selection rule: near a corner (distance <= r0/2) the strong modulus
    alone, elsewhere the sum.  The distinct slots omega0/omega1/omega2 of
    the continuity lemmas default to the assembled omega, matching the
    equal-moduli choice made for the kernel estimates.
    """

    omega1: Modulus = field(default_factory=lambda: power_modulus(0.5))
    omega1_star: Modulus = field(default_factory=lambda: power_modulus(0.5))
    r0: float = 0.125
    validate: bool = True

    def __post_init__(self):
        if self.r0 <= 0:
            raise ConfigError("r0 must be positive")
        if not self.validate:
            return
        ok, info = dini_ok(self.omega1)
        if not ok:
            raise ConfigError(f"omega1={self.omega1.name} fails the Dini test: {info}")
        ok, info = strong_dini_ok(self.omega1_star)
        if not ok:
            raise ConfigError(
                f"omega1*={self.omega1_star.name} fails the strong Dini test: {info}"
            )

    def omega_for(self, corner_distance: float) -> Modulus:
        """Modulus assigned to a point at the given distance from the corner set."""
        if corner_distance <= 0.5 * self.r0:
            return self.omega1_star
        return self.omega1 + self.omega1_star
