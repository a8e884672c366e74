"""Corner-graded quadrature on the circle and the Nystrom boundary system.

Grid
----
Nodes live on the arcs between consecutive corner preimages.  Within an
arc the graded substitution w(t) = t^q / (t^q + (1-t)^q) clusters node
angles toward both ends like (distance)^((q-1)/q), which resolves density
singularities |S - X|^{-gamma} with gamma < 1.  Node weights are exact
cell widths, so the weights always sum to the covered measure.  With
delta > 0 the arcs shrink away from each corner by the chordal exclusion
radius (the truncated system of the Fredholm variant); nodes never sit on
corners in either mode.

Singular integrals
------------------
I[Omega](Z) = (1/2*pi*i) * integral_Gamma Omega(S, Z)/(S - Z) dS.

For Z on the circle the kernels of this problem vanish on the diagonal,
so the integrand extends analytically across S = Z (away from corners):
the plain periodic node sum applies and is spectrally accurate on smooth
arcs.  When Z coincides with a node the removable 0/0 value is filled by
a symmetric two-sided limit along the circle.

For Z strictly inside, the integrand has a genuine pole at distance
1 - |Z| from the contour, and once that distance drops below a node
spacing no fixed grid resolves it.  Such points are evaluated on a
panel-only decomposition of the whole circle: Gauss-Legendre panels in
geometric ladders toward the singular angle (floor ~ dist/4) and toward
every corner.  The same route serves evaluation near corners, where the
density itself is singular.

System
------
Collocating the two boundary equations at the nodes yields a real
2N x 2N system: the first N rows carry the u1 equation, the last N the
u3 equation, with the 1/2 density terms on the diagonal, Re/Im
projections of the complex Nystrom blocks per the fixed sign pattern,
and the rank-one mean-constant blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ConfigError,
    NodeOnCorner,
    SingularityUnresolved,
    SingularSystem,
)
from .geometry import CornerDomainMap
from .kernels import (
    BoundaryDensity,
    kernel_k1,
    kernel_k2,
    kernel_omega_star,
    kernel_omega_star_star,
)

TWO_PI = 2.0 * np.pi

H_NEAR = 0.05        # boundary/corner distance below which panels take over
W_INNER = 1e-8       # ladder floor at the singular angle
W_CORNER = 1e-12     # ladder floor toward a corner attractor
DIAG_EPS = 1e-5      # offset for the symmetric diagonal limit
STAB_TOL = 5e-7      # relative GL(8) vs GL(16) disagreement allowed
COND_THRESHOLD = 1e14


@lru_cache(maxsize=8)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    lo: float
    hi: float
    start: int      # first node index
    count: int


@dataclass(frozen=True)
class QuadratureGrid:
    """Corner-graded node/weight set on the circle.

    ``thetas`` are node angles (radians, increasing within each arc),
    ``weights`` the exact cell widths, ``cell_lo``/``cell_hi`` the cell
    edges.  ``delta`` is the chordal corner-exclusion radius and ``q`` the
    grading exponent.
    """

    thetas: np.ndarray
    weights: np.ndarray
    cell_lo: np.ndarray
    cell_hi: np.ndarray
    arcs: tuple[Arc, ...]
    corner_angles: np.ndarray
    delta: float
    q: float

    @property
    def N(self) -> int:
        return len(self.thetas)

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.thetas)

    @classmethod
    def build(cls, domain_map, N: int, q: float = 3.0, delta: float = 0.0) -> "QuadratureGrid":
        """Grid for a map (or an explicit corner-angle array)."""
        if N < 8:
            raise ConfigError("need at least 8 nodes")
        if q < 1.0:
            raise ConfigError("grading exponent q must be >= 1")
        if delta < 0.0:
            raise ConfigError("delta must be >= 0")
        if isinstance(domain_map, CornerDomainMap):
            corner_angles = domain_map.corner_angles
        else:
            corner_angles = np.sort(np.asarray(domain_map, dtype=float) % TWO_PI)

        if len(corner_angles) == 0:
            theta = (np.arange(N) + 0.5) * TWO_PI / N
            edges = np.arange(N + 1) * TWO_PI / N
            arc = Arc(0.0, TWO_PI, 0, N)
            return cls(theta, np.full(N, TWO_PI / N), edges[:-1], edges[1:],
                       (arc,), corner_angles, delta, q)

        if delta >= 2.0:
            raise ConfigError("delta must be below the circle diameter")
        gap = 2.0 * np.arcsin(delta / 2.0) if delta > 0 else 0.0
        m = len(corner_angles)
        spans = []
        for j in range(m):
            lo = corner_angles[j]
            hi = corner_angles[(j + 1) % m] + (TWO_PI if j == m - 1 else 0.0)
            if hi - lo <= 2.0 * gap:
                raise ConfigError(f"delta={delta} swallows the arc at angle {lo:g}")
            spans.append((lo + gap, hi - gap))
        lengths = np.array([b - a for a, b in spans])
        counts = np.maximum(8, np.round(N * lengths / lengths.sum()).astype(int))
        while counts.sum() != N:
            if counts.sum() > N:
                counts[np.argmax(counts)] -= 1
            else:
                counts[np.argmin(counts)] += 1

        thetas, weights, clo, chi, arcs = [], [], [], [], []
        start = 0
        for (a, b), n in zip(spans, counts):
            t_edges = np.arange(n + 1) / n
            t_mid = (np.arange(n) + 0.5) / n
            edges = a + (b - a) * _grading(t_edges, q)
            thetas.append(a + (b - a) * _grading(t_mid, q))
            weights.append(np.diff(edges))
            clo.append(edges[:-1])
            chi.append(edges[1:])
            arcs.append(Arc(a, b, start, n))
            start += n
        grid = cls(
            np.concatenate(thetas), np.concatenate(weights),
            np.concatenate(clo), np.concatenate(chi),
            tuple(arcs), corner_angles, delta, q,
        )
        if delta > 0:
            X = np.exp(1j * corner_angles)
            dmin = np.min(np.abs(grid.nodes[:, None] - X[None, :]))
            if dmin < delta:
                raise NodeOnCorner(f"node within delta={delta} of a corner")
        return grid

    # -- lookup helpers -------------------------------------------------------

    def corner_gap(self, theta) -> np.ndarray:
        """Angular distance from theta to the nearest corner (inf when none)."""
        theta = np.asarray(theta, dtype=float)
        if not self.corner_angles.size:
            return np.full(theta.shape, np.inf) if theta.shape else np.inf
        d = np.abs(np.angle(np.exp(1j * (theta[..., None] - self.corner_angles))))
        d = d.min(axis=-1)
        return d if theta.shape else float(d)

    def arc_of(self, theta: float) -> Arc:
        th = theta % TWO_PI
        for arc in self.arcs:
            if arc.lo <= th <= arc.hi or arc.lo <= th + TWO_PI <= arc.hi:
                return arc
        # theta falls in an excluded corner band; attach to the nearest arc
        best, gap = self.arcs[0], np.inf
        for arc in self.arcs:
            for cand in (th, th + TWO_PI):
                g = min(abs(cand - arc.lo), abs(cand - arc.hi))
                if g < gap:
                    best, gap = arc, g
        return best

    def interpolant(self, values: np.ndarray) -> Callable:
        """Piecewise-cubic interpolant of node values, arc by arc.

        Stencils never cross a corner; near arc ends the 4-point stencil is
        one-sided.  The no-corner grid wraps around periodically.
        """
        values = np.asarray(values, dtype=float)
        periodic = len(self.arcs) == 1 and not self.corner_angles.size

        def evaluate(S):
            S = np.asarray(S, dtype=complex)
            th = np.angle(S) % TWO_PI
            flat = np.ravel(th)
            out = np.empty(flat.shape)
            done = np.zeros(flat.shape, dtype=bool)
            for arc in self.arcs:
                shifted = np.where(flat < arc.lo, flat + TWO_PI, flat)
                mask = (shifted >= arc.lo) & (shifted <= arc.hi) & ~done
                if mask.any():
                    out[mask] = self._interp_arc(arc, values, shifted[mask], periodic)
                    done[mask] = True
            if not done.all():
                # queries inside excluded corner bands: clamp to the nearest arc
                for i in np.nonzero(~done)[0]:
                    idx, coeffs = self.interp_stencil(float(flat[i]))
                    out[i] = float(np.dot(coeffs, values[idx]))
            out = out.reshape(th.shape)
            return out if S.shape else float(out)

        return evaluate

    def _interp_arc(self, arc: Arc, values, tq: np.ndarray, periodic: bool) -> np.ndarray:
        nodes = self.thetas[arc.start:arc.start + arc.count]
        vals = values[arc.start:arc.start + arc.count]
        if periodic:
            xs = np.concatenate([nodes[-2:] - TWO_PI, nodes, nodes[:2] + TWO_PI])
            vs = np.concatenate([vals[-2:], vals, vals[:2]])
        else:
            xs, vs = nodes, vals
        pos = np.searchsorted(xs, tq)
        i0 = np.clip(pos - 2, 0, max(len(xs) - 4, 0))
        take = min(4, len(xs))
        idx = i0[:, None] + np.arange(take)[None, :]
        X = xs[idx]
        V = vs[idx]
        # vectorized Lagrange weights over the 4-point stencils
        C = np.ones_like(X)
        for k in range(take):
            for l in range(take):
                if l != k:
                    C[:, k] *= (tq - X[:, l]) / (X[:, k] - X[:, l])
        return np.sum(C * V, axis=1)

    def interp_stencil(self, theta: float) -> tuple[np.ndarray, np.ndarray]:
        arc = self.arc_of(theta)
        th = theta % TWO_PI
        if th < arc.lo:
            th += TWO_PI
        nodes = self.thetas[arc.start:arc.start + arc.count]
        periodic = len(self.arcs) == 1 and not self.corner_angles.size
        if periodic:
            ext = np.concatenate([nodes[-2:] - TWO_PI, nodes, nodes[:2] + TWO_PI])
            pos = np.searchsorted(ext, th)
            i0 = int(np.clip(pos - 2, 0, len(ext) - 4))
            idx = (np.arange(i0, i0 + 4) - 2) % arc.count + arc.start
            xs = ext[i0:i0 + 4]
        else:
            pos = np.searchsorted(nodes, th)
            i0 = int(np.clip(pos - 2, 0, max(arc.count - 4, 0)))
            take = min(4, arc.count)
            idx = np.arange(i0, i0 + take) + arc.start
            xs = self.thetas[idx]
        return idx, _lagrange_coeffs(xs, th)


def _grading(t, q: float):
    tq = t**q
    return tq / (tq + (1.0 - t) ** q)


def _lagrange_coeffs(xs: np.ndarray, x: float) -> np.ndarray:
    n = len(xs)
    c = np.ones(n)
    for k in range(n):
        for l in range(n):
            if l != k:
                c[k] *= (x - xs[l]) / (xs[k] - xs[l])
    return c


# ---------------------------------------------------------------------------
# Quadrature engines
# ---------------------------------------------------------------------------


def _node_sum(g, grid: QuadratureGrid, diag_theta: float | None = None) -> complex:
    """Weighted node sum; removable 0/0 at a node handled by a symmetric limit."""
    th = grid.thetas
    vals = np.asarray(g(th), dtype=complex)
    if diag_theta is not None:
        hit = np.abs(np.angle(np.exp(1j * (th - diag_theta)))) < 1e-9
        for i in np.nonzero(hit)[0]:
            eps = min(DIAG_EPS, 0.4 * grid.weights[i],
                      0.25 * grid.corner_gap(th[i]))
            two = np.asarray(g(np.array([th[i] - eps, th[i] + eps])), dtype=complex)
            vals[i] = 0.5 * (two[0] + two[1])
    if not np.all(np.isfinite(vals)):
        raise SingularityUnresolved("non-finite integrand at a grid node")
    return complex(np.dot(grid.weights, vals))


@dataclass(frozen=True)
class _Attractor:
    theta: float
    w_min: float
    drop_inner: bool = False


def _ladder_edges(a: float, b: float, w_min: float) -> np.ndarray:
    """Geometric panel edges from a toward b, starting at width w_min."""
    if b - a <= w_min:
        return np.array([a, b])
    edges = [a]
    pos, w = a, w_min
    while pos + w < b:
        pos += w
        edges.append(pos)
        w *= 2.0
    edges.append(b)
    return np.array(edges)


def _segment_panels(a: float, b: float, attr_a, attr_b) -> list[tuple[float, float]]:
    if b - a <= 1e-15:
        return []
    if attr_a is not None and attr_b is not None:
        mid = 0.5 * (a + b)
        return _segment_panels(a, mid, attr_a, None) + _segment_panels(mid, b, None, attr_b)
    if attr_a is not None:
        edges = _ladder_edges(a, b, attr_a.w_min)
        if attr_a.drop_inner and len(edges) > 2:
            edges = edges[1:]
        return list(zip(edges[:-1], edges[1:]))
    if attr_b is not None:
        edges = (a + b) - _ladder_edges(a, b, attr_b.w_min)[::-1]
        if attr_b.drop_inner and len(edges) > 2:
            edges = edges[:-1]
        return list(zip(edges[:-1], edges[1:]))
    return [(a, b)]


def _panel_rule(lo: float, hi: float, attractors: Sequence[_Attractor], n_gl: int):
    """GL nodes/weights covering [lo, hi] graded toward each attractor."""
    inner = sorted((at for at in attractors if lo < at.theta < hi),
                   key=lambda at: at.theta)
    at_lo = next((at for at in attractors if abs(at.theta - lo) <= 1e-14), None)
    at_hi = next((at for at in attractors if abs(at.theta - hi) <= 1e-14), None)
    cuts = [lo] + [at.theta for at in inner] + [hi]
    ends = [at_lo] + inner + [at_hi]
    panels = []
    for k in range(len(cuts) - 1):
        panels.extend(_segment_panels(cuts[k], cuts[k + 1], ends[k], ends[k + 1]))
    x, w = _gl(n_gl)
    pts, wts = [], []
    for a, b in panels:
        pts.append(0.5 * (b - a) * x + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * w)
    if not pts:
        return np.array([]), np.array([])
    return np.concatenate(pts), np.concatenate(wts)


def _panel_circle(g, theta_star: float, w_min_star: float,
                  corner_angles: np.ndarray, n_gl: int = 16,
                  corner_w_min: float = W_CORNER,
                  stabilize: bool = True) -> complex:
    """Full-circle integral by GL panels graded toward theta_star and the corners."""
    lo, hi = theta_star - np.pi, theta_star + np.pi
    attractors = [_Attractor(theta_star, w_min_star)]
    for ca in np.atleast_1d(corner_angles):
        off = float(np.angle(np.exp(1j * (ca - theta_star))))
        if abs(off) < 1e-14:
            continue  # merged with the theta_star ladder
        if abs(off) > np.pi - 1e-12:
            # antipodal corner touches both window ends
            attractors.append(_Attractor(lo, corner_w_min))
            attractors.append(_Attractor(hi, corner_w_min))
        else:
            attractors.append(_Attractor(theta_star + off, corner_w_min))

    def value(n: int) -> complex:
        pts, wts = _panel_rule(lo, hi, attractors, n)
        return complex(np.dot(wts, np.asarray(g(pts), dtype=complex)))

    fine = value(n_gl)
    if stabilize:
        coarse = value(max(n_gl // 2, 4))
        if abs(fine - coarse) > STAB_TOL * max(1.0, abs(fine)):
            raise SingularityUnresolved(
                f"panel refinement disagreement {abs(fine - coarse):.2e} "
                f"at theta={theta_star:g}"
            )
    return fine


# ---------------------------------------------------------------------------
# The Cauchy-type integral, the Schwarz integral, the mean constant
# ---------------------------------------------------------------------------


def _on_circle(Z: complex) -> bool:
    return abs(abs(Z) - 1.0) <= 1e-12


def integral_I(omega, Z: complex, grid: QuadratureGrid,
               stabilize: bool = True) -> complex:
    """(1/2*pi*i) * integral_Gamma omega(S, Z)/(S - Z) dS.

    ``omega`` is a callable (S_array, Z) -> complex array that must accept
    arbitrary circle points.  Boundary Z relies on the diagonal vanishing
    of the kernel (the integral is then improper but convergent); interior
    Z within H_NEAR of the circle or of a corner is evaluated on graded
    panels.
    """
    Z = complex(Z)

    def g(theta):
        S = np.exp(1j * theta)
        return omega(S, Z) * S / ((S - Z) * TWO_PI)

    if _on_circle(Z):
        th = float(np.angle(Z))
        if grid.corner_angles.size and grid.corner_gap(th) < 1e-9:
            raise NodeOnCorner("boundary evaluation point sits on a corner")
        return _node_sum(g, grid, diag_theta=th)
    dist = 1.0 - abs(Z)
    if dist < 0.0:
        raise ConfigError("evaluation point lies outside the closed disk")
    corner_dist = np.inf
    if grid.corner_angles.size:
        corner_dist = float(np.min(np.abs(Z - np.exp(1j * grid.corner_angles))))
    if dist < H_NEAR or corner_dist < H_NEAR:
        return _panel_circle(g, float(np.angle(Z)), max(dist / 4.0, W_INNER),
                             grid.corner_angles, stabilize=stabilize)
    return _node_sum(g, grid)


def schwarz_integral(phi, Z: complex, grid: QuadratureGrid) -> complex:
    """Complex Schwarz integral (1/2*pi*i) * int (phi(S)/S) (S+Z)/(S-Z) dS, |Z| < 1.

    Its real part is the harmonic extension of phi; approaching the circle
    it converges to the boundary values, which is where the 1/2 density
    terms of the boundary system come from.
    """
    Z = complex(Z)
    if abs(Z) >= 1.0:
        raise ConfigError("Schwarz integral is defined for interior points only")

    def g(theta):
        S = np.exp(1j * theta)
        return phi(S) * (S + Z) / ((S - Z) * TWO_PI)

    dist = 1.0 - abs(Z)
    corner_dist = np.inf
    if grid.corner_angles.size:
        corner_dist = float(np.min(np.abs(Z - np.exp(1j * grid.corner_angles))))
    if dist < H_NEAR or corner_dist < H_NEAR:
        return _panel_circle(g, float(np.angle(Z)), max(dist / 4.0, W_INNER),
                             grid.corner_angles)
    return _node_sum(g, grid)


def mean_constant(phi, grid: QuadratureGrid, return_residual: bool = False):
    """C[phi] = (1/4*pi*i) * integral_Gamma phi(S)/S dS = mean(phi)/2.

    The quadrature value is real up to rounding; the imaginary residual is
    available for reporting and is discarded from the returned constant.
    """
    S = grid.nodes
    vals = np.asarray(phi(S), dtype=complex)
    total = complex(np.dot(grid.weights, vals * 1j * S / S) / (4j * np.pi))
    if return_residual:
        return total.real, abs(total.imag)
    return total.real


def boundary_value_u13(domain_map: CornerDomainMap, density: BoundaryDensity,
                       Z0: complex, grid: QuadratureGrid) -> tuple[float, float]:
    """Boundary traces (U1, U3) of the represented field at Z0 on the circle.

    Implements the jump relations: half the density plus the real part of
    the combined-kernel integral plus the mean constant.
    """
    Z0 = complex(Z0)

    def om_star(S, Z):
        return kernel_omega_star(domain_map, density, S, Z)

    def om_star_star(S, Z):
        return kernel_omega_star_star(domain_map, density, S, Z)

    i_star = integral_I(om_star, Z0, grid)
    i_star2 = integral_I(om_star_star, Z0, grid)
    c1 = mean_constant(density.phi1, grid)
    c3 = mean_constant(density.phi3, grid)
    u1 = 0.5 * float(density.phi1(np.array([Z0]))[0]) + i_star.real + c1
    u3 = 0.5 * float(density.phi3(np.array([Z0]))[0]) + i_star2.real + c3
    return u1, u3


# ---------------------------------------------------------------------------
# System assembly and solve
# ---------------------------------------------------------------------------


@dataclass
class LinearSystem:
    """Real 2N x 2N collocation system; first N rows = u1 equation."""

    matrix: np.ndarray
    rhs: np.ndarray
    grid: QuadratureGrid
    domain_map: CornerDomainMap
    data: tuple[Callable, Callable]
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.grid.N


def _nystrom_blocks(domain_map: CornerDomainMap, grid: QuadratureGrid):
    """Complex matrices A1, A2 with (A_k @ phi)[i] ~ I[Omega_k^phi](S_i).

    Off-diagonal entries are plain weighted kernel values; the diagonal
    carries the removable limit of K(S, S_i)/(S - S_i), obtained from a
    symmetric two-sided offset along the circle (second-order accurate,
    and safe against crossing a corner).
    """
    S = grid.nodes
    N = grid.N
    with np.errstate(divide="ignore", invalid="ignore"):
        K1 = kernel_k1(domain_map, S[None, :], S[:, None])
        K2 = kernel_k2(domain_map, S[None, :], S[:, None])
        base = grid.weights[None, :] * S[None, :] / ((S[None, :] - S[:, None]) * TWO_PI)
        A1 = K1 * base
        A2 = K2 * base
    for i in range(N):
        th = grid.thetas[i]
        eps = min(DIAG_EPS, 0.4 * grid.weights[i], 0.25 * grid.corner_gap(th))
        Sp = np.exp(1j * np.array([th - eps, th + eps]))
        factor = Sp / ((Sp - S[i]) * TWO_PI)
        A1[i, i] = grid.weights[i] * np.mean(kernel_k1(domain_map, Sp, S[i]) * factor)
        A2[i, i] = grid.weights[i] * np.mean(kernel_k2(domain_map, Sp, S[i]) * factor)
    return A1, A2


def assemble_system(domain_map: CornerDomainMap, data, grid: QuadratureGrid) -> LinearSystem:
    """Collocation system for the boundary equations with pulled-back data.

    ``data = (u1_tilde, u3_tilde)`` are callables of circle points.  The
    matrix does not depend on the data; the right-hand side is linear in it.
    """
    if grid.N == 0:
        raise ConfigError("empty grid")
    u1t, u3t = data
    S = grid.nodes
    rhs = np.concatenate([np.asarray(u1t(S), float), np.asarray(u3t(S), float)])
    if not np.all(np.isfinite(rhs)):
        raise ConfigError("boundary data is not finite at the grid nodes")

    A1, A2 = _nystrom_blocks(domain_map, grid)
    N = grid.N
    eye = np.eye(N)
    cvec = grid.weights / (4.0 * np.pi)
    M = np.zeros((2 * N, 2 * N))
    M[:N, :N] = 0.5 * eye + A1.real - 2.0 * A2.imag + np.outer(np.ones(N), cvec)
    M[:N, N:] = -2.0 * A2.real
    M[N:, :N] = -2.0 * A2.real
    M[N:, N:] = 0.5 * eye + A1.real + 2.0 * A2.imag + np.outer(np.ones(N), cvec)
    return LinearSystem(M, rhs, grid, domain_map, (u1t, u3t),
                        {"N": N, "delta": grid.delta, "q": grid.q})


def solve_densities(system: LinearSystem, on_singular: str = "raise",
                    cond_threshold: float = COND_THRESHOLD,
                    n_checkpoints: int = 32) -> tuple[BoundaryDensity, dict]:
    """Dense direct solve; returns the density and a diagnostics record.

    The 1-norm condition estimate above ``cond_threshold`` signals possible
    non-uniqueness (never excluded for this system).  ``on_singular`` is
    either ``"raise"`` (SingularSystem) or ``"lstsq"`` (flagged minimal-norm
    solve).  Diagnostics include the collocation residual re-evaluated at
    off-grid checkpoints (cell-midpoint angles).
    """
    A, b = system.matrix, system.rhs
    # corner-adjacent collocation rows can dominate by orders of magnitude
    # (near-touching cusp banks); equilibrate before factoring
    row_scale = 1.0 / np.maximum(np.abs(A).max(axis=1), 1e-300)
    As = A * row_scale[:, None]
    bs = b * row_scale
    anorm = np.linalg.norm(As, 1)
    lu, piv = scipy.linalg.lu_factor(As)
    rcond, _ = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0.0 else 1.0 / rcond
    singular = cond > cond_threshold
    if singular and on_singular == "raise":
        raise SingularSystem(
            f"condition estimate {cond:.3e} exceeds {cond_threshold:.1e}", cond
        )
    if cond > 1e8:
        # near-null directions of the representation (e.g. the density
        # (-sin, cos) generating i*zeta on the disk) and effectively
        # unconstrained corner-adjacent unknowns: the truncated-SVD
        # minimal-norm solution removes both deterministically
        x, *_ = scipy.linalg.lstsq(As, bs, cond=1e-7, lapack_driver="gelsd")
        solver = "svd"
    else:
        x = scipy.linalg.lu_solve((lu, piv), bs)
        solver = "lu"

    N = system.N
    gammas = tuple(c.gamma for c in system.domain_map.corners)
    density = density_from_samples(system.grid, x[:N], x[N:], gammas)
    diagnostics = {
        "condition": float(cond),
        "singular": bool(singular),
        "regularized": solver == "svd",
        "solver": solver,
        "row_scale_spread": float(row_scale.max() / row_scale.min()),
        "matrix_residual_inf": float(np.abs(A @ x - b).max()),
        "N": N,
        "delta": system.grid.delta,
        "q": system.grid.q,
    }
    diagnostics["offgrid_residual_inf"] = collocation_residual(
        system, density, n_checkpoints
    )
    return density, diagnostics


def collocation_residual(system: LinearSystem, density: BoundaryDensity,
                         n_checkpoints: int = 32) -> float:
    """Max boundary-equation residual at cell-midpoint angles off the grid."""
    grid = system.grid
    u1t, u3t = system.data
    mids = []
    for arc in grid.arcs:
        th = grid.thetas[arc.start:arc.start + arc.count]
        mids.append(0.5 * (th[:-1] + th[1:]))
    mids = np.concatenate(mids) if mids else np.array([])
    if len(mids) == 0:
        return np.nan
    step = max(1, len(mids) // n_checkpoints)
    worst = 0.0
    for th in mids[::step]:
        Z0 = complex(np.exp(1j * th))
        u1, u3 = boundary_value_u13(system.domain_map, density, Z0, grid)
        worst = max(worst,
                    abs(u1 - float(u1t(np.array([Z0]))[0])),
                    abs(u3 - float(u3t(np.array([Z0]))[0])))
    return float(worst)


def density_from_samples(grid: QuadratureGrid, v1, v3, gammas=()) -> BoundaryDensity:
    """Density from node samples with the grid's piecewise-cubic interpolation."""
    f1 = grid.interpolant(np.asarray(v1, dtype=float))
    f3 = grid.interpolant(np.asarray(v3, dtype=float))
    return BoundaryDensity(f1, f3, tuple(gammas),
                           {"samples": (np.asarray(v1, float), np.asarray(v3, float))})


# ---------------------------------------------------------------------------
# Remark-style delta sweep
# ---------------------------------------------------------------------------


@dataclass
class DeltaSweepReport:
    """Per-delta diagnostics and probe values; no convergence claim is made.

    Whether the truncated solutions converge as delta -> 0 is an open
    question; this report only tabulates what happened.
    """

    deltas: list[float]
    probe_angles: list[float]
    probe_phi1: list[list[float]]
    probe_phi3: list[list[float]]
    conditions: list[float]
    singular_flags: list[bool]
    offgrid_residuals: list[float]

    def pairwise_differences(self) -> list[dict]:
        out = []
        for k in range(len(self.deltas) - 1):
            d1 = np.array(self.probe_phi1[k]) - np.array(self.probe_phi1[k + 1])
            d3 = np.array(self.probe_phi3[k]) - np.array(self.probe_phi3[k + 1])
            out.append({
                "delta_pair": (self.deltas[k], self.deltas[k + 1]),
                "max_dphi1": float(np.abs(d1).max()),
                "max_dphi3": float(np.abs(d3).max()),
            })
        return out


def delta_sweep(domain_map: CornerDomainMap, data, deltas: Sequence[float],
                N: int = 256, q: float = 3.0,
                probe_angles: Sequence[float] | None = None) -> DeltaSweepReport:
    """Solve the truncated system for each delta and tabulate probe values."""
    deltas = list(deltas)
    if not deltas:
        raise ConfigError("delta sweep requires a non-empty delta list")
    if any(d <= 0 for d in deltas):
        raise ConfigError("sweep deltas must be positive")
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        raise ConfigError("sweep deltas must be strictly decreasing")
    if probe_angles is None:
        corner = domain_map.corner_angles
        probe_angles = [th for th in (0.4, 1.2, 2.0, 4.4, 5.6)
                        if not corner.size or np.min(np.abs(
                            np.angle(np.exp(1j * (corner - th))))) > 0.35]
    report = DeltaSweepReport(deltas, list(probe_angles), [], [], [], [], [])
    for d in deltas:
        grid = QuadratureGrid.build(domain_map, N, q=q, delta=d)
        system = assemble_system(domain_map, data, grid)
        density, diag = solve_densities(system, on_singular="lstsq")
        S = np.exp(1j * np.asarray(probe_angles))
        report.probe_phi1.append([float(v) for v in density.phi1(S)])
        report.probe_phi3.append([float(v) for v in density.phi3(S)])
        report.conditions.append(diag["condition"])
        report.singular_flags.append(diag["singular"])
        report.offgrid_residuals.append(diag["offgrid_residual_inf"])
    return report
