"""Differential equations for algebra-valued unknowns: w'_phi = F(tau, w).

A solution w satisfies dw_tau = rep(F(tau, w(tau))) dphi_tau, and every
solver here reports the finite-difference residual of exactly that identity,
normalized by (1 + |dphi_tau|) so tolerances are scale free.  Closed-form
families (separable, quadratic right-hand side, exponential) come straight
from integrating dv / L(v) against the phi-line integral; the fixed-point
iteration covers the autonomous existence theorem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NewtonDivergence, NoConvergence
from .integrals import Path, line_integral
from .maps import SmoothMap, fd_jacobian

RESIDUAL_STEP = 1e-6


@dataclass
class SolutionSamples:
    taus: list
    values: np.ndarray
    max_residual: float


def solution_residual(w, rhs, phi, algebra, grid, step=RESIDUAL_STEP):
    """max over the grid of |dw - rep(F(tau, w)) dphi| / (1 + |dphi|)."""
    worst = 0.0
    values = []
    for tau in grid:
        tau = np.asarray(tau, dtype=float)
        wt = np.asarray(w(tau))
        values.append(wt)
        dw = fd_jacobian(w, tau, n=algebra.dim, base=step)
        jphi = phi.jacobian(tau)
        target = algebra.rep(rhs(tau, wt)) @ jphi
        denom = 1.0 + float(np.linalg.norm(jphi))
        worst = max(worst, float(np.linalg.norm(dw - target)) / denom)
    return SolutionSamples(taus=[np.asarray(t, dtype=float) for t in grid],
                           values=np.stack(values), max_residual=worst)


@dataclass
class OdeSolution:
    """A closed-form solution bundled with its defining data."""

    w: object  # tau -> element
    rhs: object  # (tau, w) -> element
    phi: SmoothMap
    algebra: object

    def __call__(self, tau):
        return self.w(np.asarray(tau, dtype=float))

    def samples(self, grid, step=RESIDUAL_STEP):
        return solution_residual(self.w, self.rhs, self.phi, self.algebra, grid, step=step)


def solve_square_rhs(K, H, C, phi, algebra):
    """Solution w = -e / (H(tau) + C) of w'_phi = K(tau) w^2.

    K must be differentiable relative to (phi, algebra) with antiderivative H;
    the solution exists wherever H(tau) + C is regular (inversion raises
    SingularElement elsewhere).
    """
    C = algebra.element(C)

    def w(tau):
        return -algebra.inverse(H(tau) + C)

    def rhs(tau, wt):
        return algebra.product(K(tau), algebra.product(wt, wt))

    return OdeSolution(w=w, rhs=rhs, phi=phi, algebra=algebra)


def solve_phi_rhs(K, C, algebra):
    """Solution w = K(tau)^2 / 2 + C of w'_phi = K(tau) when phi = K."""
    C = algebra.element(C)

    def w(tau):
        k = K(tau)
        return algebra.product(k, k) / 2.0 + C

    def rhs(tau, wt):
        return K(tau)

    return OdeSolution(w=w, rhs=rhs, phi=K, algebra=algebra)


def solve_exponential(phi, algebra, C):
    """Solution w = C exp(phi(tau)) of w'_phi = w."""
    C = algebra.element(C)

    def w(tau):
        return algebra.product(C, algebra.exp(phi(tau)))

    def rhs(tau, wt):
        return wt

    return OdeSolution(w=w, rhs=rhs, phi=phi, algebra=algebra)


class SeparableSolution:
    """Implicit solution of w'_phi = K(tau) L(w) recovered by Newton.

    The defining identity equates an algebra-line integral in w-space with a
    phi-line integral in tau-space:

        integral_{w0}^{w} dv / L(v)  =  integral_{tau0}^{tau} K dphi.

    Left side: straight segments from w0 with the identity reference map.
    Newton uses rep(e / L(w)) as the exact Jacobian of the left side and the
    previous grid point as warm start along a path of tau values.
    """

    def __init__(self, K, L, phi, algebra, w0, tau0, segments=256, max_iter=50):
        self.K = K
        self.L = L
        self.phi = phi
        self.algebra = algebra
        self.w0 = algebra.element(w0)
        self.tau0 = np.asarray(tau0, dtype=float)
        self.segments = segments
        self.max_iter = max_iter
        self._id = SmoothMap.identity(algebra.dim)
        self._inv_L = SmoothMap(algebra.dim, algebra.dim,
                                lambda v: algebra.inverse(L(v)), name="e/L")

    def _left(self, w):
        if np.allclose(w, self.w0):
            return self.algebra.zero()
        return line_integral(self._inv_L, self._id, self.algebra,
                             Path.segment(self.w0, w, segments=self.segments))

    def _right(self, tau):
        kmap = SmoothMap(self.phi.k, self.algebra.dim, self.K, name="K")
        return line_integral(kmap, self.phi, self.algebra,
                             Path.segment(self.tau0, tau, segments=self.segments))

    def solve_at(self, tau, warm=None):
        target = self._right(np.asarray(tau, dtype=float))
        w = self.w0.copy() if warm is None else np.asarray(warm, dtype=float).copy()
        tol = 1e-12 * (1.0 + float(np.linalg.norm(target)))
        for _ in range(self.max_iter):
            r = self._left(w) - target
            if np.linalg.norm(r) <= tol:
                return w
            jac = self.algebra.rep(self.algebra.inverse(self.L(w)))
            w = w - np.linalg.solve(jac, r)
        raise NewtonDivergence(f"no convergence at tau={tau} after {self.max_iter} iterations")

    def eval_path(self, taus):
        out = []
        warm = None
        for tau in taus:
            warm = self.solve_at(tau, warm=warm)
            out.append(warm)
        return np.stack(out)

    def rhs(self, tau, wt):
        return self.algebra.product(self.K(np.asarray(tau, dtype=float)), self.L(wt))

    def samples(self, grid, step=RESIDUAL_STEP):
        warm = {}

        def w(tau):
            key = tuple(np.round(np.asarray(tau, dtype=float), 12))
            if key not in warm:
                warm[key] = self.solve_at(tau)
            return warm[key]

        return solution_residual(w, self.rhs, self.phi, self.algebra, grid, step=step)


def separable_solve(K, L, phi, algebra, w0, tau0, segments=256, max_iter=50):
    return SeparableSolution(K, L, phi, algebra, w0, tau0,
                             segments=segments, max_iter=max_iter)


# -- fixed-point iteration for autonomous right-hand sides ---------------------


@dataclass
class PicardResult:
    taus: np.ndarray
    values: np.ndarray  # final iterate on the path nodes
    history: list  # successive sup-norm differences
    iterations: int

    def value_at_end(self):
        return self.values[-1]


def _cumulative_integral(values, h):
    """Cumulative integral of algebra-valued samples on a uniform grid.

    Simpson pairs give the even nodes; odd nodes integrate the local
    quadratic over its first half, keeping the whole table O(h^4).
    """
    m = values.shape[0]
    out = np.zeros_like(values)
    for idx in range(2, m, 2):
        out[idx] = out[idx - 2] + (h / 3.0) * (
            values[idx - 2] + 4.0 * values[idx - 1] + values[idx]
        )
    # odd nodes: the node count is odd (even segment count), so idx + 1 < m here
    for idx in range(1, m, 2):
        out[idx] = out[idx - 1] + (h / 12.0) * (
            5.0 * values[idx - 1] + 8.0 * values[idx] - values[idx + 1]
        )
    return out


def picard(F, phi, algebra, w0, path, tol=1e-10, max_iter=60):
    """Fixed-point iteration w_{k+1}(t) = w0 + int_0^t F(w_k) dphi along a path.

    F must be differentiable with respect to the algebra on a region the
    iterates stay inside (caller-asserted), and the path short enough for
    contraction.  Raises NoConvergence with the recorded history when the
    iteration cap is hit.
    """
    w0 = algebra.element(w0)
    nodes = path.segments
    if nodes % 2:
        nodes += 1
    ts = np.linspace(0.0, path.t1, nodes + 1)
    points = np.stack([path.point(t) for t in ts])
    velocities = np.stack([path.velocity(t) for t in ts])
    jphis = [phi.jacobian(p) for p in points]
    dphi = np.stack([jphis[i] @ velocities[i] for i in range(len(ts))])
    h = path.t1 / nodes

    current = np.tile(w0, (len(ts), 1)).astype(np.result_type(w0, dphi))
    history = []
    for iteration in range(1, max_iter + 1):
        integrand = np.stack([
            algebra.product(F(current[i]), dphi[i]) for i in range(len(ts))
        ])
        nxt = w0 + _cumulative_integral(integrand, h)
        diff = float(np.abs(nxt - current).max())
        history.append(diff)
        current = nxt
        if diff <= tol:
            return PicardResult(taus=points, values=current, history=history,
                                iterations=iteration)
        if not np.isfinite(diff) or diff > 1e12:
            raise NoConvergence("iteration diverged", history=history)
    raise NoConvergence(f"no contraction after {max_iter} iterations", history=history)


def verify_canonical(rect_map, field, points):
    """Worst deviation of dR(F) from (1, 0, ..., 0) at the sample points.

    R defines canonical coordinates for the field F exactly when its usual
    differential sends F to the constant first basis vector.
    """
    points = [np.asarray(p, dtype=float) for p in points]
    worst = 0.0
    for u in points:
        jr = rect_map.jacobian(u)
        target = np.zeros(jr.shape[0])
        target[0] = 1.0
        worst = max(worst, float(np.linalg.norm(jr @ np.asarray(field(u)) - target)))
    return worst
