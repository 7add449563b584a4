"""Algebra-valued line integrals along parameterized paths.

The integrand of the line integral of f along gamma relative to phi is the
algebra product f(gamma(s)) * dphi_{gamma(s)}(gamma'(s)); quadrature is
composite Simpson with a fixed subdivision count, which keeps the cost
deterministic and the error O(N^-4) for smooth integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .maps import SmoothMap, fd_step

CLOSED_TOL = 1e-12
FLOOR = 1e-13


class Path:
    """Differentiable parameterization gamma: [0, t1] -> R^k.

    ``derivative`` is used when supplied; otherwise the velocity comes from
    central differences.  ``segments`` is the default Simpson subdivision
    count.  A path flagged closed must satisfy |gamma(0) - gamma(t1)| <= 1e-12.
    """

    def __init__(self, gamma, t1, derivative=None, segments=256, closed=False):
        self.gamma = gamma
        self.t1 = float(t1)
        self.derivative = derivative
        self.segments = int(segments)
        self.closed = bool(closed)
        if closed:
            gap = float(np.linalg.norm(self.point(0.0) - self.point(self.t1)))
            if gap > CLOSED_TOL:
                raise ValueError(f"path marked closed but endpoint gap is {gap:.3e}")

    def point(self, t):
        return np.asarray(self.gamma(t), dtype=float)

    def velocity(self, t):
        if self.derivative is not None:
            return np.asarray(self.derivative(t), dtype=float)
        h = fd_step(np.array([t]))
        return (self.point(t + h) - self.point(t - h)) / (2.0 * h)

    @classmethod
    def segment(cls, u0, u1, segments=256):
        u0 = np.asarray(u0, dtype=float)
        u1 = np.asarray(u1, dtype=float)
        return cls(lambda t: u0 + t * (u1 - u0), 1.0,
                   derivative=lambda t: u1 - u0, segments=segments)

    @classmethod
    def circle(cls, center=(0.0, 0.0), radius=1.0, segments=256):
        cx, cy = center
        r = float(radius)

        def gamma(t):
            return np.array([cx + r * np.cos(t), cy + r * np.sin(t)])

        def vel(t):
            return np.array([-r * np.sin(t), r * np.cos(t)])

        return cls(gamma, 2.0 * np.pi, derivative=vel, segments=segments, closed=True)


def _integrand(f, phi, algebra, path):
    def value(t):
        u = path.point(t)
        return algebra.product(f(u), phi.jacobian(u) @ path.velocity(t))

    return value


def line_integral(f, phi, algebra, path, segments=None):
    """Composite-Simpson value of the algebra-valued line integral of f."""
    if f.n != algebra.dim or phi.n != algebra.dim or f.k != phi.k:
        raise DimensionMismatch("f, phi and the algebra must share dimensions")
    n = segments if segments is not None else path.segments
    n = int(n)
    if n % 2:
        n += 1
    ts = np.linspace(0.0, path.t1, n + 1)
    g = _integrand(f, phi, algebra, path)
    values = np.stack([g(t) for t in ts])
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    h = path.t1 / n
    return (h / 3.0) * np.tensordot(weights, values, axes=(0, 0))


@dataclass
class LoopReport:
    """Closed-loop integral magnitudes over a subdivision ladder."""

    segments: list
    magnitudes: list
    orders: list  # observed order between consecutive ladder steps (above floor)
    converged_at_floor: bool

    @property
    def final_magnitude(self):
        return self.magnitudes[-1]

    def passes(self, tol, min_order=3.5):
        if self.final_magnitude > tol:
            return False
        return self.converged_at_floor or all(o >= min_order for o in self.orders)


def closed_loop_check(f, phi, algebra, path, ladder=(64, 128, 256, 512), floor=FLOOR):
    """Integral magnitudes of a closed loop for increasing subdivision counts.

    The observed convergence order is reported for consecutive ladder steps
    whose magnitudes are both above the round-off floor; when everything sits
    at the floor already the loop is flagged as converged there.
    """
    if not path.closed:
        raise ValueError("closed_loop_check needs a closed path")
    mags = [float(np.linalg.norm(line_integral(f, phi, algebra, path, segments=n)))
            for n in ladder]
    scale = max(1.0, *mags)
    orders = []
    for a, b in zip(mags, mags[1:]):
        if a > floor * scale and b > floor * scale:
            orders.append(float(np.log2(a / b)))
    converged = not orders and mags[-1] <= max(floor * scale, floor)
    return LoopReport(segments=list(ladder), magnitudes=mags, orders=orders,
                      converged_at_floor=converged)


def conservative_fields(f, phi, algebra):
    """The n real k-dimensional fields whose duals assemble f * dphi.

    G_q(u)_j = sum_{m,l} f_m(u) dphi[l, j] c[l, m, q]; for the unit element
    these are exactly the gradients of phi's components.
    """
    k, n = phi.k, algebra.dim
    constants = algebra.constants

    def all_fields(u):
        fu = f(u)
        jphi = phi.jacobian(u)
        s = np.einsum("m,lmq->lq", fu, constants)
        return np.einsum("lj,lq->qj", jphi, s)

    fields = []
    for q in range(n):
        def field(u, q=q):
            return all_fields(u)[q]

        fields.append(field)
    return fields


def antiderivative(f, phi, algebra, u0, segments=256, name=""):
    """F with F(u) the straight-segment integral from u0; its derivative is f.

    The Jacobian is assembled analytically from the defining property
    dF_u = rep(f(u)) dphi_u, so downstream derivative checks see no extra
    quadrature noise.  The caller asserts the domain is simply connected and
    supplies a different base point or path when the segment would cross the
    singular set.
    """
    u0 = np.asarray(u0, dtype=float)

    def func(u):
        u = np.asarray(u, dtype=float)
        if np.allclose(u, u0):
            return algebra.zero().astype(float)
        return line_integral(f, phi, algebra, Path.segment(u0, u, segments=segments))

    def jac(u):
        return algebra.rep(f(np.asarray(u, dtype=float))) @ phi.jacobian(np.asarray(u, dtype=float))

    return SmoothMap(phi.k, algebra.dim, func, jac=jac, name=name or "antiderivative")
