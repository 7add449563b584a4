"""Closed-form solution constructors for several PDE classes, with verification.

Every constructor is "construct + verify": it returns the solution together
with a finite-difference substitution residual, so a caller never has to take
a formula on faith.  The residual engine is deliberately independent of the
construction path (plain central differences substituted into the PDE).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    B1Zero,
    ConditionViolated,
    DegenerateParameters,
    DeltaZeroInconsistent,
)
from .maps import SmoothMap

SECOND_ORDER_STEP = 1e-4
FIRST_ORDER_STEP = 1e-6
FLAG_TOL = 1e-4


# -- generic finite-difference residual ----------------------------------------


def fd_partial(func, point, orders, h):
    """Central-difference partial derivative with per-variable orders (total <= 2)."""
    point = np.asarray(point, dtype=float)
    idx = [i for i, o in enumerate(orders) for _ in range(o)]
    total = len(idx)
    if total == 0:
        return func(point)
    if total == 1:
        e = np.zeros_like(point)
        e[idx[0]] = h
        return (func(point + e) - func(point - e)) / (2.0 * h)
    if total == 2 and idx[0] == idx[1]:
        e = np.zeros_like(point)
        e[idx[0]] = h
        return (func(point + e) - 2.0 * func(point) + func(point - e)) / (h * h)
    if total == 2:
        e1 = np.zeros_like(point)
        e2 = np.zeros_like(point)
        e1[idx[0]] = h
        e2[idx[1]] = h
        return (func(point + e1 + e2) - func(point + e1 - e2)
                - func(point - e1 + e2) + func(point - e1 - e2)) / (4.0 * h * h)
    raise ValueError("only derivatives up to total order 2 are supported")


def pde_residual(terms, fields, points, h=None):
    """Max relative residual of sum(coeff * D^orders field_comp) over the points.

    ``terms`` is a list of (coeff, component, orders); ``fields`` maps a point
    to the tuple of dependent values (or a scalar for single-component
    problems).  Each point's residual is normalized by the largest term
    magnitude so the number is scale free.
    """

    def component(comp):
        def func(pt):
            val = fields(pt)
            return float(np.atleast_1d(val)[comp])

        return func

    worst = 0.0
    for pt in points:
        pt = np.asarray(pt, dtype=float)
        second_order = any(sum(orders) >= 2 for _, _, orders in terms)
        base = SECOND_ORDER_STEP if second_order else FIRST_ORDER_STEP
        step = h if h is not None else base * (1.0 + float(np.linalg.norm(pt)))
        vals = [coeff * fd_partial(component(comp), pt, orders, step)
                for coeff, comp, orders in terms]
        scale = max(1.0, max(abs(v) for v in vals))
        worst = max(worst, abs(sum(vals)) / scale)
    return worst


# -- first order: a u_x + b v_x - c u_y - d v_y = 0 ----------------------------


@dataclass(frozen=True)
class FirstOrderPDE:
    a: float
    b: float
    c: float
    d: float

    def terms(self):
        return [
            (self.a, 0, (1, 0)),
            (self.b, 1, (1, 0)),
            (-self.c, 0, (0, 1)),
            (-self.d, 1, (0, 1)),
        ]

    def residual(self, fields, points, h=None):
        return pde_residual(self.terms(), fields, points, h=h)


def first_order_phi(pde, alpha, beta):
    """Linear reference map making the A2_1(alpha, beta)-differentiable
    functions solve the PDE.

    Derived by matching the equally-weighted combination of the two planar
    Cauchy-Riemann equations against the PDE coefficients, which needs
    alpha + beta != 1.
    """
    denom = alpha + beta - 1.0
    if abs(denom) < 1e-12:
        raise DegenerateParameters("alpha + beta = 1")
    s = alpha + beta
    a, b, c, d = pde.a, pde.b, pde.c, pde.d
    matrix = np.array([
        [(c * s - d) / denom, (a * s - b) / denom],
        [(d - c) / denom, (b - a) / denom],
    ])
    return SmoothMap.linear(matrix, name="first-order-phi")


# -- the coupled two-equation system of section on two-PDE systems -------------


@dataclass
class System451Solution:
    y: object
    z: object
    family: str
    h1: object
    h2: object

    def fields(self, point):
        return np.array([self.y(point), self.z(point)])

    def residual(self, a1, a2, b1, b2, points):
        # a1 y_x + y_t + b1 y - b1 z = 0 ; -a2 z_x + z_t - b2 y + b2 z = 0
        terms_1 = [(a1, 0, (1, 0)), (1.0, 0, (0, 1)), (b1, 0, (0, 0)), (-b1, 1, (0, 0))]
        terms_2 = [(-a2, 1, (1, 0)), (1.0, 1, (0, 1)), (-b2, 0, (0, 0)), (b2, 1, (0, 0))]
        r1 = pde_residual(terms_1, self.fields, points)
        r2 = pde_residual(terms_2, self.fields, points)
        return max(r1, r2)


def system_451_solutions(a1, a2, b1, b2, family, c1, c2):
    """Closed-form solution pairs of the coupled first-order system.

    family "trig":  y = e^{h1}(c1 cos h2 + c2 sin h2),
                    z = e^{h1}(-c1 sin h2 + c2 cos h2)
    family "hyperbolic": y = e^{-h}(c1 cosh h + c2 sinh h),
                         z = e^{-h}(c1 sinh h + c2 cosh h)
    """
    s = a1 + a2
    if abs(s) < 1e-12:
        raise DegenerateParameters("a1 + a2 = 0")
    if family == "trig":
        def h1(pt):
            x, t = pt
            return ((-b1 + b2) * x + (-a1 * b2 - a2 * b1) * t) / s

        def h2(pt):
            x, t = pt
            return ((b1 + b2) * x + (-a1 * b2 + a2 * b1) * t) / s

        def y(pt):
            return math.exp(h1(pt)) * (c1 * math.cos(h2(pt)) + c2 * math.sin(h2(pt)))

        def z(pt):
            return math.exp(h1(pt)) * (-c1 * math.sin(h2(pt)) + c2 * math.cos(h2(pt)))

        return System451Solution(y=y, z=z, family=family, h1=h1, h2=h2)
    if family == "hyperbolic":
        def h(pt):
            x, t = pt
            return ((b1 - b2) * x + (a1 * b2 + a2 * b1) * t) / s

        def y(pt):
            return math.exp(-h(pt)) * (c1 * math.cosh(h(pt)) + c2 * math.sinh(h(pt)))

        def z(pt):
            return math.exp(-h(pt)) * (c1 * math.sinh(h(pt)) + c2 * math.cosh(h(pt)))

        return System451Solution(y=y, z=z, family=family, h1=h, h2=h)
    raise ValueError(f"unknown family {family!r}; expected 'trig' or 'hyperbolic'")


# -- second order ---------------------------------------------------------------


@dataclass(frozen=True)
class SecondOrderPDE:
    """A u_xx + 2B u_xy + C u_yy + D u_x + E u_y = 0, with |D| + |E| != 0.

    p1 and p2 are caller-supplied family parameters entering the
    discriminant; their effect is only ever assessed through the residual.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    p1: float = 0.0
    p2: float = 0.0

    def terms(self):
        return [
            (self.A, 0, (2, 0)),
            (2.0 * self.B, 0, (1, 1)),
            (self.C, 0, (0, 2)),
            (self.D, 0, (1, 0)),
            (self.E, 0, (0, 1)),
        ]

    def residual(self, u, points, h=None):
        return pde_residual(self.terms(), u, points, h=h)


@dataclass
class SecondOrderSolution:
    a: float
    b: float
    amplitude: float
    branch: str
    u: object
    residual: float
    flagged: bool


def second_order_solution(pde, alpha, beta, check_points=None):
    """Exponential solution u = (alpha/a) e^{a x + b y} with branch-selected (a, b).

    Discriminant nonzero: requires the proportionality condition between
    (alpha, beta) and the closed-form (a, b).  Discriminant zero: requires
    A E = (p1 + p2 B) D and a nondegenerate denominator.  The substitution
    residual ships with the result and is flagged (never silently accepted)
    above 1e-4.
    """
    if abs(pde.D) + abs(pde.E) < 1e-14:
        raise ConditionViolated("|D| + |E| != 0 fails: both first-order coefficients vanish")
    m = pde.p1 + pde.p2 * pde.B
    delta = pde.A * pde.C + m * m - 2.0 * m * pde.B
    scale = 1.0 + max(abs(pde.A), abs(pde.B), abs(pde.C), abs(pde.D), abs(pde.E), abs(m))
    if abs(delta) > 1e-12 * scale * scale:
        lhs = alpha * (-pde.A * pde.E + m * pde.D)
        rhs = beta * (2.0 * pde.B * pde.E - pde.C * pde.D - m * pde.E)
        if abs(lhs - rhs) > 1e-10 * scale ** 3:
            raise ConditionViolated(
                "alpha(-AE + (p1+p2 B)D) = beta(2BE - CD - (p1+p2 B)E) fails: "
                f"{lhs:.6g} != {rhs:.6g}"
            )
        a = (2.0 * pde.B * pde.E - pde.C * pde.D - m * pde.E) / delta
        b = (-pde.A * pde.E + m * pde.D) / delta
        branch = "delta_nonzero"
    else:
        if abs(pde.A * pde.E - m * pde.D) > 1e-10 * scale * scale:
            raise ConditionViolated(f"AE = (p1+p2 B)D fails: {pde.A * pde.E:.6g} != {m * pde.D:.6g}")
        kappa = beta * (m - 2.0 * pde.B) - alpha * pde.A
        if abs(kappa) < 1e-12 * scale * scale:
            raise ConditionViolated("beta(p1+p2 B-2B) != alpha A fails")
        a = alpha * pde.D / kappa
        b = beta * pde.D / kappa
        branch = "delta_zero"
    if abs(a) < 1e-12:
        raise DegenerateParameters("a = 0: amplitude alpha/a undefined")
    amplitude = alpha / a

    def u(pt):
        x, y = pt
        return amplitude * math.exp(a * x + b * y)

    pts = check_points if check_points is not None else _default_grid()
    residual = pde.residual(u, pts)
    return SecondOrderSolution(a=a, b=b, amplitude=amplitude, branch=branch, u=u,
                               residual=residual, flagged=residual > FLAG_TOL)


def _default_grid():
    return [np.array([x, y]) for x in (-0.6, 0.1, 0.7) for y in (-0.5, 0.2, 0.8)]


# -- three-dimensional heat equation --------------------------------------------


@dataclass(frozen=True)
class HeatProblem:
    """alpha (u_xx + u_yy + u_zz) = u_t, solved by a/b1 * exp(B . (t,x,y,z))."""

    alpha: float
    p: tuple
    amplitude: float = 1.0

    def terms(self):
        return [
            (self.alpha, 0, (0, 2, 0, 0)),
            (self.alpha, 0, (0, 0, 2, 0)),
            (self.alpha, 0, (0, 0, 0, 2)),
            (-1.0, 0, (1, 0, 0, 0)),
        ]

    def residual(self, u, points, h=None):
        return pde_residual(self.terms(), u, points, h=h)


def heat_system_matrix(alpha, p):
    p1, p2, p3, p4, p5, p6 = p
    return np.array([
        [0.0, -p1, -p2, -p3],
        [p1, alpha, -p4, -p5],
        [p2, p4, alpha, -p6],
        [p3, p5, p6, alpha],
    ])


def heat_delta(alpha, p):
    """Determinant of the exponent system's matrix, in closed form."""
    p1, p2, p3, p4, p5, p6 = p
    return (alpha ** 2 * (p1 ** 2 + p2 ** 2 + p3 ** 2)
            + p6 ** 2 * p1 ** 2 + p5 ** 2 * p2 ** 2 + p4 ** 2 * p3 ** 2
            + 2 * p6 * p4 * p3 * p1 - 2 * p6 * p5 * p2 * p1 - 2 * p5 * p4 * p3 * p2)


def heat_b_closed_form(alpha, p):
    """Cofactor solution of the exponent system (valid when the determinant is nonzero)."""
    p1, p2, p3, p4, p5, p6 = p
    delta = heat_delta(alpha, p)
    b1 = alpha * (alpha ** 2 + p4 ** 2 + p5 ** 2 + p6 ** 2)
    b2 = -alpha ** 2 * p1 - alpha * p2 * p4 - alpha * p3 * p5 - p1 * p6 ** 2 + p2 * p5 * p6 - p3 * p4 * p6
    b3 = -alpha ** 2 * p2 + alpha * p1 * p4 - alpha * p3 * p6 + p1 * p5 * p6 - p2 * p5 ** 2 + p3 * p4 * p5
    b4 = -alpha ** 2 * p3 + alpha * p1 * p5 + alpha * p2 * p6 - p1 * p4 * p6 + p2 * p4 * p5 - p3 * p4 ** 2
    return np.array([b1, b2, b3, b4]) / delta


@dataclass
class HeatSolution:
    b: np.ndarray
    delta: float
    branch: str
    u: object
    diagnostic: float  # alpha*(b2^2+b3^2+b4^2) - b1, exactly zero for true solutions
    residual: float
    flagged: bool


def heat_solution(hp, check_points=None):
    """Exponential heat solution u(t, x, y, z) = (amplitude/b1) e^{B.(t,x,y,z)}.

    Nonzero determinant: the closed-form exponent vector.  Zero determinant:
    least-squares solve of the exponent system, declared consistent when its
    residual is at most 1e-10 (DeltaZeroInconsistent otherwise).  b1 = 0 has
    no amplitude normalization and raises B1Zero.
    """
    p = tuple(float(x) for x in hp.p)
    if len(p) != 6:
        raise ValueError("expected six parameters p1..p6")
    delta = heat_delta(hp.alpha, p)
    matrix = heat_system_matrix(hp.alpha, p)
    rhs = np.array([1.0, 0.0, 0.0, 0.0])
    scale = max(1.0, float(np.abs(matrix).max())) ** 4
    if abs(delta) > 1e-12 * scale:
        b = heat_b_closed_form(hp.alpha, p)
        branch = "delta_nonzero"
    else:
        b, _, _, _ = np.linalg.lstsq(matrix, rhs, rcond=None)
        if np.linalg.norm(matrix @ b - rhs) > 1e-10:
            raise DeltaZeroInconsistent(
                "determinant vanishes and the exponent system has no solution")
        branch = "delta_zero"
    if abs(b[0]) < 1e-12:
        raise B1Zero("b1 = 0: amplitude a/b1 undefined")
    amplitude = hp.amplitude / b[0]
    exponent = b.copy()

    def u(pt):
        return amplitude * math.exp(float(np.dot(exponent, pt)))

    diagnostic = hp.alpha * float(np.dot(b[1:], b[1:])) - b[0]
    pts = check_points if check_points is not None else _heat_grid()
    residual = hp.residual(u, pts)
    return HeatSolution(b=b, delta=delta, branch=branch, u=u, diagnostic=diagnostic,
                        residual=residual, flagged=residual > FLAG_TOL)


def _heat_grid():
    rng = np.random.default_rng(7)
    return [rng.uniform(-0.8, 0.8, size=4) for _ in range(20)]
