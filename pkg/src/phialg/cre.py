"""Generalized Cauchy-Riemann systems: emission, and recovery of (phi, algebra).

Emission turns a pair (algebra, phi) into the explicit homogeneous linear
first-order PDE system that characterizes differentiability relative to them.
Recovery goes the other way for two-equation planar systems whose coefficients
are polynomials of degree <= 1 in (x, y): it matches the system against the
three planar algebra families, extracts the parameters, verifies that the
candidate gradient fields are conservative, and integrates them to potentials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, algebra_a2_1, algebra_a2_2, algebra_a2_12
from .errors import DimensionMismatch, NoMatch, NotEquivalent
from .maps import SmoothMap

PATTERN_RTOL = 1e-9
CONSERVATIVE_RTOL = 1e-9
EQUIV_TOL = 1e-8

MONOMIALS = ("1", "x", "y")  # degree <= 1 coefficient basis
QUAD_MONOMIALS = ("x^2", "xy", "y^2", "x", "y")


# -- emitted systems -----------------------------------------------------------


@dataclass
class CREquation:
    """One equation: sum over (m, i) of coeffs[m, i] * d f_m / d u_i = 0."""

    i: int
    j: int
    q: int
    coeffs: object  # (n, k) array, or callable point -> (n, k)

    def coeffs_at(self, u):
        if callable(self.coeffs):
            return np.asarray(self.coeffs(np.asarray(u, dtype=float)))
        return self.coeffs

    def residual(self, f, u):
        jf = f.jacobian(np.asarray(u, dtype=float))
        a = self.coeffs_at(u)
        return float(np.sum(a * jf))


class CRESystem:
    """The n*k(k-1)/2 equations characterizing (phi, algebra)-differentiability."""

    def __init__(self, equations, k, n, constant):
        self.equations = list(equations)
        self.k = k
        self.n = n
        self.constant = constant

    def __len__(self):
        return len(self.equations)

    def residual(self, f, u):
        scale = 1.0 + float(np.linalg.norm(f.jacobian(np.asarray(u, dtype=float))))
        return max(abs(eq.residual(f, u)) for eq in self.equations) / scale

    def max_residual(self, f, points):
        return max(self.residual(f, u) for u in points)

    def coefficient_tensor(self):
        """Stacked (num_eq, n, k) coefficients; constant systems only."""
        if not self.constant:
            raise ValueError("system has position-dependent coefficients")
        return np.stack([eq.coeffs for eq in self.equations])

    def to_json(self):
        if not self.constant:
            raise ValueError("only constant-coefficient systems serialize to JSON")
        return {
            "k": self.k,
            "n": self.n,
            "equations": [
                {"pair": [eq.i, eq.j], "component": eq.q, "coeffs": np.asarray(eq.coeffs).tolist()}
                for eq in self.equations
            ],
        }

    def to_latex(self, func_names=None, var_names=None):
        func_names = func_names or ["u", "v", "w", "f_4", "f_5", "f_6", "f_7", "f_8"][: self.n]
        var_names = var_names or ["x", "y", "z", "t", "u_5", "u_6"][: self.k]
        lines = []
        for eq in self.equations:
            if callable(eq.coeffs):
                lines.append(f"\\text{{position-dependent equation }} (i={eq.i}, j={eq.j}, q={eq.q})")
                continue
            terms = []
            for m in range(self.n):
                for i in range(self.k):
                    c = eq.coeffs[m, i]
                    if abs(c) < 1e-14:
                        continue
                    mag = abs(c)
                    coef = "" if abs(mag - 1.0) < 1e-14 else f"{mag:g}"
                    sign = "-" if c < 0 else ("+" if terms else "")
                    terms.append(f"{sign}{coef}{func_names[m]}_{{{var_names[i]}}}")
            lines.append(("".join(terms) or "0") + " = 0")
        return " \\\\\n".join(lines)


def _cre_matrix_at(algebra, jphi, i, j):
    """Coefficient block (n, k) of the (i, j, :) equations at one point."""
    rep_j = algebra.rep(jphi[:, j])
    rep_i = algebra.rep(jphi[:, i])
    return rep_j, rep_i


def emit_cre(algebra, phi):
    """Emit the Cauchy-Riemann system for (algebra, phi).

    For linear phi (constant Jacobian) the equations carry constant
    coefficient arrays; otherwise each equation's coefficients are a map of
    position.  Equation (i<j, q): the coefficient of d f_m / d u_i is
    sum_l dphi[l, j] c[l, m, q] and of d f_m / d u_j its negative with i, j
    swapped.
    """
    if phi.n != algebra.dim:
        raise DimensionMismatch(f"phi codomain {phi.n} != algebra dim {algebra.dim}")
    k, n = phi.k, algebra.dim
    constant = hasattr(phi, "matrix")
    equations = []
    if constant:
        jphi = phi.matrix
        for i in range(k):
            for j in range(i + 1, k):
                rep_j, rep_i = _cre_matrix_at(algebra, jphi, i, j)
                for q in range(n):
                    coeffs = np.zeros((n, k))
                    coeffs[:, i] = rep_j[q, :]
                    coeffs[:, j] = -rep_i[q, :]
                    equations.append(CREquation(i=i, j=j, q=q, coeffs=coeffs))
    else:
        for i in range(k):
            for j in range(i + 1, k):
                for q in range(n):
                    def coeffs(u, i=i, j=j, q=q):
                        jphi = phi.jacobian(u)
                        rep_j, rep_i = _cre_matrix_at(algebra, jphi, i, j)
                        out = np.zeros((n, k))
                        out[:, i] = rep_j[q, :]
                        out[:, j] = -rep_i[q, :]
                        return out

                    equations.append(CREquation(i=i, j=j, q=q, coeffs=coeffs))
    return CRESystem(equations, k=k, n=n, constant=constant)


def emit_weighted_cre(algebra, phi, k_weight, l_weight):
    """Single PDE: k_weight * (first planar equation) + l_weight * (second).

    Only the two-dimensional families have exactly two equations to combine.
    """
    if algebra.dim != 2 or phi.k != 2:
        raise DimensionMismatch("weighted emission needs a planar algebra and k = 2")
    system = emit_cre(algebra, phi)
    first, second = system.equations[0], system.equations[1]
    if system.constant:
        coeffs = k_weight * first.coeffs + l_weight * second.coeffs
    else:
        def coeffs(u):
            return k_weight * first.coeffs_at(u) + l_weight * second.coeffs_at(u)

    return CREquation(i=0, j=1, q=-1, coeffs=coeffs)


# -- two-equation planar systems ----------------------------------------------

COLUMNS = ("u_x", "u_y", "v_x", "v_y")


def _poly_entry(value):
    """Accept a number or {"const","x","y"} dict; return length-3 coefficients."""
    if isinstance(value, dict):
        return np.array([value.get("const", 0.0), value.get("x", 0.0), value.get("y", 0.0)], dtype=float)
    return np.array([float(value), 0.0, 0.0])


class TwoPDESystem:
    """<A : dw> = F with A a 2x4 matrix of degree <= 1 polynomials in (x, y).

    Columns follow ``COLUMNS``: (u_x, u_y, v_x, v_y).  ``coeffs`` has shape
    (2, 4, 3) with the last axis holding [constant, x, y] parts; ``rhs`` has
    shape (2, 3).
    """

    def __init__(self, coeffs, rhs=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape == (2, 4):
            coeffs = np.stack([coeffs, np.zeros((2, 4)), np.zeros((2, 4))], axis=-1)
        if coeffs.shape != (2, 4, 3):
            raise DimensionMismatch(f"coefficients must be (2, 4[, 3]), got {coeffs.shape}")
        self.coeffs = coeffs
        self.rhs = np.zeros((2, 3)) if rhs is None else np.asarray(rhs, dtype=float)

    @classmethod
    def from_constant(cls, matrix, rhs=None):
        m = np.asarray(matrix, dtype=float)
        r = None
        if rhs is not None:
            r = np.zeros((2, 3))
            r[:, 0] = np.asarray(rhs, dtype=float)
        return cls(m, rhs=r)

    def at(self, point):
        x, y = point
        mon = np.array([1.0, x, y])
        return self.coeffs @ mon

    def rhs_at(self, point):
        x, y = point
        return self.rhs @ np.array([1.0, x, y])

    def residual(self, f, u):
        jf = f.jacobian(np.asarray(u, dtype=float))
        dw = np.array([jf[0, 0], jf[0, 1], jf[1, 0], jf[1, 1]])
        scale = 1.0 + float(np.linalg.norm(jf))
        return float(np.abs(self.at(u) @ dw - self.rhs_at(u)).max()) / scale

    @property
    def homogeneous(self):
        return bool(np.abs(self.rhs).max() == 0.0)

    def rows_independent(self):
        """The two coefficient rows are not scalar multiples of each other."""
        flat = self.coeffs.reshape(2, -1)
        s = np.linalg.svd(flat, compute_uv=False)
        return bool(s[-1] > 1e-10 * max(s[0], 1e-300))

    def to_json(self):
        def entry(c):
            return {"const": c[0], "x": c[1], "y": c[2]}

        return {
            "columns": list(COLUMNS),
            "A": [[entry(self.coeffs[q, col]) for col in range(4)] for q in range(2)],
            "F": [entry(self.rhs[q]) for q in range(2)],
        }

    @classmethod
    def from_json(cls, data):
        coeffs = np.zeros((2, 4, 3))
        for q, row in enumerate(data["A"]):
            for col, value in enumerate(row):
                coeffs[q, col] = _poly_entry(value)
        rhs = np.zeros((2, 3))
        for q, value in enumerate(data.get("F", [0.0, 0.0])):
            rhs[q] = _poly_entry(value)
        return cls(coeffs, rhs=rhs)


def two_pde_from_cre(system):
    """Repackage a constant planar CRE system as a TwoPDESystem."""
    if system.k != 2 or system.n != 2 or not system.constant:
        raise DimensionMismatch("need a constant-coefficient system with k = n = 2")
    matrix = np.zeros((2, 4))
    for row, eq in enumerate(system.equations):
        matrix[row] = [eq.coeffs[0, 0], eq.coeffs[0, 1], eq.coeffs[1, 0], eq.coeffs[1, 1]]
    return TwoPDESystem.from_constant(matrix)


# -- recovery -------------------------------------------------------------------

_SAMPLES = np.array(
    [[1.3, 0.7], [-0.9, 1.7], [0.6, -1.1], [2.1, 1.9], [-1.4, -0.8], [0.35, 2.3]]
)


@dataclass
class Recovery:
    case: str
    params: tuple
    algebra: Algebra
    phi: SmoothMap
    potential_coeffs: np.ndarray  # (2, 5) in QUAD_MONOMIALS order
    mixing: np.ndarray  # the row transformation applied to the input system
    # nonhomogeneous input: the recovered pair describes the homogeneous part
    # only, and the caller must supply a particular solution to shift by
    needs_particular_solution: bool = False


def _poly_matmul(m, block):
    """Constant 2x2 times a (2, 2, 3) polynomial block."""
    return np.einsum("qr,ril->qil", m, block)


def _constant_ratio(num, den):
    """P with num = P den pointwise, if P is constant; None otherwise."""
    mats = []
    for pt in _SAMPLES:
        mon = np.array([1.0, pt[0], pt[1]])
        d = den @ mon
        nmat = num @ mon
        # scale-free singularity test: det/|d|^2 is invariant under d -> c*d
        if abs(np.linalg.det(d)) < 1e-10 * float(np.abs(d).max()) ** 2 + 1e-300:
            continue
        mats.append(nmat @ np.linalg.inv(d))
    if len(mats) < 3:
        return None
    mats = np.stack(mats)
    mean = mats.mean(axis=0)
    dev = float(np.abs(mats - mean).max())
    if dev > PATTERN_RTOL * (1.0 + float(np.abs(mean).max())):
        return None
    return mean


def _integrate_rotated_gradient(g_row):
    """Potential of the field with phi_y = g_row[0], phi_x = -g_row[1].

    Requires the conservativeness condition g_row[0].x + g_row[1].y = 0.
    Integration constants are fixed to zero; coefficients come back in
    QUAD_MONOMIALS order.
    """
    g0, g1, g2 = g_row[0]
    h0, h1, h2 = g_row[1]
    return np.array([-h1 / 2.0, -h2, g2 / 2.0, -h0, g0])


def _conservative_defect(g_block):
    scale = 1.0 + float(np.abs(g_block).max())
    return max(abs(g_block[q, 0, 1] + g_block[q, 1, 2]) for q in range(2)) / scale


def quadratic_map(coeff_rows, name="phi"):
    """Planar map whose components are quadratics in QUAD_MONOMIALS order."""
    coeffs = np.asarray(coeff_rows, dtype=float)

    def func(u):
        x, y = u
        return coeffs @ np.array([x * x, x * y, y * y, x, y])

    def jac(u):
        x, y = u
        dx = np.array([2 * x, y, 0.0, 1.0, 0.0])
        dy = np.array([0.0, x, 2 * y, 0.0, 1.0])
        return np.stack([coeffs @ dx, coeffs @ dy], axis=1)

    out = SmoothMap(2, 2, func, jac=jac, name=name)
    out.quad_coeffs = coeffs
    return out


def _cyclic_mixing(p, diag_first):
    """Rows (m1, m2) conjugating constant P to companion-type form.

    diag_first=True targets [[0, a],[1, b]] (row pattern of the family with
    unit e1); False targets [[g, 1],[d, 0]].
    """
    if diag_first:
        beta = float(np.trace(p))
        for m2 in (np.array([0.0, 1.0]), np.array([1.0, 0.0])):
            m1 = m2 @ (p - beta * np.eye(2))
            m = np.stack([m1, m2])
            if abs(np.linalg.det(m)) > 1e-12 * max(1.0, float(np.abs(m).max()) ** 2):
                return m
    else:
        gamma = float(np.trace(p))
        for m1 in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
            m2 = m1 @ (p - gamma * np.eye(2))
            m = np.stack([m1, m2])
            if abs(np.linalg.det(m)) > 1e-12 * max(1.0, float(np.abs(m).max()) ** 2):
                return m
    return None


def _left_null_vector(block):
    """Unit row vector m with m @ block = 0 as polynomials, or None."""
    flat = block.reshape(2, -1)
    u, s, _ = np.linalg.svd(flat)
    if s[-1] > PATTERN_RTOL * max(s[0], 1e-300):
        return None
    return u[:, -1]


def _finish(case, params, algebra, mixing, g_block, normalize_rows):
    if _conservative_defect(g_block) > CONSERVATIVE_RTOL:
        raise NoMatch("conservativeness", f"case {case}")
    pots = np.stack([_integrate_rotated_gradient(g_block[q]) for q in range(2)])
    if normalize_rows:
        for q in range(2):
            nz = np.nonzero(np.abs(pots[q]) > 1e-12)[0]
            if nz.size and pots[q, nz[0]] < 0:
                pots[q] = -pots[q]
                mixing[q] = -mixing[q]
    phi = quadratic_map(pots, name=f"recovered-{case}")
    return Recovery(case=case, params=params, algebra=algebra, phi=phi,
                    potential_coeffs=pots, mixing=mixing)


class _PointwiseCRE:
    """Adapter giving emit-like 2x4 rows at points, for equivalence checks."""

    def __init__(self, algebra, phi):
        self.algebra = algebra
        self.phi = phi

    def at(self, point):
        jphi = self.phi.jacobian(np.asarray(point, dtype=float))
        rep_y = self.algebra.rep(jphi[:, 1])
        rep_x = self.algebra.rep(jphi[:, 0])
        rows = np.zeros((2, 4))
        for q in range(2):
            rows[q] = [rep_y[q, 0], -rep_x[q, 0], rep_y[q, 1], -rep_x[q, 1]]
        return rows

    def rhs_at(self, point):
        return np.zeros(2)


def find_equivalence_matrix(s1, s2, points, tol=EQUIV_TOL, det_tol=1e-12):
    """Pointwise row transformations M with M*A1 = A2 and M*F1 = F2.

    Raises NotEquivalent when any sample point fails the residual or
    nondegeneracy requirement; otherwise returns the per-point matrices
    together with a callable evaluator.
    """
    matrices = []
    for pt in points:
        a1 = np.column_stack([s1.at(pt), s1.rhs_at(pt)])
        a2 = np.column_stack([s2.at(pt), s2.rhs_at(pt)])
        mt, _, _, _ = np.linalg.lstsq(a1.T, a2.T, rcond=None)
        m = mt.T
        scale = max(1.0, float(np.abs(a2).max()))
        resid = float(np.abs(m @ a1 - a2).max()) / scale
        if resid > tol:
            raise NotEquivalent(f"residual {resid:.3e} at point {tuple(pt)}")
        if abs(np.linalg.det(m)) < det_tol:
            raise NotEquivalent(f"transformation degenerate at point {tuple(pt)}")
        matrices.append(m)
    return EquivalenceMap(points=list(points), matrices=matrices, s1=s1, s2=s2)


@dataclass
class EquivalenceMap:
    points: list
    matrices: list
    s1: object = None
    s2: object = None

    def __call__(self, point):
        a1 = np.column_stack([self.s1.at(point), self.s1.rhs_at(point)])
        a2 = np.column_stack([self.s2.at(point), self.s2.rhs_at(point)])
        mt, _, _, _ = np.linalg.lstsq(a1.T, a2.T, rcond=None)
        return mt.T


def recover_phi_algebra(system, cases=("A2_1", "A2_2", "A2_12")):
    """Recover (phi, algebra, case) from a homogeneous two-equation system.

    The attempt order is the ``cases`` argument; the first case that matches
    the pattern, passes the conservativeness test, and whose re-emitted system
    is equivalent to the input wins.  Potentials carry zero integration
    constants, and the result is unique only up to multiplication of phi by a
    regular constant of the recovered algebra (families can also overlap, so
    restricting ``cases`` pins the family when the caller knows it).

    A nonhomogeneous input is matched on its homogeneous part and flagged:
    solutions of the full system are then (differentiable function composed
    with the recovered pair) + a particular solution the caller supplies.
    """
    if not system.rows_independent():
        raise NoMatch("pattern", "coefficient rows are dependent")
    nonhomogeneous = not system.homogeneous
    if nonhomogeneous:
        system = TwoPDESystem(system.coeffs)
    b_u = system.coeffs[:, 0:2, :]
    b_v = system.coeffs[:, 2:4, :]
    saw_conservativeness = False
    last_detail = ""

    for case in cases:
        try:
            if case == "A2_1":
                p = _constant_ratio(b_v, b_u)
                if p is None:
                    continue
                alpha, beta = -float(np.linalg.det(p)), float(np.trace(p))
                mixing = _cyclic_mixing(p, diag_first=True)
                if mixing is None:
                    continue
                g_block = _poly_matmul(mixing, b_u)
                rec = _finish(case, (alpha, beta), algebra_a2_1(alpha, beta),
                              mixing, g_block, normalize_rows=False)
            elif case == "A2_2":
                p = _constant_ratio(b_u, b_v)
                if p is None:
                    continue
                gamma, delta = float(np.trace(p)), -float(np.linalg.det(p))
                mixing = _cyclic_mixing(p, diag_first=False)
                if mixing is None:
                    continue
                g_block = _poly_matmul(mixing, b_v)
                rec = _finish(case, (gamma, delta), algebra_a2_2(gamma, delta),
                              mixing, g_block, normalize_rows=False)
            elif case == "A2_12":
                m1 = _left_null_vector(b_v)
                m2 = _left_null_vector(b_u)
                if m1 is None or m2 is None:
                    continue
                mixing = np.stack([m1, m2])
                if abs(np.linalg.det(mixing)) < 1e-9:
                    continue
                g_block = np.stack([
                    np.einsum("r,ril->il", m1, b_u),
                    np.einsum("r,ril->il", m2, b_v),
                ])
                rec = _finish(case, (), algebra_a2_12(), mixing, g_block,
                              normalize_rows=True)
            else:
                raise ValueError(f"unknown case {case!r}")
        except NoMatch as exc:
            saw_conservativeness = True
            last_detail = str(exc)
            continue

        # self-certification: the recovered pair must reproduce the input system
        try:
            find_equivalence_matrix(_PointwiseCRE(rec.algebra, rec.phi), system, _SAMPLES)
        except NotEquivalent as exc:
            last_detail = f"case {case} re-emission mismatch: {exc}"
            continue
        rec.needs_particular_solution = nonhomogeneous
        return rec

    stage = "conservativeness" if saw_conservativeness else "pattern"
    raise NoMatch(stage, last_detail)
