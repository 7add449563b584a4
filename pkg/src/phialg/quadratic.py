"""Deciding differentiability of quadratic planar fields relative to linear maps.

A quadratic planar field is algebrizable relative to one of the three planar
algebra families exactly when a parameter-dependent 4x4 matrix built from its
coefficients drops rank and the resulting null vector also annihilates a 2x2
companion block for the linear part.  The search scans a parameter box for
rank drops, refines candidates by alternating between the null vector and the
parameters (the matrix entries are affine in each parameter), and certifies
every witness by evaluating the resulting Cauchy-Riemann residual on a grid:
a returned witness is always self-certifying, an empty answer only means the
search found nothing in the box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import algebra_a2_1, algebra_a2_2, algebra_a2_12
from .calculus import cre_residual
from .errors import DegenerateParameters, DimensionMismatch
from .maps import SmoothMap

CASE_A2_1 = "A2_1"
CASE_A2_2 = "A2_2"
CASE_A2_12 = "A2_12"

WITNESS_TOL = 1e-8
VEE_TOL = 1e-9


@dataclass(frozen=True)
class QuadraticVF:
    """Planar field with components a0 + a1 x + a2 y + a3 x^2 + a4 xy + a5 y^2."""

    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != 6 or len(self.b) != 6:
            raise DimensionMismatch("QuadraticVF needs six coefficients per component")
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))

    def __call__(self, point):
        x, y = point
        mon = np.array([1.0, x, y, x * x, x * y, y * y])
        return np.array([np.dot(self.a, mon), np.dot(self.b, mon)])

    def jacobian(self, point):
        x, y = point
        dx = np.array([0.0, 1.0, 0.0, 2 * x, y, 0.0])
        dy = np.array([0.0, 0.0, 1.0, 0.0, x, 2 * y])
        return np.array([
            [np.dot(self.a, dx), np.dot(self.a, dy)],
            [np.dot(self.b, dx), np.dot(self.b, dy)],
        ])

    def as_map(self):
        return SmoothMap(2, 2, self.__call__, jac=self.jacobian, name="quadratic-vf")

    @property
    def linear_norm(self):
        return float(max(abs(self.a[1]), abs(self.a[2]), abs(self.b[1]), abs(self.b[2])))

    @property
    def quadratic_norm(self):
        return float(max(abs(c) for c in (*self.a[3:], *self.b[3:])))


def build_M6(vf, case, params=()):
    """The six coefficient equations a null vector of which algebrizes vf."""
    a, b = vf.a, vf.b
    if case == CASE_A2_1:
        alpha, beta = params
        return np.array([
            [beta * b[1] + a[1], -b[1], beta * b[2] + a[2], -b[2]],
            [2 * beta * b[3] + 2 * a[3], -2 * b[3], beta * b[4] + a[4], -b[4]],
            [beta * b[4] + a[4], -b[4], 2 * beta * b[5] + 2 * a[5], -2 * b[5]],
            [alpha * b[1], -a[1], alpha * b[2], -a[2]],
            [2 * alpha * b[3], -2 * a[3], alpha * b[4], -a[4]],
            [alpha * b[4], -a[4], 2 * alpha * b[5], -2 * a[5]],
        ])
    if case == CASE_A2_2:
        gamma, delta = params
        return np.array([
            [a[1], gamma * a[1] - b[1], a[2], gamma * a[2] - b[2]],
            [2 * a[3], 2 * gamma * a[3] - 2 * b[3], a[4], gamma * a[4] - b[4]],
            [a[4], gamma * a[4] - b[4], 2 * a[5], 2 * gamma * a[5] - 2 * b[5]],
            [b[1], -delta * a[1], b[2], -delta * a[2]],
            [2 * b[3], -2 * delta * a[3], b[4], -delta * a[4]],
            [b[4], -delta * a[4], 2 * b[5], -2 * delta * a[5]],
        ])
    if case == CASE_A2_12:
        return np.array([
            [0.0, a[1], 0.0, a[2]],
            [0.0, 2 * a[3], 0.0, a[4]],
            [0.0, a[4], 0.0, 2 * a[5]],
            [b[1], 0.0, b[2], 0.0],
            [2 * b[3], 0.0, b[4], 0.0],
            [b[4], 0.0, 2 * b[5], 0.0],
        ])
    raise ValueError(f"unknown case {case!r}")


def build_M4(vf, case, params=()):
    """Rows of M6 coming from the quadratic part (x- and y-coefficients)."""
    return build_M6(vf, case, params)[[1, 2, 4, 5]]


def build_M2(vf, case, params=()):
    """Rows of M6 coming from the linear part (constant coefficients)."""
    return build_M6(vf, case, params)[[0, 3]]


def _case_algebra(case, params):
    if case == CASE_A2_1:
        return algebra_a2_1(*params)
    if case == CASE_A2_2:
        return algebra_a2_2(*params)
    return algebra_a2_12()


@dataclass
class AlgebrizationWitness:
    case: str
    params: tuple
    v: np.ndarray
    phi: SmoothMap
    residual: float
    det_m4: float
    algebra: object

    def phi_matrix(self):
        return self.phi.matrix


def phi_from_v(v):
    """phi(s, t) = (d s - b t, a t - c s) / (ad - bc); the inverse of [[a,b],[c,d]]."""
    a, b, c, d = v
    det = a * d - b * c
    if abs(det) <= 1e-9:
        raise DegenerateParameters(f"ad - bc = {det:.3e} too small")
    m = np.array([[d, -b], [-c, a]]) / det
    return SmoothMap.linear(m, name="phi(v)")


_VERIFY_GRID = [np.array([x, y]) for x in np.linspace(-1.0, 1.0, 5)
                for y in np.linspace(-1.0, 1.0, 5)]


def _certify(vf, case, params, v, tol=WITNESS_TOL):
    try:
        phi = phi_from_v(v)
    except DegenerateParameters:
        return None
    algebra = _case_algebra(case, params)
    fmap = vf.as_map()
    residual = max(cre_residual(fmap, phi, algebra, u) for u in _VERIFY_GRID)
    if residual > tol:
        return None
    det_m4 = abs(float(np.linalg.det(build_M4(vf, case, params))))
    return AlgebrizationWitness(case=case, params=tuple(params), v=np.asarray(v, dtype=float),
                                phi=phi, residual=residual, det_m4=det_m4, algebra=algebra)


def _null_vector(matrix):
    _, s, vt = np.linalg.svd(matrix)
    return vt[-1], (s[-1] / max(s[0], 1e-300) if s[0] > 0 else 0.0)


def _null_candidates(matrix, pair_rtol=1e-6):
    """Candidate null vectors, best-conditioned first.

    A field that is differentiable relative to some linear map has a
    two-dimensional null space here (the map is free up to a regular constant
    factor), and the smallest singular vector alone may be a degenerate
    combination with ad - bc = 0.  When the two smallest singular values are
    both negligible, return the combination maximizing |ad - bc| as well.
    """
    _, s, vt = np.linalg.svd(matrix)
    scale = max(s[0], 1e-300)
    candidates = []
    if s[-2] <= pair_rtol * scale:
        v1, v2 = vt[-1], vt[-2]
        # det(x V1 + y V2) is a quadratic form in (x, y); take the extremal
        # direction of its symmetric matrix
        d1 = v1[0] * v1[3] - v1[1] * v1[2]
        d2 = v2[0] * v2[3] - v2[1] * v2[2]
        cross = (v1[0] * v2[3] + v2[0] * v1[3] - v1[1] * v2[2] - v2[1] * v1[2])
        form = np.array([[d1, cross / 2.0], [cross / 2.0, d2]])
        eigvals, eigvecs = np.linalg.eigh(form)
        best = eigvecs[:, int(np.argmax(np.abs(eigvals)))]
        candidates.append(best[0] * v1 + best[1] * v2)
    candidates.append(vt[-1])
    return candidates


def _param_equations(vf, case, v):
    """Affine equations coef*param + const = 0 implied by one null vector.

    The parametric rows of the stacked matrix are affine in each family
    parameter, so each null vector contributes two equations per parameter.
    Returns (first_param_pairs, second_param_pairs).
    """
    a, b = vf.a, vf.b
    va, vb, vc, vd = v
    if case == CASE_A2_1:
        beta_pairs = [
            (2 * b[3] * va + b[4] * vc, 2 * a[3] * va - 2 * b[3] * vb + a[4] * vc - b[4] * vd),
            (b[4] * va + 2 * b[5] * vc, a[4] * va - b[4] * vb + 2 * a[5] * vc - 2 * b[5] * vd),
        ]
        alpha_pairs = [
            (2 * b[3] * va + b[4] * vc, -(2 * a[3] * vb + a[4] * vd)),
            (b[4] * va + 2 * b[5] * vc, -(a[4] * vb + 2 * a[5] * vd)),
        ]
        return alpha_pairs, beta_pairs
    if case == CASE_A2_2:
        gamma_pairs = [
            (2 * a[3] * vb + a[4] * vd, 2 * a[3] * va - 2 * b[3] * vb + a[4] * vc - b[4] * vd),
            (a[4] * vb + 2 * a[5] * vd, a[4] * va - b[4] * vb + 2 * a[5] * vc - 2 * b[5] * vd),
        ]
        delta_pairs = [
            (2 * a[3] * vb + a[4] * vd, -(2 * b[3] * va + b[4] * vc)),
            (a[4] * vb + 2 * a[5] * vd, -(b[4] * va + 2 * b[5] * vc)),
        ]
        return gamma_pairs, delta_pairs
    raise ValueError(f"case {case!r} has no parameters")


def _params_given_vs(vf, case, vs):
    first, second = [], []
    for v in vs:
        f, s = _param_equations(vf, case, v)
        first.extend(f)
        second.extend(s)
    return (_ls_scalar(first), _ls_scalar(second))


def _ls_scalar(pairs):
    """Solve coef * p + const = 0 in least squares over the given pairs."""
    num = sum(-coef * const for coef, const in pairs)
    den = sum(coef * coef for coef, const in pairs)
    if den < 1e-300:
        return 0.0
    return num / den


def _stacked(vf, case, params, include_linear):
    m4 = build_M4(vf, case, params)
    if include_linear:
        return np.vstack([m4, build_M2(vf, case, params)])
    return m4


def _pencil_seeds(vf):
    """Closed-form parameter candidates from the Jacobian pencil.

    Jf = L0 + L1 x + L2 y; differentiability relative to a linear map forces
    ratios like L2 L1^-1 into the representation span of the algebra, whose
    shape reads the parameters off directly.  Candidates are certified like
    any other seed, so spurious ones are harmless.
    """
    a, b = vf.a, vf.b
    mats = [
        np.array([[a[1], a[2]], [b[1], b[2]]]),
        np.array([[2 * a[3], a[4]], [2 * b[3], b[4]]]),
        np.array([[a[4], 2 * a[5]], [b[4], 2 * b[5]]]),
    ]
    seeds = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            den = mats[j]
            if abs(np.linalg.det(den)) < 1e-9 * max(1.0, float(np.abs(den).max()) ** 2):
                continue
            p = mats[i] @ np.linalg.inv(den)
            if abs(p[1, 0]) > 1e-9:
                seeds.append((CASE_A2_1, (p[0, 1] / p[1, 0], (p[1, 1] - p[0, 0]) / p[1, 0])))
            if abs(p[0, 1]) > 1e-9:
                seeds.append((CASE_A2_2, ((p[0, 0] - p[1, 1]) / p[0, 1], p[1, 0] / p[0, 1])))
    return seeds


def _linear_witness(vf):
    """Purely linear fields: f = (a0, b0) + phi with phi the linear part."""
    lin = np.array([[vf.a[1], vf.a[2]], [vf.b[1], vf.b[2]]])
    phi = SmoothMap.linear(lin, name="linear-part")
    det = np.linalg.det(lin)
    v = None
    if abs(det) > 1e-9:
        inv = np.linalg.inv(lin)
        v = np.array([inv[0, 0], inv[0, 1], inv[1, 0], inv[1, 1]])
    algebra = algebra_a2_1(0.0, 0.0)
    fmap = vf.as_map()
    residual = max(cre_residual(fmap, phi, algebra, u) for u in _VERIFY_GRID)
    return AlgebrizationWitness(case=CASE_A2_1, params=(0.0, 0.0),
                                v=v if v is not None else np.full(4, np.nan),
                                phi=phi, residual=residual, det_m4=0.0, algebra=algebra)


def algebrize(vf, cases=(CASE_A2_1, CASE_A2_2, CASE_A2_12), box=(-10.0, 10.0),
              step=0.25, tol=WITNESS_TOL, refine_iters=60):
    """Search for witnesses that vf is differentiable relative to a linear map.

    Parameter-free case: the stacked matrix directly.  Parametric cases: scan
    the box for small least-singular-values of M4, then alternate
    null-vector / parameter refinement from each local minimum.  Witnesses
    are deduplicated on parameters and kept only when the grid residual is at
    most ``tol``.  An empty list means no witness was found in the box, not a
    proof of impossibility.
    """
    witnesses = []
    if vf.quadratic_norm <= 1e-14:
        w = _linear_witness(vf)
        if w.residual <= tol:
            witnesses.append(w)
        return witnesses

    include_linear = vf.linear_norm > 1e-12

    if CASE_A2_12 in cases:
        for v in _null_candidates(_stacked(vf, CASE_A2_12, (), include_linear)):
            w = _certify(vf, CASE_A2_12, (), v, tol=tol)
            if w is not None:
                witnesses.append(w)
                break

    pencil = _pencil_seeds(vf)
    grid = np.arange(box[0], box[1] + step / 2.0, step)
    for case in (CASE_A2_1, CASE_A2_2):
        if case not in cases:
            continue
        seeds = [(params, True, 5) for (c, params) in pencil if c == case]
        s_last, s_second = _grid_singular_values(vf, case, grid, include_linear)
        seeds += [((grid[i], grid[j]), True, refine_iters)
                  for i, j in _local_minima(s_second, count=20)]
        seeds += [((grid[i], grid[j]), False, refine_iters)
                  for i, j in _local_minima(s_last, count=20)]
        found = []
        for start, pair_mode, iters in seeds:
            refined = _alternate_refine(vf, case, start, include_linear, iters, pair_mode)
            if refined is None:
                continue
            params, candidates = refined
            if any(max(abs(params[0] - p0), abs(params[1] - p1)) < 1e-6 for p0, p1 in found):
                continue
            for v in candidates:
                w = _certify(vf, case, params, v, tol=tol)
                if w is not None:
                    found.append(params)
                    witnesses.append(w)
                    break
    return witnesses


def _grid_singular_values(vf, case, grid, include_linear):
    """Two smallest singular values of the stacked matrix over the grid."""
    p0, p1 = np.meshgrid(grid, grid, indexing="ij")
    flat0, flat1 = p0.ravel(), p1.ravel()
    mats = np.stack([
        _stacked(vf, case, (x, y), include_linear) for x, y in zip(flat0, flat1)
    ])
    svals = np.linalg.svd(mats, compute_uv=False)
    return svals[:, -1].reshape(p0.shape), svals[:, -2].reshape(p0.shape)


def _local_minima(smin, count):
    padded = np.pad(smin, 1, constant_values=np.inf)
    center = padded[1:-1, 1:-1]
    is_min = np.ones_like(center, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            is_min &= center <= padded[1 + dx: padded.shape[0] - 1 + dx,
                                       1 + dy: padded.shape[1] - 1 + dy]
    idx = np.argwhere(is_min)
    order = np.argsort(center[is_min])
    return [tuple(idx[i]) for i in order[:count]]


def _alternate_refine(vf, case, params, include_linear, iters, pair_mode):
    """Alternate trailing-singular-vector extraction with the parameter fit.

    pair_mode drives both trailing singular vectors to the null space, which
    is what a field with a two-dimensional witness family needs; single mode
    contracts onto ordinary rank-drop points.
    """
    params = tuple(float(p) for p in params)
    for _ in range(iters):
        mat = _stacked(vf, case, params, include_linear)
        _, _, vt = np.linalg.svd(mat)
        vs = [vt[-1], vt[-2]] if pair_mode else [vt[-1]]
        new_params = _params_given_vs(vf, case, vs)
        if not all(np.isfinite(new_params)):
            return None
        change = max(abs(new_params[0] - params[0]), abs(new_params[1] - params[1]))
        params = new_params
        if change < 1e-13:
            break
    return params, _null_candidates(_stacked(vf, case, params, include_linear))


# -- the quadratic field attached to triangular billiards ----------------------


@dataclass
class BilliardsField:
    """F(u, v) = (b u^2 - (b+c) uv, a v^2 - (a+c) uv) on C^2 and its real form."""

    a: float
    b: float
    c: float

    @property
    def quadratic_vf(self):
        a, b, c = self.a, self.b, self.c
        return QuadraticVF(a=(0.0, 0.0, 0.0, b, -(b + c), 0.0),
                           b=(0.0, 0.0, 0.0, 0.0, -(a + c), a))

    def complex_eval(self, u, v):
        a, b, c = self.a, self.b, self.c
        return np.array([b * u * u - (b + c) * u * v,
                         a * v * v - (a + c) * u * v])

    def real_eval(self, point):
        x1, y1, x2, y2 = point
        a, b, c = self.a, self.b, self.c
        return np.array([
            b * (x1 ** 2 - y1 ** 2) - (b + c) * (x1 * x2 - y1 * y2),
            2 * b * x1 * y1 - (b + c) * (x1 * y2 + x2 * y1),
            a * (x2 ** 2 - y2 ** 2) - (a + c) * (x1 * x2 - y1 * y2),
            2 * a * x2 * y2 - (a + c) * (x1 * y2 + x2 * y1),
        ])


def billiards_field(a, b, c):
    return BilliardsField(a=float(a), b=float(b), c=float(c))


def billiards_parameters(a, b, c):
    """The closed-form (alpha, beta) and null vector for the billiards field."""
    if abs(a + c) < 1e-12:
        raise DegenerateParameters("a + c = 0")
    alpha = -((b + c) ** 2) / ((a + c) ** 2)
    beta = -2.0 * (b + c) / (a + c) + 4.0 * a * b / ((a + c) ** 2)
    v = np.array([1.0, -(b + c) / (a + c), 0.0, -2.0 * b / (a + c)])
    return alpha, beta, v


@dataclass
class BilliardsReport:
    alpha: float
    beta: float
    v: np.ndarray
    phi_matrix: np.ndarray
    residual: float
    det_m4: float
    algebra: object


_COMPLEX_GRID = [complex(re, im) for re in (-1.5, -0.5, 0.8, 1.4) for im in (-0.9, 0.6, 1.1, -0.3)]


def verify_billiards_algebrization(a, b, c, grid=None):
    """Check F(w) = b * (phi(w))^2 in A2_1(alpha, beta) over a complex grid.

    phi(u, v) = (u - (b+c)/(2b) v, -(a+c)/(2b) v); degenerate when b = 0 or
    a + c = 0.
    """
    if abs(b) < 1e-12:
        raise DegenerateParameters("b = 0")
    if abs(a + c) < 1e-12:
        raise DegenerateParameters("a + c = 0")
    alpha, beta, v = billiards_parameters(a, b, c)
    algebra = algebra_a2_1(alpha, beta, scalars="complex")
    field = billiards_field(a, b, c)
    phi_matrix = np.array([[1.0, -(b + c) / (2.0 * b)], [0.0, -(a + c) / (2.0 * b)]],
                          dtype=complex)
    pts = grid if grid is not None else _COMPLEX_GRID
    worst = 0.0
    for u in pts:
        for w in pts:
            z = np.array([u, w], dtype=complex)
            phi_w = phi_matrix @ z
            rhs = b * algebra.product(phi_w, phi_w)
            lhs = field.complex_eval(z[0], z[1])
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    det_m4 = abs(complex(np.linalg.det(build_M4(field.quadratic_vf, CASE_A2_1, (alpha, beta)))))
    return BilliardsReport(alpha=alpha, beta=beta, v=v, phi_matrix=phi_matrix,
                           residual=worst, det_m4=det_m4, algebra=algebra)
