"""Finite-dimensional commutative, associative, unital algebras over R or C.

An algebra is R^n (or C^n) together with a bilinear product encoded by a
structure tensor ``c[i, j, k]``: the basis products are
``e_i e_j = sum_k c[i, j, k] e_k``.  Elements are plain length-n vectors.
Every algebra carries its regular representation: ``rep(a)`` is the matrix
of multiplication by ``a``, which turns products, inverses and exponentials
into ordinary linear algebra.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .errors import (
    AssociativityViolation,
    DimensionMismatch,
    NotAssociative,
    NotCommutative,
    NoUnit,
    SingularElement,
)

ASSOC_TOL = 1e-12
SINGULAR_RTOL = 1e-12
INVERSE_RTOL = 1e-10


class Algebra:
    """Commutative unital algebra defined by its structure constants.

    Instances are immutable and all operations are pure, so a single
    algebra value can be shared freely across threads.

    Parameters
    ----------
    constants : (n, n, n) array
        ``constants[i, j, k]`` is the e_k coefficient of ``e_i e_j``.
    unit : (n,) array
        Coefficients of the unit element.
    scalars : {"real", "complex"}
        Scalar field tag; complex constants/elements require "complex".
    name : str
        Optional display name.
    check : bool
        Validate commutativity, the unit, and associativity on
        construction (raising NotCommutative / NoUnit / NotAssociative).
    """

    def __init__(self, constants, unit, scalars="real", name="", check=True):
        if scalars not in ("real", "complex"):
            raise ValueError(f"unknown scalar field {scalars!r}")
        dtype = complex if scalars == "complex" else float
        constants = np.array(constants, dtype=dtype)
        unit = np.array(unit, dtype=dtype)
        if constants.ndim != 3 or len(set(constants.shape)) != 1:
            raise DimensionMismatch(f"constants must be (n, n, n), got {constants.shape}")
        n = constants.shape[0]
        if unit.shape != (n,):
            raise DimensionMismatch(f"unit must have length {n}, got {unit.shape}")
        self.dim = n
        self.scalars = scalars
        self.name = name
        self.constants = constants
        self.unit = unit
        # basis representation matrices: rep_basis[i][j, k] = c[i, k, j]
        self.rep_basis = np.swapaxes(constants, 1, 2).copy()
        for arr in (self.constants, self.unit, self.rep_basis):
            arr.setflags(write=False)
        if check:
            self._validate()

    # -- construction-time axioms -------------------------------------------

    def _validate(self):
        c = self.constants
        scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
        comm = np.abs(c - np.swapaxes(c, 0, 1))
        if comm.size and comm.max() > ASSOC_TOL * scale:
            i, j, k = np.unravel_index(np.argmax(comm), comm.shape)
            raise NotCommutative((int(i), int(j), int(k)), float(comm.max()))
        rep_unit = self.rep(self.unit)
        unit_dev = np.abs(rep_unit - np.eye(self.dim))
        if unit_dev.max() > ASSOC_TOL * max(1.0, float(np.max(np.abs(self.unit)))):
            k = int(np.argmax(unit_dev.sum(axis=0)))
            raise NoUnit(k, float(unit_dev.max()))
        dev, triple = self.associativity_defect()
        if dev > ASSOC_TOL * scale * scale:
            raise NotAssociative(triple, dev)

    def associativity_defect(self):
        """Worst deviation of (e_i e_j) e_k from e_i (e_j e_k) over basis triples."""
        c = self.constants
        left = np.einsum("ijm,mkq->ijkq", c, c)
        right = np.einsum("jkm,imq->ijkq", c, c)
        diff = np.abs(left - right)
        if diff.size == 0:
            return 0.0, (0, 0, 0)
        flat = np.unravel_index(np.argmax(diff), diff.shape)
        return float(diff.max()), tuple(int(x) for x in flat[:3])

    # -- element arithmetic --------------------------------------------------

    def element(self, coeffs):
        """Coerce a sequence into a coefficient vector of the right length."""
        a = np.asarray(coeffs, dtype=complex if self.scalars == "complex" else float)
        if a.shape != (self.dim,):
            raise DimensionMismatch(f"expected length-{self.dim} vector, got shape {a.shape}")
        return a

    def zero(self):
        return np.zeros(self.dim, dtype=self.unit.dtype)

    def product(self, a, b):
        return np.einsum("i,j,ijk->k", np.asarray(a), np.asarray(b), self.constants)

    def rep(self, a):
        """First fundamental representation: the matrix of multiplication by ``a``."""
        return np.tensordot(np.asarray(a), self.rep_basis, axes=(0, 0))

    def is_regular(self, a, rtol=SINGULAR_RTOL):
        s = np.linalg.svd(self.rep(a), compute_uv=False)
        return bool(s[0] > 0.0 and s[-1] > rtol * s[0])

    def inverse(self, a):
        a = np.asarray(a)
        r = self.rep(a)
        s = np.linalg.svd(r, compute_uv=False)
        if s[0] == 0.0 or s[-1] < SINGULAR_RTOL * s[0]:
            raise SingularElement(f"element {a} is singular (smin/smax={s[-1]:.2e}/{s[0]:.2e})")
        return np.linalg.solve(r, self.unit)

    def div(self, a, b):
        return self.product(a, self.inverse(b))

    def power(self, a, m):
        if m < 0 or int(m) != m:
            raise ValueError("power expects a nonnegative integer exponent")
        out = self.unit.copy()
        for _ in range(int(m)):
            out = self.product(out, a)
        return out

    def exp(self, a):
        """Algebra exponential via the representation matrix.

        rep is an injective homomorphism, so expm(rep(a)) = rep(exp a) and the
        coefficients of exp(a) are recovered exactly by applying it to the unit.
        """
        return expm(self.rep(a)) @ self.unit

    def random_element(self, rng, scale=1.0):
        x = rng.standard_normal(self.dim) * scale
        if self.scalars == "complex":
            x = x + 1j * rng.standard_normal(self.dim) * scale
        return x

    def random_regular(self, rng, scale=1.0, max_tries=100):
        for _ in range(max_tries):
            x = self.random_element(rng, scale)
            if self.is_regular(x):
                return x
        raise SingularElement("could not draw a regular element")

    def norm(self, a):
        return float(np.linalg.norm(a))

    # -- serialization --------------------------------------------------------

    def to_dict(self):
        return {
            "dim": self.dim,
            "scalars": self.scalars,
            "constants": _encode(self.constants, self.scalars),
            "unit": _encode(self.unit, self.scalars),
        }

    @classmethod
    def from_dict(cls, data, check=True):
        scalars = data["scalars"]
        return cls(
            _decode(data["constants"], scalars),
            _decode(data["unit"], scalars),
            scalars=scalars,
            name=data.get("name", ""),
            check=check,
        )

    def __repr__(self):
        label = self.name or f"dim-{self.dim}"
        return f"Algebra({label}, scalars={self.scalars})"


def _encode(arr, scalars):
    if scalars == "complex":
        stacked = np.stack([arr.real, arr.imag], axis=-1)
        return stacked.tolist()
    return np.asarray(arr, dtype=float).tolist()


def _decode(data, scalars):
    arr = np.asarray(data, dtype=float)
    if scalars == "complex":
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


# -- the concrete families used throughout -----------------------------------


def algebra_a2_1(alpha, beta, scalars="real"):
    """Two-dimensional algebra with e1 the unit and e2*e2 = alpha*e1 + beta*e2."""
    c = np.zeros((2, 2, 2), dtype=complex if scalars == "complex" else float)
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 1.0
    c[1, 1, 0] = alpha
    c[1, 1, 1] = beta
    return Algebra(c, [1.0, 0.0], scalars=scalars, name=f"A2_1({alpha},{beta})")


def algebra_a2_2(gamma, delta, scalars="real"):
    """Two-dimensional algebra with e2 the unit and e1*e1 = gamma*e1 + delta*e2."""
    c = np.zeros((2, 2, 2), dtype=complex if scalars == "complex" else float)
    c[0, 0, 0] = gamma
    c[0, 0, 1] = delta
    c[0, 1, 0] = 1.0
    c[1, 0, 0] = 1.0
    c[1, 1, 1] = 1.0
    return Algebra(c, [0.0, 1.0], scalars=scalars, name=f"A2_2({gamma},{delta})")


def algebra_a2_12():
    """R^2 with the componentwise product; the unit is (1, 1)."""
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = 1.0
    c[1, 1, 1] = 1.0
    return Algebra(c, [1.0, 1.0], name="A2_12")


def complex_algebra():
    """The complex numbers presented on R^2 (i*i = -1)."""
    alg = algebra_a2_1(-1.0, 0.0)
    alg.name = "C"
    return alg


def a3_1_dependent_params(p):
    """The (p7, p8, p9) forced by associativity for the three-dimensional family.

    These are the unique values making the multiplication table associative
    (solving the basis-triple equations symbolically gives exactly this
    assignment and no other).
    """
    p1, p2, p3, p4, p5, p6 = p
    p7 = p2 * p3 + p4 * p4 - p1 * p4 - p2 * p6
    p8 = p2 * p5 - p3 * p4
    p9 = p3 * p3 + p4 * p5 - p1 * p5 - p3 * p6
    return p7, p8, p9


def algebra_a3_1(p):
    """Three-dimensional algebra with unit e1 from six free parameters.

    The products of e2 and e3 are
        e2 e2 = p7 e1 + p1 e2 + p2 e3
        e2 e3 = p8 e1 + p3 e2 + p4 e3
        e3 e3 = p9 e1 + p5 e2 + p6 e3
    with (p7, p8, p9) computed from (p1..p6) so that the product is
    associative.  A failed associativity check here signals a bug, not bad
    input, hence the dedicated error type.
    """
    p = tuple(float(x) for x in p)
    if len(p) != 6:
        raise ValueError("expected six parameters p1..p6")
    p1, p2, p3, p4, p5, p6 = p
    p7, p8, p9 = a3_1_dependent_params(p)
    c = np.zeros((3, 3, 3))
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = c[1, 0, 1] = 1.0
    c[0, 2, 2] = c[2, 0, 2] = 1.0
    c[1, 1] = [p7, p1, p2]
    c[1, 2] = [p8, p3, p4]
    c[2, 1] = [p8, p3, p4]
    c[2, 2] = [p9, p5, p6]
    try:
        alg = Algebra(c, [1.0, 0.0, 0.0], name=f"A3_1{p}")
    except NotAssociative as exc:
        raise AssociativityViolation(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(c)))) ** 2
    dev, triple = alg.associativity_defect()
    if dev > 1e-10 * scale:
        raise AssociativityViolation(f"defect {dev:.3e} at triple {triple}")
    return alg


def algebra_from_constants(constants, unit, scalars="real", name=""):
    """General constructor; validates all three axioms with specific errors."""
    return Algebra(constants, unit, scalars=scalars, name=name, check=True)
