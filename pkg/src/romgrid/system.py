"""Parametric system model.

A system is a triple of affine matrix families ``Q(p) x = B(p) u``,
``y = C(p) x`` whose coefficients are monomials in named scalar parameters.
The Laplace variable is an ordinary parameter named ``"s"``, so frequency
sweeps pass sample points like ``{"s": 2j*pi*f}`` and parametric systems
simply add more names.
"""

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    MissingParameterError,
    SingularAtSampleError,
    SingularMatrixError,
    UnknownParameterNameError,
    ZeroToNegativePowerError,
)

__all__ = [
    "LAPLACE",
    "Monomial",
    "AffineMatrix",
    "ParametricSystem",
    "from_first_order",
    "from_second_order",
    "frequency_point",
]

#: Conventional name of the Laplace variable among the parameters.
LAPLACE = "s"


def frequency_point(f):
    """Sample point on the imaginary axis at frequency ``f`` in Hz: s = 2*pi*f*1j."""
    return {LAPLACE: 2j * np.pi * f}


class Monomial:
    """Scalar coefficient ``c * prod(p[name] ** exponent)``.

    Exponents are signed integers over parameter names, so rational terms
    like ``s**2 * d ** -1`` are single monomials. Evaluation raises
    MissingParameterError for absent names and ZeroToNegativePowerError
    when a negative power meets a zero value.
    """

    __slots__ = ("coefficient", "exponents")

    def __init__(self, coefficient=1.0, exponents=None):
        self.coefficient = complex(coefficient)
        items = {}
        for name, power in (exponents or {}).items():
            if int(power) != power:
                raise ValueError(f"exponent of {name!r} must be an integer, got {power!r}")
            if int(power) != 0:
                items[str(name)] = int(power)
        self.exponents = dict(sorted(items.items()))

    def __call__(self, point):
        value = self.coefficient
        for name, power in self.exponents.items():
            if name not in point:
                raise MissingParameterError(f"sample point is missing parameter {name!r}")
            base = complex(point[name])
            if base == 0 and power < 0:
                raise ZeroToNegativePowerError(
                    f"parameter {name!r} is zero but appears with exponent {power}"
                )
            value *= base**power
        return value

    @property
    def is_constant(self):
        return not self.exponents

    def names(self):
        return tuple(sorted(self.exponents))

    def times(self, other):
        """Product with another monomial (coefficients multiply, exponents add)."""
        exponents = dict(self.exponents)
        for name, power in other.exponents.items():
            exponents[name] = exponents.get(name, 0) + power
        return Monomial(self.coefficient * other.coefficient, exponents)

    def scaled(self, factor):
        return Monomial(self.coefficient * factor, self.exponents)

    def diff(self, name):
        """Partial derivative with respect to one parameter, or None if absent."""
        power = self.exponents.get(name, 0)
        if power == 0:
            return None
        exponents = dict(self.exponents)
        exponents[name] = power - 1
        return Monomial(self.coefficient * power, exponents)

    def __repr__(self):
        factors = "".join(
            f"*{name}**{power}" if power != 1 else f"*{name}"
            for name, power in self.exponents.items()
        )
        return f"Monomial({self.coefficient!r}{factors})"

    def __eq__(self, other):
        return (
            isinstance(other, Monomial)
            and self.coefficient == other.coefficient
            and self.exponents == other.exponents
        )


class AffineMatrix:
    """Matrix family ``M(p) = base + sum_j h_j(p) * M_j`` with monomial h_j.

    Parameters
    ----------
    shape : tuple
        Matrix dimensions, fixed across all terms.
    base : ndarray or None
        Constant part; None means zero.
    terms : sequence of (Monomial, ndarray)
        Parameter-dependent terms. Constant monomials are allowed but the
        canonical constructors fold them into ``base``.
    """

    def __init__(self, shape, base=None, terms=()):
        self.shape = (int(shape[0]), int(shape[1]))
        if base is None:
            self.base = np.zeros(self.shape, dtype=np.complex128)
        else:
            self.base = linalg._as_complex_matrix(base, "base term")
            if self.base.shape != self.shape:
                raise DimensionMismatchError(
                    f"base term has shape {self.base.shape}, expected {self.shape}"
                )
        checked = []
        for monomial, matrix in terms:
            matrix = linalg._as_complex_matrix(matrix, "affine term")
            if matrix.shape != self.shape:
                raise DimensionMismatchError(
                    f"affine term has shape {matrix.shape}, expected {self.shape}"
                )
            checked.append((monomial, matrix))
        self.terms = tuple(checked)

    @classmethod
    def constant(cls, matrix):
        matrix = linalg._as_complex_matrix(matrix, "matrix")
        return cls(matrix.shape, base=matrix)

    def __call__(self, point):
        return self.assemble(point)

    def assemble(self, point):
        """Evaluate ``M(p)`` at a sample point."""
        out = self.base.copy()
        for monomial, matrix in self.terms:
            out += monomial(point) * matrix
        return out

    def parameter_names(self):
        names = set()
        for monomial, _ in self.terms:
            names.update(monomial.names())
        return tuple(sorted(names))

    def map_matrices(self, f):
        """Apply ``f`` to the base and every term matrix, keeping coefficients."""
        base = linalg._as_complex_matrix(f(self.base), "mapped base")
        terms = [(monomial, f(matrix)) for monomial, matrix in self.terms]
        return AffineMatrix(base.shape, base=base, terms=terms)

    def transposed(self):
        """Termwise plain transpose (no conjugation)."""
        return self.map_matrices(lambda m: m.T.copy())

    def diff(self, name):
        """Termwise partial derivative with respect to one parameter."""
        terms = []
        for monomial, matrix in self.terms:
            d = monomial.diff(name)
            if d is not None:
                terms.append((d, matrix))
        return AffineMatrix(self.shape, base=None, terms=terms)

    def scaled_by(self, monomial):
        """Multiply the whole family by a monomial; base becomes a term."""
        terms = []
        if np.any(self.base):
            terms.append((monomial, self.base))
        for own, matrix in self.terms:
            terms.append((own.times(monomial), matrix))
        return AffineMatrix(self.shape, base=None, terms=terms)

    def plus(self, other, factor=1.0):
        """Termwise sum ``self + factor * other`` (no algebraic merging)."""
        if other.shape != self.shape:
            raise DimensionMismatchError(
                f"cannot add shapes {self.shape} and {other.shape}"
            )
        base = self.base + factor * other.base
        terms = list(self.terms)
        terms += [(monomial.scaled(factor), matrix) for monomial, matrix in other.terms]
        return AffineMatrix(self.shape, base=base, terms=terms)

    def pieces(self):
        """Constituent matrices: base (when nonzero) then every term matrix."""
        out = []
        if np.any(self.base):
            out.append(self.base)
        out.extend(matrix for _, matrix in self.terms)
        return out

    def __repr__(self):
        return f"AffineMatrix(shape={self.shape}, terms={len(self.terms)})"


class ParametricSystem:
    """Input/output system ``Q(p) x = B(p)``, ``y = C(p) x``.

    Attributes
    ----------
    Q, B, C : AffineMatrix
        Operator (n x n), input (n x n_inputs), output (n_outputs x n).
    parameter_names : tuple of str
        Declared parameters; every coefficient must draw from these.
    """

    def __init__(self, Q, B, C, parameter_names=None, name="system"):
        if Q.shape[0] != Q.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {Q.shape}")
        n = Q.shape[0]
        if B.shape[0] != n:
            raise DimensionMismatchError(f"input map has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise DimensionMismatchError(f"output map has {C.shape[1]} columns, expected {n}")
        self.Q = Q
        self.B = B
        self.C = C
        self.name = name
        used = set(Q.parameter_names()) | set(B.parameter_names()) | set(C.parameter_names())
        if parameter_names is None:
            parameter_names = sorted(used)
        unknown = used - set(parameter_names)
        if unknown:
            raise UnknownParameterNameError(
                f"coefficients use undeclared parameters {sorted(unknown)}"
            )
        self.parameter_names = tuple(parameter_names)

    @property
    def order(self):
        return self.Q.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]

    @property
    def is_parametric(self):
        """True when parameters beyond the Laplace variable are declared."""
        return any(name != LAPLACE for name in self.parameter_names)

    def dual(self):
        """Transposed system: operator Q^T, input C^T, output B^T.

        The dual of the dual is the original family, and reducing the dual
        system is exactly building a dual reduced model, so every dual-side
        computation reuses the primal code path.
        """
        return ParametricSystem(
            self.Q.transposed(),
            self.C.transposed(),
            self.B.transposed(),
            parameter_names=self.parameter_names,
            name=f"{self.name}:dual",
        )

    def operator_lu(self, point):
        """LU of ``Q(p)``, raising SingularAtSampleError on rank loss."""
        try:
            return linalg.lu_factor(self.Q.assemble(point))
        except SingularMatrixError as exc:
            raise SingularAtSampleError(
                f"operator of {self.name!r} is singular at {point!r}: {exc}", point
            ) from exc

    def solve_primal(self, point, lu=None):
        """Full-order state block ``x = Q(p)^{-1} B(p)`` (n x n_inputs)."""
        lu = lu or self.operator_lu(point)
        return lu.solve(self.B.assemble(point))

    def solve_dual(self, point, lu=None):
        """Full-order dual block ``x_du = Q(p)^{-T} C(p)^T`` (n x n_outputs)."""
        lu = lu or self.operator_lu(point)
        return lu.solve(self.C.assemble(point).T, transpose=True)

    def transfer_function(self, point):
        """Transfer matrix ``H(p) = C(p) Q(p)^{-1} B(p)`` (n_outputs x n_inputs)."""
        return self.C.assemble(point) @ self.solve_primal(point)


def from_first_order(E, A, B, C, parameter_names=None, name="system"):
    """System from a first-order realization ``(s E(p) - A(p)) x = B(p) u``.

    E and A may be ndarrays (constant) or AffineMatrix families; the operator
    becomes ``Q = s * E - A`` with the Laplace factor folded into the
    coefficients.
    """
    E = E if isinstance(E, AffineMatrix) else AffineMatrix.constant(E)
    A = A if isinstance(A, AffineMatrix) else AffineMatrix.constant(A)
    B = B if isinstance(B, AffineMatrix) else AffineMatrix.constant(B)
    C = C if isinstance(C, AffineMatrix) else AffineMatrix.constant(C)
    s = Monomial(1.0, {LAPLACE: 1})
    Q = E.scaled_by(s).plus(A, factor=-1.0)
    if parameter_names is None:
        used = set(Q.parameter_names()) | set(B.parameter_names()) | set(C.parameter_names())
        parameter_names = sorted(used | {LAPLACE})
    return ParametricSystem(Q, B, C, parameter_names=parameter_names, name=name)


def from_second_order(M, D, T, B, C, parameter_names=None, name="system"):
    """System from a second-order form ``(s^2 M + s D + T) x = B u``.

    The operator keeps second-order structure (no companion linearization);
    M, D, T may themselves be affine in further parameters.
    """
    M = M if isinstance(M, AffineMatrix) else AffineMatrix.constant(M)
    D = D if isinstance(D, AffineMatrix) else AffineMatrix.constant(D)
    T = T if isinstance(T, AffineMatrix) else AffineMatrix.constant(T)
    B = B if isinstance(B, AffineMatrix) else AffineMatrix.constant(B)
    C = C if isinstance(C, AffineMatrix) else AffineMatrix.constant(C)
    s = Monomial(1.0, {LAPLACE: 1})
    s2 = Monomial(1.0, {LAPLACE: 2})
    Q = T.plus(D.scaled_by(s)).plus(M.scaled_by(s2))
    if parameter_names is None:
        used = set(Q.parameter_names()) | set(B.parameter_names()) | set(C.parameter_names())
        parameter_names = sorted(used | {LAPLACE})
    return ParametricSystem(Q, B, C, parameter_names=parameter_names, name=name)
