"""Quantum-state linear algebra on two rails: exact ring arithmetic for rays,
plain complex floats for amplitudes and outcome probabilities.

Every logical decision downstream (orthogonality of rays, colorability) is
made on the exact rail; floats only ever carry probability values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NORM_EPS = 1e-9
ORTHO_EPS = 1e-9
SUM_EPS = 1e-9

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class QuantExt:
    """Element ``a + b*sqrt(2)`` of the quadratic integer ring Z[sqrt(2)].

    Python integers are arbitrary precision, so addition, subtraction and
    multiplication are closed and never overflow; equality and the zero
    test are exact integer comparisons.
    """

    a: int
    b: int

    def __add__(self, other: QuantExt) -> QuantExt:
        return QuantExt(self.a + other.a, self.b + other.b)

    def __sub__(self, other: QuantExt) -> QuantExt:
        return QuantExt(self.a - other.a, self.b - other.b)

    def __mul__(self, other: QuantExt) -> QuantExt:
        return QuantExt(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    def __neg__(self) -> QuantExt:
        return QuantExt(-self.a, -self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_float(self) -> float:
        return self.a + self.b * SQRT2

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{self.b:+d} r2"


QE_ZERO = QuantExt(0, 0)
QE_ONE = QuantExt(1, 0)
QE_SQRT2 = QuantExt(0, 1)


@dataclass(frozen=True)
class Ket:
    """A pure state on C^dim; amplitudes are complex floats, unit norm."""

    amps: tuple[complex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "amps", tuple(complex(a) for a in self.amps))
        if len(self.amps) < 2:
            raise ValueError(f"kets need dimension >= 2, got {len(self.amps)}")
        norm_sq = math.fsum(abs(a) ** 2 for a in self.amps)
        if abs(norm_sq - 1.0) > NORM_EPS:
            raise ValueError(f"ket is not normalized: sum |amp|^2 = {norm_sq!r}")

    @property
    def dim(self) -> int:
        return len(self.amps)

    @staticmethod
    def basis(dim: int, index: int) -> Ket:
        """Computational basis vector e_index."""
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for dim {dim}")
        return Ket(tuple(1.0 + 0j if i == index else 0j for i in range(dim)))

    @staticmethod
    def normalized(amps) -> Ket:
        """Scale an arbitrary nonzero amplitude sequence to unit norm."""
        amps = tuple(complex(a) for a in amps)
        norm = math.sqrt(math.fsum(abs(a) ** 2 for a in amps))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Ket(tuple(a / norm for a in amps))


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """A complete orthonormal basis; one outcome per basis vector."""

    label: str
    outcomes: tuple[Ket, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if not self.outcomes:
            raise ValueError("measurement needs at least one outcome")
        dim = self.outcomes[0].dim
        if any(k.dim != dim for k in self.outcomes):
            raise ValueError(f"measurement {self.label!r}: mixed outcome dimensions")
        if len(self.outcomes) != dim:
            raise ValueError(
                f"measurement {self.label!r}: {len(self.outcomes)} outcomes "
                f"do not form a complete basis in dim {dim}"
            )
        for i in range(dim):
            for j in range(i + 1, dim):
                ov = abs(inner_product(self.outcomes[i], self.outcomes[j]))
                if ov > ORTHO_EPS:
                    raise ValueError(
                        f"measurement {self.label!r}: outcomes {i} and {j} "
                        f"are not orthogonal (|<i|j>| = {ov!r})"
                    )

    @property
    def dim(self) -> int:
        return self.outcomes[0].dim


@dataclass(frozen=True)
class Ray:
    """A projective ray with exact Z[sqrt(2)] coordinates.

    ``id`` is the ray's index inside its owning ray set (-1 when standalone).
    """

    coords: tuple[QuantExt, ...]
    id: int = -1

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise ValueError("ray needs at least one coordinate")
        if all(c.is_zero() for c in self.coords):
            raise ValueError("zero ray is not projective")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def projectively_equal(self, other: Ray) -> bool:
        """Exact proportionality test: all 2x2 coordinate minors vanish."""
        if self.dim != other.dim:
            return False
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                lhs = self.coords[i] * other.coords[j]
                rhs = self.coords[j] * other.coords[i]
                if lhs != rhs:
                    return False
        return True


def inner_product(x: Ket, y: Ket) -> complex:
    """Hermitian inner product <x|y> = sum_i conj(x_i) * y_i."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return sum(a.conjugate() * b for a, b in zip(x.amps, y.amps))


def born_probability(psi: Ket, m: ProjectiveMeasurement, outcome_index: int) -> float:
    """Probability |<outcome|psi>|^2 of one measurement outcome."""
    if psi.dim != m.dim:
        raise ValueError(f"dimension mismatch: state {psi.dim} vs measurement {m.dim}")
    if not 0 <= outcome_index < m.dim:
        raise ValueError(f"outcome index {outcome_index} out of range for dim {m.dim}")
    return abs(inner_product(m.outcomes[outcome_index], psi)) ** 2


def ray_dot(x: Ray, y: Ray) -> QuantExt:
    """Exact ring inner product of two real-coordinate rays."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    acc = QE_ZERO
    for a, b in zip(x.coords, y.coords):
        acc = acc + a * b
    return acc


def ray_to_ket(r: Ray) -> Ket:
    """Evaluate exact coordinates as floats and normalize to a unit ket."""
    return Ket.normalized(c.to_float() for c in r.coords)


def same_projector(x: Ket, y: Ket, eps: float = ORTHO_EPS) -> bool:
    """True when two kets span the same ray (equal up to global phase)."""
    if x.dim != y.dim:
        return False
    return abs(1.0 - abs(inner_product(x, y))) <= eps
