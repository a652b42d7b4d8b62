"""Hermitian Pauli-sum operators on small registers.

Operators are weighted sums of Pauli strings with real coefficients
(energy units with hbar = 1).  Dense matrices only; registers are capped
at 12 qubits.  Qubit indices in the public helpers are 1-based, and qubit 1
is the most significant factor of the Kronecker product, so basis index 0
is |↑↑…↑⟩ and sigma-z is diag(+1, -1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .state import StateVector

MAX_QUBITS = 12
DEGENERACY_TOL = 1e-9

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


class RegisterTooLargeError(ValueError):
    """Raised when a register exceeds the dense-matrix cap."""


class EigensolverError(RuntimeError):
    """Raised when the dense eigensolver fails to converge."""


def _check_register(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise RegisterTooLargeError(f"register size {n} outside 1..{MAX_QUBITS}")


@dataclass(frozen=True)
class PauliString:
    """One tensor product of single-qubit Pauli factors with a real weight."""

    factors: str
    coefficient: float

    def __post_init__(self):
        if not self.factors or any(f not in _PAULI_MATRICES for f in self.factors):
            raise ValueError(f"invalid Pauli factors {self.factors!r}")
        _check_register(len(self.factors))
        if not np.isfinite(self.coefficient):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def qubit_count(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class PauliSum:
    """Hermitian operator: a real-weighted sum of Pauli strings."""

    terms: tuple[PauliString, ...]

    def __init__(self, terms: Iterable[PauliString]):
        terms = tuple(terms)
        if not terms:
            raise ValueError("a PauliSum needs at least one term")
        n = terms[0].qubit_count
        if any(t.qubit_count != n for t in terms):
            raise ValueError("all terms must share the register size")
        object.__setattr__(self, "terms", terms)

    @property
    def qubit_count(self) -> int:
        return self.terms[0].qubit_count

    @property
    def dim(self) -> int:
        return 2**self.qubit_count

    def scaled(self, factor: float) -> "PauliSum":
        if not np.isfinite(factor):
            raise ValueError("non-finite scale factor")
        return PauliSum(PauliString(t.factors, factor * t.coefficient) for t in self.terms)

    def __mul__(self, factor: float) -> "PauliSum":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self.scaled(-1.0)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.qubit_count != self.qubit_count:
            raise ValueError("mismatched register sizes")
        return PauliSum(self.terms + other.terms).simplified()

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def simplified(self) -> "PauliSum":
        """Merge like factors; zero-weight terms collapse to one identity term."""
        acc: dict[str, float] = {}
        for t in self.terms:
            acc[t.factors] = acc.get(t.factors, 0.0) + t.coefficient
        kept = [PauliString(f, c) for f, c in acc.items() if c != 0.0]
        if not kept:
            kept = [PauliString("I" * self.qubit_count, 0.0)]
        return PauliSum(kept)


def identity(n: int) -> PauliSum:
    return PauliSum([PauliString("I" * n, 1.0)])


def pauli_on(kind: str, qubit: int, n: int, coefficient: float = 1.0) -> PauliSum:
    """Single-qubit Pauli embedded in an n-qubit register (qubit is 1-based)."""
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit {qubit} outside register 1..{n}")
    factors = "".join(kind if q == qubit else "I" for q in range(1, n + 1))
    return PauliSum([PauliString(factors, coefficient)])


def x_on(qubit: int, n: int, coefficient: float = 1.0) -> PauliSum:
    return pauli_on("X", qubit, n, coefficient)


def z_on(qubit: int, n: int, coefficient: float = 1.0) -> PauliSum:
    return pauli_on("Z", qubit, n, coefficient)


def zz_on(i: int, j: int, n: int, coefficient: float = 1.0) -> PauliSum:
    if i == j:
        raise ValueError("coupling needs two distinct qubits")
    factors = "".join("Z" if q in (i, j) else "I" for q in range(1, n + 1))
    return PauliSum([PauliString(factors, coefficient)])


def uniform_x(n: int, coefficient: float = 1.0) -> PauliSum:
    return PauliSum([PauliString("".join("X" if q == k else "I" for q in range(n)), coefficient)
                     for k in range(n)])


def uniform_z(n: int, coefficient: float = 1.0) -> PauliSum:
    return PauliSum([PauliString("".join("Z" if q == k else "I" for q in range(n)), coefficient)
                     for k in range(n)])


@lru_cache(maxsize=512)
def _string_matrix(factors: str) -> np.ndarray:
    out = _PAULI_MATRICES[factors[0]]
    for f in factors[1:]:
        out = np.kron(out, _PAULI_MATRICES[f])
    out.flags.writeable = False
    return out


def build_matrix(op: PauliSum) -> np.ndarray:
    """Dense 2^n x 2^n Hermitian matrix of the operator."""
    _check_register(op.qubit_count)
    out = np.zeros((op.dim, op.dim), dtype=np.complex128)
    for t in op.terms:
        if not np.isfinite(t.coefficient):
            raise ValueError("non-finite coefficient")
        out += t.coefficient * _string_matrix(t.factors)
    return out


@dataclass(frozen=True)
class Spectrum:
    """Exact spectrum with the ground-degeneracy count at a given tolerance."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[StateVector, ...]
    ground_degeneracy: int
    degeneracy_tolerance: float


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    # deterministic output: rotate the largest-magnitude component to the
    # positive real axis
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase


def eigen_decompose(op: PauliSum, tol: float = DEGENERACY_TOL) -> Spectrum:
    matrix = build_matrix(op)
    try:
        evals, evecs = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numerical breakdown
        raise EigensolverError(f"eigensolver failed: {exc}") from exc
    vectors = tuple(StateVector(_fix_phase(evecs[:, k])) for k in range(evals.size))
    degeneracy = int(np.count_nonzero(evals - evals[0] <= tol))
    return Spectrum(evals, vectors, degeneracy, tol)


def ground_space(op: PauliSum, tol: float = DEGENERACY_TOL) -> tuple[StateVector, ...]:
    """Orthonormal basis of the within-tol ground eigenspace."""
    spec = eigen_decompose(op, tol)
    return spec.eigenvectors[: spec.ground_degeneracy]


_TERM_TOKEN = re.compile(r"^([XYZ])(\d+)$")


def parse_pauli_sum(terms: Mapping[str, float], qubits: int) -> PauliSum:
    """Operator literal from a config mapping, e.g. {"Z1*Z2": -1.0, "I": 2.0}.

    Keys are '*'-joined factors; each factor is a Pauli letter followed by a
    1-based qubit index, or the bare letter 'I' for the identity term.
    """
    _check_register(qubits)
    parsed = []
    for key, coeff in terms.items():
        factors = ["I"] * qubits
        if key.strip() != "I":
            for token in key.split("*"):
                m = _TERM_TOKEN.match(token.strip())
                if m is None:
                    raise ValueError(f"cannot parse operator factor {token!r}")
                kind, qubit = m.group(1), int(m.group(2))
                if not 1 <= qubit <= qubits:
                    raise ValueError(f"qubit {qubit} outside register 1..{qubits}")
                if factors[qubit - 1] != "I":
                    raise ValueError(f"qubit {qubit} repeated in term {key!r}")
                factors[qubit - 1] = kind
        parsed.append(PauliString("".join(factors), float(coeff)))
    return PauliSum(parsed)
