"""Register state vectors and computational-basis labelling.

Basis convention used throughout the package: basis index 0 is the all-up
state |↑↑…↑⟩, qubit 1 occupies the most significant bit, and |↑⟩ is the +1
eigenstate of sigma-z.  |±⟩ = (|↑⟩ ± |↓⟩)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UP = "↑"
DOWN = "↓"

NORM_TOL = 1e-8

_CHAR_TO_BIT = {UP: 0, DOWN: 1, "u": 0, "d": 1, "0": 0, "1": 1}


def basis_label(index: int, qubit_count: int) -> str:
    """Arrow-string label of a computational basis state (qubit 1 first)."""
    bits = format(index, f"0{qubit_count}b")
    return "".join(UP if b == "0" else DOWN for b in bits)


def label_to_index(label: str) -> int:
    """Inverse of :func:`basis_label`; also accepts 'u'/'d' and '0'/'1'."""
    index = 0
    for ch in label:
        if ch not in _CHAR_TO_BIT:
            raise ValueError(f"unknown basis character {ch!r} in {label!r}")
        index = (index << 1) | _CHAR_TO_BIT[ch]
    return index


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitudes over the computational basis."""

    amplitudes: np.ndarray
    qubit_count: int

    def __init__(self, amplitudes, qubit_count: int | None = None, _checked: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0 or (amps.size & (amps.size - 1)):
            raise ValueError("amplitude vector length must be a power of two")
        n = int(amps.size).bit_length() - 1
        if qubit_count is not None and qubit_count != n:
            raise ValueError(f"qubit_count {qubit_count} does not match {amps.size} amplitudes")
        if _checked:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state vector norm {norm} deviates from 1 beyond {NORM_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_count", n)

    @classmethod
    def _wrap(cls, amplitudes: np.ndarray) -> "StateVector":
        """Internal constructor that skips the norm check (integrator output)."""
        return cls(amplitudes, _checked=False)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes))


def basis_state(label: str | int, qubit_count: int | None = None) -> StateVector:
    """Computational basis state from an arrow/ud label or a basis index."""
    if isinstance(label, str):
        index = label_to_index(label)
        n = len(label)
    else:
        index = int(label)
        if qubit_count is None:
            raise ValueError("qubit_count is required for integer basis indices")
        n = qubit_count
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


_PM_SINGLE = {
    "+": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0]) / np.sqrt(2.0),
}


def drive_state(label: str) -> StateVector:
    """Product state over single-qubit |+⟩/|−⟩ factors, e.g. "+-"."""
    amps = np.array([1.0], dtype=np.complex128)
    for ch in label:
        if ch not in _PM_SINGLE:
            raise ValueError(f"unknown drive-basis character {ch!r} in {label!r}")
        amps = np.kron(amps, _PM_SINGLE[ch])
    return StateVector(amps)


def parse_state(label: str) -> StateVector:
    """Initial-state label: either all +/- characters or all up/down ones."""
    if all(ch in _PM_SINGLE for ch in label):
        return drive_state(label)
    return basis_state(label)


def drive_basis_matrix(qubit_count: int) -> np.ndarray:
    """Columns are the |±…±⟩ product states ordered like basis labels (+ ↔ bit 0)."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    out = np.array([[1.0]])
    for _ in range(qubit_count):
        out = np.kron(out, h)
    return out.astype(np.complex128)


def drive_label(index: int, qubit_count: int) -> str:
    bits = format(index, f"0{qubit_count}b")
    return "".join("+" if b == "0" else "-" for b in bits)
