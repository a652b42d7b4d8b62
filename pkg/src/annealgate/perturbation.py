"""First-order degenerate perturbation theory for two-fold ground spaces.

This is the analytic cross-check for the annealed gate pipelines: split a
Hamiltonian into an unperturbed part with a doubly degenerate ground space
and a perturbation V, and solve the 2x2 secular problem exactly.  Both a
generic matrix-element route and the closed forms for the single-qubit
rotation and the controlled-not setup are provided; they must agree, which
is what makes the pair usable as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import operators
from .operators import PauliSum, build_matrix
from .state import StateVector, basis_label, basis_state

_ALIGN_TOL = 1e-8


class DegeneratePerturbationError(ValueError):
    """V does not lift the two-fold degeneracy (V12 = 0 and V11 = V22)."""


@dataclass(frozen=True)
class DegeneratePair:
    """Two orthogonal (computational-basis) ground kets and the matrix
    elements V_nm = <n|V|m> of the perturbation between them."""

    ket1: StateVector
    ket2: StateVector
    V11: float
    V22: float
    V12: complex
    V21: complex

    def __post_init__(self):
        if abs(np.vdot(self.ket1.amplitudes, self.ket2.amplitudes)) > 1e-10:
            raise ValueError("ground kets must be orthogonal")
        if abs(self.V21 - np.conj(self.V12)) > 1e-12:
            raise ValueError("V21 must equal conj(V12)")

    @classmethod
    def from_elements(cls, V11: float, V22: float, V12: complex,
                      ket1: StateVector | None = None,
                      ket2: StateVector | None = None) -> "DegeneratePair":
        ket1 = ket1 if ket1 is not None else basis_state("u")
        ket2 = ket2 if ket2 is not None else basis_state("d")
        return cls(ket1, ket2, float(V11), float(V22), complex(V12), np.conj(complex(V12)))


@dataclass(frozen=True)
class PerturbationResult:
    """First-order energies E1_{+/-} and the zeroth-order amplitude pairs
    (c_{+,1}, c_{+,2}) and (c_{-,1}, c_{-,2}) on (ket1, ket2)."""

    E1_plus: float
    E1_minus: float
    amp_plus: tuple[float, float]
    amp_minus: tuple[float, float]
    kets: tuple[str, str] = ("", "")

    @property
    def populations_plus(self) -> tuple[float, float]:
        return (self.amp_plus[0] ** 2, self.amp_plus[1] ** 2)

    @property
    def populations_minus(self) -> tuple[float, float]:
        return (self.amp_minus[0] ** 2, self.amp_minus[1] ** 2)


def _branch_vector(V11: float, V22: float, v12: float, energy: float) -> tuple[float, float]:
    # eigenvector of [[V11, v12], [v12, V22]] for the given eigenvalue,
    # oriented as (v12, E - V11) so the amplitude ratio is v12 / (E - V11)
    c1, c2 = v12, energy - V11
    if c1 == 0.0 and c2 == 0.0:
        # eigenvalue coincides with V11 and the coupling vanishes
        return (1.0, 0.0)
    norm = np.hypot(c1, c2)
    return (c1 / norm, c2 / norm)


def first_order(pair: DegeneratePair) -> PerturbationResult:
    """Solve the 2x2 secular problem:

    E_{+/-} = ((V11+V22) +/- sqrt((V11-V22)^2 + 4|V12|^2)) / 2, with the
    amplitude ratio c1/c2 = V12 / (E - V11), normalised.  For complex V12
    the first ket is rotated so the coupling becomes real; the reported
    amplitudes live in that frame (populations are unaffected).
    """
    V11, V22, V12 = pair.V11, pair.V22, pair.V12
    if V12 == 0 and V11 == V22:
        raise DegeneratePerturbationError(
            "perturbation leaves the ground space fully degenerate; amplitude ratio undefined")
    v12 = float(np.real(V12)) if abs(np.imag(V12)) < 1e-14 else float(abs(V12))
    half_span = np.sqrt((V11 - V22) ** 2 + 4.0 * abs(V12) ** 2) / 2.0
    mid = (V11 + V22) / 2.0
    e_plus, e_minus = mid + half_span, mid - half_span
    if v12 == 0.0:
        # no coupling: the kets themselves are the branch states
        amp_plus = (1.0, 0.0) if V11 > V22 else (0.0, 1.0)
        amp_minus = (0.0, 1.0) if V11 > V22 else (1.0, 0.0)
    else:
        amp_plus = _branch_vector(V11, V22, v12, e_plus)
        amp_minus = _branch_vector(V11, V22, v12, e_minus)
    labels = (basis_label(int(np.argmax(np.abs(pair.ket1.amplitudes))), pair.ket1.qubit_count),
              basis_label(int(np.argmax(np.abs(pair.ket2.amplitudes))), pair.ket2.qubit_count))
    return PerturbationResult(float(e_plus), float(e_minus), amp_plus, amp_minus, labels)


def generic_first_order(h0: PauliSum, v: PauliSum, tol: float = operators.DEGENERACY_TOL,
                        kets: tuple[int, int] | None = None) -> PerturbationResult:
    """Matrix-element route: diagonalise h0, require a two-fold ground space
    spanned by computational basis states, build V_nm there, and delegate.

    kets optionally fixes which basis index plays ket1/ket2 (default: the two
    spanning indices in ascending order).
    """
    space = operators.ground_space(h0, tol)
    if len(space) != 2:
        raise ValueError(f"ground degeneracy is {len(space)}, need exactly 2")
    dim = space[0].dim
    projector = sum(np.outer(g.amplitudes, g.amplitudes.conj()) for g in space)
    spanning = [i for i in range(dim) if projector[i, i] > 1.0 - _ALIGN_TOL]
    if len(spanning) != 2:
        raise ValueError("ground space is not spanned by computational basis states")
    if kets is not None:
        if sorted(kets) != spanning:
            raise ValueError(f"requested kets {kets} do not span the ground space {spanning}")
        i1, i2 = kets
    else:
        i1, i2 = spanning
    vmat = build_matrix(v)
    pair = DegeneratePair(
        basis_state(i1, h0.qubit_count),
        basis_state(i2, h0.qubit_count),
        float(np.real(vmat[i1, i1])),
        float(np.real(vmat[i2, i2])),
        complex(vmat[i1, i2]),
        complex(vmat[i2, i1]),
    )
    return first_order(pair)


class BranchPopulations(NamedTuple):
    """Squared amplitudes on (ket1, ket2) for the upper and lower branch."""

    first_plus: float
    second_plus: float
    first_minus: float
    second_minus: float


def xrot_populations(h_z: float) -> BranchPopulations:
    """Closed-form pole populations for the single-qubit rotation setup.

    ket1 = |↑⟩, ket2 = |↓⟩; c^2_{±,1} = 1 / (1 + (±sqrt(1+h_z^2) - h_z)^2).
    """
    if not np.isfinite(h_z):
        raise ValueError("h_z must be finite")
    root = np.sqrt(1.0 + h_z * h_z)
    u_plus = root - h_z
    u_minus = -root - h_z
    p1_plus = 1.0 / (1.0 + u_plus * u_plus)
    p1_minus = 1.0 / (1.0 + u_minus * u_minus)
    return BranchPopulations(p1_plus, 1.0 - p1_plus, p1_minus, 1.0 - p1_minus)


def cnot_populations(a: float, h_z: float) -> BranchPopulations:
    """Closed-form pole populations for the controlled-not setup.

    ket1 = |↓↓⟩, ket2 = |↓↑⟩; with K_± = 2a(1+h_z) ± sqrt((2a(1+h_z))^2 + 1),
    c^2_{±,1} = 1/(K_±^2+1) and c^2_{±,2} = K_±^2/(K_±^2+1).  Here `a` is the
    weight of the second qubit in the longitudinal pulse (the same symbol the
    problem Hamiltonian uses for its own coupling parameter; the two roles
    coincide in this closed form, while :func:`generic_first_order` keeps
    them independent).
    """
    if a <= 0:
        raise ValueError("a must be positive")
    base = 2.0 * a * (1.0 + h_z)
    root = np.sqrt(base * base + 1.0)
    k_plus = base + root
    k_minus = base - root
    p1_plus = 1.0 / (k_plus * k_plus + 1.0)
    p1_minus = 1.0 / (k_minus * k_minus + 1.0)
    return BranchPopulations(p1_plus, 1.0 - p1_plus, p1_minus, 1.0 - p1_minus)
