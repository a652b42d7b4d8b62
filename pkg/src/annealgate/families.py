"""Ising Hamiltonian families with engineered ground-space degeneracy.

Squared magnetisation sums are expanded symbolically into {identity, ZZ}
terms at construction, so everything stays a PauliSum and spectra keep the
additive constants of the defining expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import operators
from .operators import PauliSum, PauliString
from .state import StateVector, basis_state


@dataclass(frozen=True)
class PartitionSpec:
    """Disjoint site domains covering 1..N plus a sign per site."""

    domains: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]

    def __init__(self, domains, signs):
        domains = tuple(tuple(sorted(int(i) for i in d)) for d in domains)
        signs = tuple(int(s) for s in signs)
        n = len(signs)
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        seen: set[int] = set()
        for d in domains:
            if seen & set(d):
                raise ValueError("domains must be pairwise disjoint")
            seen.update(d)
        if seen != set(range(1, n + 1)):
            raise ValueError(f"domains must cover sites 1..{n}")
        object.__setattr__(self, "domains", domains)
        object.__setattr__(self, "signs", signs)

    @property
    def site_count(self) -> int:
        return len(self.signs)

    def sign(self, site: int) -> int:
        return self.signs[site - 1]


def _squared_domain_terms(domain, signs, n) -> list[PauliString]:
    # -(sum_{i in A} alpha_i z_i)^2 = -|A| * 1l - 2 sum_{i<j} alpha_i alpha_j z_i z_j
    terms = [PauliString("I" * n, -float(len(domain)))]
    for i, j in combinations(domain, 2):
        factors = "".join("Z" if q in (i, j) else "I" for q in range(1, n + 1))
        terms.append(PauliString(factors, -2.0 * signs[i - 1] * signs[j - 1]))
    return terms


def _field_terms(domain, signs, n, prefactor) -> list[PauliString]:
    terms = []
    for i in domain:
        factors = "".join("Z" if q == i else "I" for q in range(1, n + 1))
        terms.append(PauliString(factors, prefactor * signs[i - 1]))
    return terms


def two_state_entangled(alphas) -> PauliSum:
    """H = -(sum_i alpha_i z_i)^2: two degenerate ground states, the
    sign-pattern state and its global flip."""
    signs = tuple(int(a) for a in alphas)
    n = len(signs)
    if n < 2:
        raise ValueError("need at least two sites")
    if any(s not in (-1, 1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    return PauliSum(_squared_domain_terms(tuple(range(1, n + 1)), signs, n)).simplified()


def two_state_product(spec: PartitionSpec) -> PauliSum:
    """H = -(sum_{i in A} alpha_i z_i)^2 + sum_{i in B} alpha_i z_i:
    two degenerate product ground states differing on domain A."""
    if len(spec.domains) != 2:
        raise ValueError("need exactly two domains (A, B)")
    a_dom, b_dom = spec.domains
    if not a_dom:
        raise ValueError("domain A is empty: the ground state would not be degenerate")
    n = spec.site_count
    terms = _squared_domain_terms(a_dom, spec.signs, n)
    terms += _field_terms(b_dom, spec.signs, n, +1.0)
    return PauliSum(terms).simplified()


def combined_family(spec: PartitionSpec) -> PauliSum:
    """H = -sum_j (sum_{i in A_j} alpha_i z_i)^2 - sum_{i in A_{K+1}} alpha_i z_i
    with K squared domains: 2^K-fold degenerate product ground space."""
    if len(spec.domains) < 2:
        raise ValueError("need at least one squared domain plus the field domain")
    *squared, field_dom = spec.domains
    if any(not d for d in squared):
        raise ValueError("squared domains must be non-empty")
    n = spec.site_count
    terms = []
    for dom in squared:
        terms += _squared_domain_terms(dom, spec.signs, n)
    terms += _field_terms(field_dom, spec.signs, n, -1.0)
    return PauliSum(terms).simplified()


def _state_from_bits(bits: dict[int, int], n: int) -> StateVector:
    index = 0
    for site in range(1, n + 1):
        index = (index << 1) | bits[site]
    return basis_state(index, n)


def expected_two_state_entangled(alphas) -> tuple[StateVector, StateVector]:
    signs = tuple(int(a) for a in alphas)
    n = len(signs)
    aligned = {i: (0 if signs[i - 1] == 1 else 1) for i in range(1, n + 1)}
    flipped = {i: 1 - b for i, b in aligned.items()}
    return _state_from_bits(aligned, n), _state_from_bits(flipped, n)


def expected_two_state_product(spec: PartitionSpec) -> tuple[StateVector, StateVector]:
    a_dom, b_dom = spec.domains
    n = spec.site_count
    base = {i: (1 if spec.sign(i) == 1 else 0) for i in b_dom}  # field +: anti-align
    s1 = dict(base)
    s2 = dict(base)
    for i in a_dom:
        s1[i] = 0 if spec.sign(i) == 1 else 1
        s2[i] = 1 - s1[i]
    return _state_from_bits(s1, n), _state_from_bits(s2, n)


def expected_combined(spec: PartitionSpec) -> tuple[StateVector, ...]:
    *squared, field_dom = spec.domains
    n = spec.site_count
    base = {i: (0 if spec.sign(i) == 1 else 1) for i in field_dom}  # field -: align
    states = []
    for flips in product((0, 1), repeat=len(squared)):
        bits = dict(base)
        for dom, flip in zip(squared, flips):
            for i in dom:
                aligned = 0 if spec.sign(i) == 1 else 1
                bits[i] = aligned ^ flip
        states.append(_state_from_bits(bits, n))
    return tuple(states)


@dataclass(frozen=True)
class GroundSpaceReport:
    ok: bool
    projector_distance: float
    expected_dim: int
    exact_dim: int
    reason: str = ""


def verify_ground_space(h: PauliSum, expected, tol: float = 1e-10) -> GroundSpaceReport:
    """Check that span(expected) equals the exact ground eigenspace.

    Compares the orthogonal projectors in Frobenius norm; a dimension
    mismatch is reported rather than raised.
    """
    exact = operators.ground_space(h, max(tol, operators.DEGENERACY_TOL))
    expected = tuple(expected)
    if len(exact) != len(expected):
        return GroundSpaceReport(False, float("nan"), len(expected), len(exact),
                                 "ground-space dimensions differ")
    p_exact = sum(np.outer(v.amplitudes, v.amplitudes.conj()) for v in exact)
    basis = np.stack([v.amplitudes for v in expected], axis=1)
    # orthonormalise the expected span before projecting
    q, _ = np.linalg.qr(basis)
    p_expected = q @ q.conj().T
    distance = float(np.linalg.norm(p_exact - p_expected))
    return GroundSpaceReport(distance <= tol, distance, len(expected), len(exact))
