"""Time-dependent Hamiltonians as operator blocks with control waveforms.

A schedule is a list of (PauliSum, waveform) blocks over [0, T]; the
instantaneous Hamiltonian is the waveform-weighted sum of the blocks.
Waveforms are piecewise-linear knot lists, or products of two such factors
(needed for the device form, where an overall envelope multiplies a tunable
longitudinal-field profile).  Schedules are immutable and sampling is pure,
so they are safe to share across concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .operators import PauliSum, build_matrix, uniform_x, z_on, zz_on


class ScheduleBoundaryError(ValueError):
    """Raised when a device schedule violates its endpoint constraints."""


@dataclass(frozen=True)
class PiecewiseLinear:
    """Clamped piecewise-linear waveform through strictly increasing knots."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __init__(self, times: Sequence[float], values: Sequence[float]):
        times = tuple(float(t) for t in times)
        values = tuple(float(v) for v in values)
        if len(times) != len(values) or not times:
            raise ValueError("need matching, non-empty knot lists")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        if not all(np.isfinite(times)) or not all(np.isfinite(values)):
            raise ValueError("non-finite knot")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def value(self, t: float) -> float:
        ts, vs = self.times, self.values
        if t <= ts[0]:
            return vs[0]
        for k in range(1, len(ts)):
            if t <= ts[k]:
                frac = (t - ts[k - 1]) / (ts[k] - ts[k - 1])
                return vs[k - 1] + frac * (vs[k] - vs[k - 1])
        return vs[-1]

    def knots(self) -> tuple[float, ...]:
        return self.times

    def factors(self) -> tuple["PiecewiseLinear", "PiecewiseLinear"]:
        return (self, constant(1.0))


def constant(value: float) -> PiecewiseLinear:
    return PiecewiseLinear((0.0,), (value,))


def load_waveform(path) -> PiecewiseLinear:
    """Knot table from a plain-text CSV file: two columns ``position,value``
    (position is s for envelope tables, t for profile tables).  Lines
    starting with '#' and a non-numeric header line are skipped."""
    times, values = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if len(cells) != 2:
                raise ValueError(f"expected two columns in {path}: {line!r}")
            try:
                t, v = float(cells[0]), float(cells[1])
            except ValueError:
                if not times:  # header line
                    continue
                raise
            times.append(t)
            values.append(v)
    return PiecewiseLinear(times, values)


@dataclass(frozen=True)
class ProductWaveform:
    """Pointwise product of two piecewise-linear factors."""

    first: PiecewiseLinear
    second: PiecewiseLinear

    def value(self, t: float) -> float:
        return self.first.value(t) * self.second.value(t)

    def knots(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.first.times) | set(self.second.times)))

    def factors(self) -> tuple[PiecewiseLinear, PiecewiseLinear]:
        return (self.first, self.second)


Waveform = PiecewiseLinear | ProductWaveform


@dataclass(frozen=True)
class ControlSchedule:
    """H(t) = sum_i waveform_i(t) * block_i on t in [0, total_time]."""

    blocks: tuple[tuple[PauliSum, Waveform], ...]
    total_time: float

    def __init__(self, blocks, total_time: float):
        blocks = tuple((op, wf) for op, wf in blocks)
        if not blocks:
            raise ValueError("a schedule needs at least one block")
        n = blocks[0][0].qubit_count
        if any(op.qubit_count != n for op, _ in blocks):
            raise ValueError("mismatched register sizes")
        if not (np.isfinite(total_time) and total_time > 0):
            raise ValueError("total_time must be positive")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "total_time", float(total_time))

    @property
    def qubit_count(self) -> int:
        return self.blocks[0][0].qubit_count

    def sample(self, t: float) -> PauliSum:
        """Exact affine combination of the blocks at time t."""
        if not 0.0 <= t <= self.total_time:
            raise ValueError(f"t={t} outside [0, {self.total_time}]")
        out = None
        for op, wf in self.blocks:
            scaled = op.scaled(wf.value(t))
            out = scaled if out is None else PauliSum(out.terms + scaled.terms)
        return out.simplified()

    def sample_matrix(self, t: float) -> np.ndarray:
        return build_matrix(self.sample(t))

    def knot_times(self) -> tuple[float, ...]:
        """Interior waveform knots plus both endpoints, sorted."""
        pts = {0.0, self.total_time}
        for _, wf in self.blocks:
            pts.update(k for k in wf.knots() if 0.0 < k < self.total_time)
        return tuple(sorted(pts))

    @cached_property
    def _dense_blocks(self) -> np.ndarray:
        return np.stack([build_matrix(op) for op, _ in self.blocks])

    def kernel_arrays(self):
        """Dense blocks plus padded waveform-factor knot arrays for the integrator."""
        mats = self._dense_blocks
        f1, f2 = [], []
        for _, wf in self.blocks:
            a, b = wf.factors()
            f1.append(a)
            f2.append(b)
        def pad(factors):
            kmax = max(len(f.times) for f in factors)
            ts = np.zeros((len(factors), kmax))
            vs = np.zeros((len(factors), kmax))
            ks = np.zeros(len(factors), dtype=np.int64)
            for i, f in enumerate(factors):
                k = len(f.times)
                ts[i, :k] = f.times
                vs[i, :k] = f.values
                ks[i] = k
            return ts, vs, ks
        t1, v1, k1 = pad(f1)
        t2, v2, k2 = pad(f2)
        return mats, t1, v1, k1, t2, v2, k2


def conventional(h_drive: PauliSum, h_problem: PauliSum, total_time: float) -> ControlSchedule:
    """Linear anneal from the drive Hamiltonian into the problem Hamiltonian."""
    T = float(total_time)
    return ControlSchedule(
        [
            (h_drive, PiecewiseLinear((0.0, T), (1.0, 0.0))),
            (h_problem, PiecewiseLinear((0.0, T), (0.0, 1.0))),
        ],
        T,
    )


def forward(h_drive: PauliSum, h_problem: PauliSum, h_catalytic: PauliSum,
            h_z: float, total_time: float) -> ControlSchedule:
    """Anneal into the problem Hamiltonian with a triangular longitudinal pulse.

    The catalytic block ramps as (t/T)*h_z up to the midpoint and back down as
    (1-t/T)*h_z, so the endpoints are the plain drive and problem operators for
    every pulse amplitude h_z.
    """
    T = float(total_time)
    return ControlSchedule(
        [
            (h_drive, PiecewiseLinear((0.0, T), (1.0, 0.0))),
            (h_problem, PiecewiseLinear((0.0, T), (0.0, 1.0))),
            (h_catalytic, PiecewiseLinear((0.0, T / 2.0, T), (0.0, h_z / 2.0, 0.0))),
        ],
        T,
    )


def reverse(h_drive: PauliSum, h_problem_lifted: PauliSum, total_time: float) -> ControlSchedule:
    """Anneal from a degeneracy-lifted problem Hamiltonian back to the drive."""
    T = float(total_time)
    return ControlSchedule(
        [
            (h_drive, PiecewiseLinear((0.0, T), (0.0, 1.0))),
            (h_problem_lifted, PiecewiseLinear((0.0, T), (1.0, 0.0))),
        ],
        T,
    )


@dataclass(frozen=True)
class DWaveSchedule:
    """Device-style schedule: envelopes A, B over s in [0, 1], tunable
    longitudinal profile g over t, per-qubit fields h and couplings J.

    J maps 1-based pairs (i, j) with i > j to coupling strengths.
    """

    h: tuple[float, ...]
    J: Mapping[tuple[int, int], float]
    g: PiecewiseLinear
    A: PiecewiseLinear = field(default_factory=lambda: PiecewiseLinear((0.0, 1.0), (1.0, 0.0)))
    B: PiecewiseLinear = field(default_factory=lambda: PiecewiseLinear((0.0, 1.0), (0.0, 1.0)))

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(v) for v in self.h))
        object.__setattr__(self, "J", dict(self.J))
        n = len(self.h)
        if n == 0:
            raise ValueError("need at least one qubit")
        for (i, j), val in self.J.items():
            if not (1 <= j < i <= n):
                raise ValueError(f"coupling key {(i, j)} must satisfy n >= i > j >= 1")
            if not np.isfinite(val):
                raise ValueError("non-finite coupling")
        if not all(np.isfinite(self.h)):
            raise ValueError("non-finite field")

    @property
    def qubit_count(self) -> int:
        return len(self.h)


def dwave(spec: DWaveSchedule, total_time: float) -> ControlSchedule:
    """Schedule for H(t) = -A(s)/2 * sum_j x_j
    + B(s)/2 * (g(t) * sum_j h_j z_j + sum_{i>j} J_ij z_i z_j), with s = t/T.
    """
    T = float(total_time)
    if abs(spec.A.value(1.0)) > 0.0 or abs(spec.B.value(0.0)) > 0.0:
        raise ScheduleBoundaryError("device schedule requires A(1) = 0 and B(0) = 0")
    n = spec.qubit_count

    def in_t(wf: PiecewiseLinear) -> PiecewiseLinear:
        return PiecewiseLinear(tuple(s * T for s in wf.times), wf.values)

    blocks: list[tuple[PauliSum, Waveform]] = [
        (uniform_x(n, -0.5), in_t(spec.A)),
    ]
    if any(v != 0.0 for v in spec.h):
        longitudinal = None
        for q, hq in enumerate(spec.h, start=1):
            if hq == 0.0:
                continue
            term = z_on(q, n, 0.5 * hq)
            longitudinal = term if longitudinal is None else longitudinal + term
        blocks.append((longitudinal, ProductWaveform(in_t(spec.B), spec.g)))
    if spec.J:
        coupling = None
        for (i, j), val in sorted(spec.J.items()):
            term = zz_on(i, j, n, 0.5 * val)
            coupling = term if coupling is None else coupling + term
        blocks.append((coupling, in_t(spec.B)))
    return ControlSchedule(blocks, T)


def sample(sched: ControlSchedule, t: float) -> PauliSum:
    """Module-level alias for :meth:`ControlSchedule.sample`."""
    return sched.sample(t)
