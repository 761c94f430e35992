"""Density matrices and observables of one qudit viewed as several qudits.

The N x N matrix rho_{ss'} is relabeled as rho_{jk..., j'k'...} through an
:class:`~qhc.indexmap.IndexMap`. Reductions, von Neumann entropies and the
entropic inequalities work under any map convention. Operations that rely
on Kronecker structure (``kron``, lifts, factorization) assume the
row-major convention and reject others with
:class:`~qhc.errors.ConventionMismatchError`.
"""

from __future__ import annotations

import string
from dataclasses import asdict, dataclass, field
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from qhc.errors import (
    ConsistencyError,
    ConventionMismatchError,
    DimensionError,
    IndexRangeError,
    UnsupportedPartitionError,
    ValidationError,
)
from qhc.indexmap import IndexMap
from qhc.linalg import jacobi_eigvalsh

HERM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-10
EIG_ZERO = 1e-12
IMAG_TOL = 1e-10
INEQ_TOL = 1e-10


def _square(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("finite", float("nan"), "matrix has non-finite entries")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def density_violations(entries) -> list[tuple[str, float]]:
    """All violated density-matrix conditions as ``(name, magnitude)`` pairs.

    Names are ``"hermiticity"``, ``"trace"`` and ``"positivity"``. An empty
    list means the matrix is a valid state.
    """
    m = _square(entries)
    out = []
    herm = hermiticity_defect(m)
    if herm > HERM_TOL:
        out.append(("hermiticity", herm))
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        out.append(("trace", float(abs(tr - 1.0))))
    low = float(jacobi_eigvalsh(0.5 * (m + m.conj().T))[0]) if m.size else 0.0
    if low < -PSD_TOL:
        out.append(("positivity", -low))
    return out


@dataclass(frozen=True, eq=False)
class QuantumObservable:
    """Hermitian matrix F_{ss'}."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = _square(self.entries)
        herm = hermiticity_defect(m)
        if herm > HERM_TOL:
            raise ValidationError("hermiticity", herm)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_diagonal(self) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.max(np.abs(off), initial=0.0) <= 1e-12)

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "QuantumObservable":
        return cls(np.diag(np.asarray(values, dtype=complex)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Construction validates all three conditions and keeps the spectrum,
    with eigenvalues in ``[-1e-10, 0)`` clamped to zero.
    """

    entries: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        m = _square(self.entries)
        herm = hermiticity_defect(m)
        if herm > HERM_TOL:
            raise ValidationError("hermiticity", herm)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError("trace", abs(tr - 1.0))
        w = jacobi_eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise ValidationError("positivity", -w[0])
        w = np.where(w < 0, 0.0, w)
        m.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "eigenvalues", w)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def spin(self) -> float:
        return (self.dim - 1) / 2

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(n) / n)

    @classmethod
    def pure(cls, psi: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def diagonal(cls, probs: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=complex)))


def validate_density(entries) -> DensityMatrix:
    """Build a :class:`DensityMatrix`, raising :class:`ValidationError` on failure.

    The error's ``condition`` is the first violated invariant.
    """
    if isinstance(entries, DensityMatrix):
        return entries
    return DensityMatrix(entries)


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def as_quantum_observable(obs) -> QuantumObservable:
    return obs if isinstance(obs, QuantumObservable) else QuantumObservable(obs)


def expectation(rho, obs) -> float:
    """Tr(F rho) = sum_{s,s'} F_{ss'} rho_{s's}."""
    rho, obs = as_density(rho), as_quantum_observable(obs)
    if rho.dim != obs.dim:
        raise DimensionError(f"state dimension {rho.dim} != observable dimension {obs.dim}")
    val = np.sum(obs.entries * rho.entries.T)
    if abs(val.imag) > IMAG_TOL:
        raise ConsistencyError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


class RelabeledMatrix:
    """Read-only multi-index addressing of an N x N matrix.

    ``view[(j, k), (j2, k2)]`` is ``M[s(j, k), s(j2, k2)]`` (1-based) read
    from the original storage.
    """

    def __init__(self, matrix, index_map: IndexMap):
        m = matrix.entries if isinstance(matrix, (DensityMatrix, QuantumObservable)) else np.asarray(matrix)
        if m.shape != (index_map.total, index_map.total):
            raise DimensionError(f"map covers N={index_map.total}, matrix has shape {m.shape}")
        self._m = m
        self.map = index_map

    def __getitem__(self, key):
        row, col = key
        row = row if isinstance(row, tuple) else (row,)
        col = col if isinstance(col, tuple) else (col,)
        return self._m[self.map.encode(row) - 1, self.map.encode(col) - 1]

    def flatten(self) -> np.ndarray:
        """The underlying N x N matrix, unchanged."""
        return self._m

    def tensor(self) -> np.ndarray:
        """Array of shape ``factors + factors``: ``t[j-1, k-1, j2-1, k2-1]``."""
        f = self.map.factors
        if self.map.is_row_major:
            return self._m.reshape(f + f)
        order = self.map.rowmajor_order
        return self._m[np.ix_(order, order)].reshape(f + f)


def relabel(matrix, index_map: IndexMap) -> RelabeledMatrix:
    return RelabeledMatrix(matrix, index_map)


def _reduce(rho_tensor: np.ndarray, parts: int, keep: Sequence[int]) -> np.ndarray:
    letters = string.ascii_letters
    rows = list(letters[:parts])
    cols = list(letters[parts:2 * parts])
    for ax in range(parts):
        if ax + 1 not in keep:
            cols[ax] = rows[ax]
    out = "".join(rows[p - 1] for p in keep) + "".join(cols[p - 1] for p in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho_tensor)
    d = int(np.prod([rho_tensor.shape[p - 1] for p in keep]))
    return red.reshape(d, d)


def _normalize_keep(index_map: IndexMap, keep: Iterable[int]) -> list[int]:
    keep = sorted(set(int(p) for p in keep))
    if index_map.parts < 2:
        raise UnsupportedPartitionError("partial trace needs at least two subsystems")
    if not keep or len(keep) == index_map.parts:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    for p in keep:
        if not 1 <= p <= index_map.parts:
            raise IndexRangeError(f"subsystem {p} outside 1..{index_map.parts}")
    return keep


def partial_trace(rho, index_map: IndexMap, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the kept subsystems (1-based, taken in ascending order).

    For a bipartite map with ``keep={1}`` this is
    ``(rho_1)_{jj'} = sum_k rho_{jk, j'k}``.
    """
    rho = as_density(rho)
    keep = _normalize_keep(index_map, keep)
    t = relabel(rho, index_map).tensor()
    return DensityMatrix(_reduce(t, index_map.parts, keep))


def von_neumann_entropy(rho) -> float:
    """-sum lambda ln lambda over the spectrum; eigenvalues below 1e-12 count as zero."""
    w = as_density(rho).eigenvalues
    w = w[w >= EIG_ZERO]
    return float(-np.sum(w * np.log(w))) + 0.0


@dataclass(frozen=True)
class QuantumSubadditivityReport:
    S12: float
    S1: float
    S2: float
    holds: bool
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuantumSSAReport:
    S123: float
    S12: float
    S23: float
    S2: float
    lhs: float
    rhs: float
    holds: bool
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)


def _require_parts(index_map: IndexMap, parts: int, what: str) -> None:
    if index_map.parts != parts:
        raise UnsupportedPartitionError(f"{what} needs a {parts}-partite map, got {index_map.parts} factors")


def _check_dim(rho: DensityMatrix, index_map: IndexMap) -> None:
    if rho.dim != index_map.total:
        raise DimensionError(f"map covers N={index_map.total}, state has N={rho.dim}")


def check_quantum_subadditivity(rho, index_map: IndexMap, tol: float = INEQ_TOL) -> QuantumSubadditivityReport:
    rho = as_density(rho)
    _require_parts(index_map, 2, "subadditivity")
    _check_dim(rho, index_map)
    s12 = von_neumann_entropy(rho)
    s1 = von_neumann_entropy(partial_trace(rho, index_map, [1]))
    s2 = von_neumann_entropy(partial_trace(rho, index_map, [2]))
    slack = s1 + s2 - s12
    return QuantumSubadditivityReport(S12=s12, S1=s1, S2=s2, holds=slack >= -tol, slack=slack)


def check_quantum_ssa(rho, index_map: IndexMap, tol: float = INEQ_TOL) -> QuantumSSAReport:
    """S(123) + S(2) <= S(12) + S(23)."""
    rho = as_density(rho)
    _require_parts(index_map, 3, "strong subadditivity")
    _check_dim(rho, index_map)
    s123 = von_neumann_entropy(rho)
    s12 = von_neumann_entropy(partial_trace(rho, index_map, [1, 2]))
    s23 = von_neumann_entropy(partial_trace(rho, index_map, [2, 3]))
    s2 = von_neumann_entropy(partial_trace(rho, index_map, [2]))
    lhs, rhs = s123 + s2, s12 + s23
    return QuantumSSAReport(S123=s123, S12=s12, S23=s23, S2=s2, lhs=lhs, rhs=rhs,
                            holds=lhs <= rhs + tol, slack=rhs - lhs)


def kron(factors: Sequence) -> QuantumObservable:
    """Kronecker product in row-major index order (last factor varies fastest)."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    mats = [as_quantum_observable(f).entries for f in factors]
    return QuantumObservable(reduce(np.kron, mats))


def _require_row_major(index_map: IndexMap) -> None:
    if not index_map.is_row_major:
        raise ConventionMismatchError(
            f"Kronecker structure is tied to row-major order, map uses {index_map.convention.value}"
        )


def lift_observable(index_map: IndexMap, subsystem: int, obs) -> QuantumObservable:
    """1 x ... x F_p x ... x 1 with identities on every other subsystem."""
    _require_row_major(index_map)
    if not 1 <= subsystem <= index_map.parts:
        raise IndexRangeError(f"subsystem {subsystem} outside 1..{index_map.parts}")
    f = as_quantum_observable(obs)
    n = index_map.factors[subsystem - 1]
    if f.dim != n:
        raise DimensionError(f"observable has dimension {f.dim}, subsystem {subsystem} has {n}")
    mats = [np.eye(d) for d in index_map.factors]
    mats[subsystem - 1] = f.entries
    return QuantumObservable(reduce(np.kron, mats))


def commutator_norm(a, b) -> float:
    a = a.entries if isinstance(a, QuantumObservable) else np.asarray(a)
    b = b.entries if isinstance(b, QuantumObservable) else np.asarray(b)
    return float(np.max(np.abs(a @ b - b @ a)))


def lift_commutators(index_map: IndexMap, factors: Sequence) -> dict[tuple[int, int], float]:
    """Max-abs commutator for every pair of lifted factors, keyed by 1-based subsystems."""
    lifts = [lift_observable(index_map, p, f) for p, f in enumerate(factors, start=1)]
    return {(a + 1, b + 1): commutator_norm(lifts[a], lifts[b]) for a, b in combinations(range(len(lifts)), 2)}


def mean_as_quantum_correlation(rho, index_map: IndexMap, factors: Sequence) -> float:
    """Tr(F~_1 F~_2 ... F~_l rho) from the product of the lifted factors."""
    rho = as_density(rho)
    _check_dim(rho, index_map)
    if len(factors) != index_map.parts:
        raise DimensionError(f"need {index_map.parts} factors, got {len(factors)}")
    prod = np.eye(index_map.total, dtype=complex)
    for p, f in enumerate(factors, start=1):
        prod = prod @ lift_observable(index_map, p, f).entries
    val = np.trace(prod @ rho.entries)
    if abs(val.imag) > IMAG_TOL:
        raise ConsistencyError(f"correlation has imaginary part {val.imag:.3e}")
    return float(val.real)
