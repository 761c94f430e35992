"""Classical states on one random variable read as joint distributions.

A probability vector ``p_s`` together with an :class:`~qhc.indexmap.IndexMap`
becomes a table ``p_{jk...}`` of several artificial random variables, so the
usual bipartite and tripartite machinery (marginals, mutual information,
subadditivity) applies to a single variable. Entropies are in nats.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from qhc.errors import DimensionError, IndexRangeError, UnsupportedPartitionError, ValidationError
from qhc.indexmap import IndexMap

NEG_CLAMP = 1e-12
NORM_TOL = 1e-9
INEQ_TOL = 1e-10


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityState:
    """Nonnegative vector summing to one.

    Entries in ``[-1e-12, 0)`` are clamped to zero; anything more negative,
    or a sum off by more than 1e-9, raises :class:`ValidationError`.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValidationError("length", 0, "a state needs at least one entry")
        if not np.all(np.isfinite(p)):
            raise ValidationError("finite", float("nan"), "state has non-finite entries")
        low = p.min()
        if low < -NEG_CLAMP:
            raise ValidationError("nonnegativity", -low)
        p[p < 0] = 0.0
        total = p.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise ValidationError("normalization", abs(total - 1.0))
        object.__setattr__(self, "probs", _readonly(p))

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "ProbabilityState":
        """Normalize nonnegative numbers A_s into p_s = A_s / sum A."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise ValidationError("nonnegativity", -w.min())
        return cls(w / w.sum())

    @property
    def dim(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True, eq=False)
class ClassicalObservable:
    """Real function F(s) on 1..N."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValidationError("finite", float("nan"), "observable has non-finite entries")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dim(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MarginalSet:
    """One marginal per artificial subsystem, in the map's subsystem order."""

    marginals: tuple[ProbabilityState, ...]

    def __getitem__(self, p: int) -> ProbabilityState:
        """1-based subsystem access."""
        if not 1 <= p <= len(self.marginals):
            raise IndexRangeError(f"subsystem {p} outside 1..{len(self.marginals)}")
        return self.marginals[p - 1]

    def __len__(self) -> int:
        return len(self.marginals)

    def as_lists(self) -> list[list[float]]:
        return [m.probs.tolist() for m in self.marginals]


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    holds: bool
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)


def as_state(state) -> ProbabilityState:
    return state if isinstance(state, ProbabilityState) else ProbabilityState(state)


def as_observable(obs) -> ClassicalObservable:
    return obs if isinstance(obs, ClassicalObservable) else ClassicalObservable(obs)


def _check_map(state: ProbabilityState, index_map: IndexMap) -> None:
    if index_map.total != state.dim:
        raise DimensionError(f"map covers N={index_map.total}, state has N={state.dim}")


def mean(state, obs) -> float:
    """Sum_s p_s F(s)."""
    state, obs = as_state(state), as_observable(obs)
    if state.dim != obs.dim:
        raise DimensionError(f"state length {state.dim} != observable length {obs.dim}")
    return float(np.dot(state.probs, obs.values))


def moment(state, obs, k: int) -> float:
    """Sum_s p_s F(s)**k. ``k = 0`` returns 1 (empty product)."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    state, obs = as_state(state), as_observable(obs)
    if state.dim != obs.dim:
        raise DimensionError(f"state length {state.dim} != observable length {obs.dim}")
    if k == 0:
        return 1.0
    return float(np.dot(state.probs, obs.values**k))


def variance(state, obs) -> float:
    return moment(state, obs, 2) - mean(state, obs) ** 2


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def shannon_entropy(state) -> float:
    """-sum p ln p with 0 ln 0 = 0."""
    return _entropy(as_state(state).probs)


class JointView:
    """Multi-index addressing of a state's probabilities.

    ``view[j, k]`` reads ``p_{s(j,k)}`` from the state's own array (1-based).
    """

    def __init__(self, state: ProbabilityState, index_map: IndexMap):
        _check_map(state, index_map)
        self.state = state
        self.map = index_map

    @property
    def probs(self) -> np.ndarray:
        return self.state.probs

    def __getitem__(self, idx) -> float:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return float(self.state.probs[self.map.encode(idx) - 1])

    def tensor(self) -> np.ndarray:
        """Array of shape ``factors`` with ``t[j-1, k-1, ...] = p_{jk...}``."""
        return self.map.to_tensor(self.state.probs)

    def total(self) -> float:
        return float(self.tensor().sum())


def joint_view(state, index_map: IndexMap) -> JointView:
    return JointView(as_state(state), index_map)


def marginal(state, index_map: IndexMap, keep: Iterable[int]) -> np.ndarray:
    """Joint marginal over the kept subsystems (1-based, returned in ascending order).

    The result is an array of shape ``(n_a, n_b, ...)`` for the kept factors.
    """
    state = as_state(state)
    _check_map(state, index_map)
    keep = sorted(set(int(p) for p in keep))
    for p in keep:
        if not 1 <= p <= index_map.parts:
            raise IndexRangeError(f"subsystem {p} outside 1..{index_map.parts}")
    drop = tuple(ax for ax in range(index_map.parts) if ax + 1 not in keep)
    return index_map.to_tensor(state.probs).sum(axis=drop)


def marginals(state, index_map: IndexMap) -> MarginalSet:
    state = as_state(state)
    if index_map.parts < 2:
        raise UnsupportedPartitionError("marginals need at least two subsystems")
    return MarginalSet(tuple(ProbabilityState(marginal(state, index_map, [p])) for p in range(1, index_map.parts + 1)))


def _require_parts(index_map: IndexMap, parts: int, what: str) -> None:
    if index_map.parts != parts:
        raise UnsupportedPartitionError(f"{what} needs a {parts}-partite map, got {index_map.parts} factors")


def mutual_information(state, index_map: IndexMap) -> float:
    """H(marginal 1) + H(marginal 2) - H(joint)."""
    state = as_state(state)
    _require_parts(index_map, 2, "mutual information")
    _check_map(state, index_map)
    t = index_map.to_tensor(state.probs)
    return _entropy(t.sum(axis=1)) + _entropy(t.sum(axis=0)) - _entropy(state.probs)


def is_product(state, index_map: IndexMap, tol: float = NORM_TOL) -> bool:
    """True when the joint table equals the outer product of its marginals."""
    state = as_state(state)
    _check_map(state, index_map)
    t = index_map.to_tensor(state.probs)
    prod = np.ones(())
    for ax in range(index_map.parts):
        m = t.sum(axis=tuple(a for a in range(index_map.parts) if a != ax))
        prod = np.multiply.outer(prod, m)
    return bool(np.max(np.abs(t - prod)) <= tol)


def check_subadditivity(state, index_map: IndexMap, tol: float = INEQ_TOL) -> InequalityReport:
    state = as_state(state)
    _require_parts(index_map, 2, "subadditivity")
    _check_map(state, index_map)
    t = index_map.to_tensor(state.probs)
    lhs = _entropy(state.probs)
    rhs = _entropy(t.sum(axis=1)) + _entropy(t.sum(axis=0))
    return InequalityReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol, slack=rhs - lhs)


def check_strong_subadditivity(state, index_map: IndexMap, tol: float = INEQ_TOL) -> InequalityReport:
    """H(123) + H(2) <= H(12) + H(23)."""
    state = as_state(state)
    _require_parts(index_map, 3, "strong subadditivity")
    _check_map(state, index_map)
    t = index_map.to_tensor(state.probs)
    h123 = _entropy(state.probs)
    h12 = _entropy(t.sum(axis=2).ravel())
    h23 = _entropy(t.sum(axis=0).ravel())
    h2 = _entropy(t.sum(axis=(0, 2)))
    lhs, rhs = h123 + h2, h12 + h23
    return InequalityReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol, slack=rhs - lhs)


def _factor_values(index_map: IndexMap, factors: Sequence) -> list[np.ndarray]:
    if len(factors) != index_map.parts:
        raise DimensionError(f"need {index_map.parts} factors, got {len(factors)}")
    out = []
    for p, (f, n) in enumerate(zip(factors, index_map.factors), start=1):
        v = as_observable(f).values
        if v.size != n:
            raise DimensionError(f"factor {p} has length {v.size}, subsystem has dimension {n}")
        out.append(v)
    return out


def mean_as_correlation(state, index_map: IndexMap, factors: Sequence) -> float:
    """Correlation <phi(j) chi(k) ...> over the joint view of ``state``.

    Evaluated as the full multi-index sum of the product of factor values
    weighted by p_{jk...}; equals ``mean(state, F)`` whenever
    F(s(j,k,...)) = phi(j) chi(k) ...
    """
    state = as_state(state)
    _check_map(state, index_map)
    vals = _factor_values(index_map, factors)
    t = index_map.to_tensor(state.probs)
    for v in reversed(vals):
        t = t @ v
    return float(t)


def lift_factor(index_map: IndexMap, subsystem: int, factor) -> ClassicalObservable:
    """Observable on 1..N that reads ``factor`` at the given subsystem's coordinate."""
    if not 1 <= subsystem <= index_map.parts:
        raise IndexRangeError(f"subsystem {subsystem} outside 1..{index_map.parts}")
    v = as_observable(factor).values
    n = index_map.factors[subsystem - 1]
    if v.size != n:
        raise DimensionError(f"factor has length {v.size}, subsystem {subsystem} has dimension {n}")
    return ClassicalObservable(v[index_map.coordinates[:, subsystem - 1]])


def compose_factors(index_map: IndexMap, factors: Sequence) -> ClassicalObservable:
    """F(s) = prod_p factor_p(idx_p(s)), the pointwise product of the lifts."""
    vals = _factor_values(index_map, factors)
    out = np.ones(index_map.total)
    for p, v in enumerate(vals):
        out = out * v[index_map.coordinates[:, p]]
    return ClassicalObservable(out)
