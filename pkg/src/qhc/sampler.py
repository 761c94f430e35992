"""Seeded Monte Carlo measurement and random instance generators.

All randomness comes from SplitMix64 used as a counter-based generator:

    base   = mix64(seed mod 2**64)
    x_i    = mix64(base + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)   for i = 0, 1, ...
    u_i    = (x_i >> 11) * 2**-53                                   in [0, 1)

with the standard finalizer

    mix64(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
              return z ^ (z >> 31)

(all arithmetic mod 2**64). Because x_i depends only on (seed, i), a
stream can be generated in one vectorized pass and reproduced in any
language.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass

import numpy as np

from qhc.classical import ProbabilityState, as_observable, as_state
from qhc.errors import DimensionError, UnsupportedObservableError
from qhc.quantum import DensityMatrix, as_density, as_quantum_observable

PRNG_NAME = "splitmix64"
GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
CHUNK = 1 << 20


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def default_seed() -> int:
    """Seed from the ``QHC_SEED`` environment variable, else 0."""
    return int(os.environ.get("QHC_SEED", "0"), 0)


def raw_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs x_offset .. x_{offset+count-1} as uint64."""
    with np.errstate(over="ignore"):
        base = _mix64(np.array([int(seed) & _MASK], dtype=np.uint64))[0]
        i = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
        return _mix64(base + i * GOLDEN_GAMMA)


def uniform_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    return (raw_stream(seed, count, offset) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class SampleReport:
    count: int
    empirical_mean: float
    empirical_moments: list[float]
    exact_mean: float
    standard_error_estimate: float
    seed: int
    algorithm: str = PRNG_NAME

    def to_dict(self) -> dict:
        return asdict(self)


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf = cdf / cdf[-1]
    cdf[-1] = 1.0
    return cdf


def draw_indices(probs, count: int, seed: int) -> np.ndarray:
    """Inverse-CDF draws of 0-based indices; index s is chosen when cdf[s-1] <= u < cdf[s]."""
    cdf = _cdf(np.asarray(probs, dtype=float))
    out = np.empty(count, dtype=np.intp)
    for start in range(0, count, CHUNK):
        stop = min(start + CHUNK, count)
        u = uniform_stream(seed, stop - start, offset=start)
        out[start:stop] = np.searchsorted(cdf, u, side="right")
    return out


def _report(probs: np.ndarray, values: np.ndarray, count: int, seed: int) -> SampleReport:
    if count < 1:
        raise ValueError("sample count L must be >= 1")
    if probs.size != values.size:
        raise DimensionError(f"state length {probs.size} != observable length {values.size}")
    # per-outcome tallies keep memory flat and make the sums order-independent
    tallies = np.bincount(draw_indices(probs, count, seed), minlength=probs.size)
    freq = tallies / count
    m1 = float(np.dot(freq, values))
    m2 = float(np.dot(freq, values**2))
    var = max(m2 - m1 * m1, 0.0)
    if count > 1:
        var *= count / (count - 1)
    return SampleReport(
        count=int(count),
        empirical_mean=m1,
        empirical_moments=[m1, m2],
        exact_mean=float(np.dot(probs, values)),
        standard_error_estimate=float(np.sqrt(var / count)),
        seed=int(seed),
    )


def sample_classical(state, obs, L: int, seed: int | None = None) -> SampleReport:
    """Measure F on L independent draws of s ~ p."""
    seed = default_seed() if seed is None else seed
    return _report(as_state(state).probs, as_observable(obs).values, L, seed)


def sample_diagonal_quantum(rho, obs, L: int, seed: int | None = None) -> SampleReport:
    """Computational-basis measurement: s is drawn with probability rho_ss.

    Only diagonal observables are supported.
    """
    rho = as_density(rho)
    obs = as_quantum_observable(obs)
    if not obs.is_diagonal:
        raise UnsupportedObservableError("only observables diagonal in the computational basis can be sampled")
    probs = ProbabilityState(np.diag(rho.entries).real).probs
    seed = default_seed() if seed is None else seed
    return _report(probs, np.diag(obs.entries).real.copy(), L, seed)


def random_simplex(N: int, seed: int) -> ProbabilityState:
    """Uniform (Dirichlet(1, ..., 1)) point from normalized exponential draws."""
    e = -np.log1p(-uniform_stream(seed, N))
    return ProbabilityState(e / e.sum())


def standard_normals(seed: int, count: int) -> np.ndarray:
    """Box-Muller normals; consumes 2 * ceil(count / 2) uniforms."""
    pairs = (count + 1) // 2
    u = uniform_stream(seed, 2 * pairs)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1).ravel()[:count]


def random_density(N: int, seed: int) -> DensityMatrix:
    """G G^dag / Tr(G G^dag) for a complex standard-Gaussian N x N matrix G."""
    z = standard_normals(seed, 2 * N * N)
    g = (z[0::2] + 1j * z[1::2]).reshape(N, N)
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


def random_hermitian(N: int, seed: int) -> np.ndarray:
    """(G + G^dag) / 2 with G complex standard Gaussian."""
    z = standard_normals(seed, 2 * N * N)
    g = (z[0::2] + 1j * z[1::2]).reshape(N, N)
    return 0.5 * (g + g.conj().T)
