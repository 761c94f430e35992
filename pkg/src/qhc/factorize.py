"""Product-form detection for classical and quantum observables.

A classical observable F(s(j,k)) = phi(j) chi(k) is a rank-1 n x m value
matrix; a quantum observable F = F_1 (x) F_2 is a rank-1 matrix after
pairing (j, j') rows against (k, k') columns. Both cases go through the same
alternating rank-1 fit.

Gauge: every factor but the last has unit Euclidean norm and its first
nonzero entry positive (real part, or imaginary part when the real part
vanishes); overall scale and sign sit on the last factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from qhc.classical import ClassicalObservable, as_observable
from qhc.errors import DimensionError, UnsupportedPartitionError
from qhc.indexmap import IndexMap
from qhc.quantum import QuantumObservable, _require_row_major, as_quantum_observable, hermiticity_defect

DEFAULT_TOL = 1e-10
ALT_TOL = 1e-14
ALT_MAXITER = 500
GAUGE = "unit-norm-first-positive"


@dataclass
class FactorizationResult:
    success: bool
    factors: list[np.ndarray]
    residual: float
    gauge: str = GAUGE
    degenerate: bool = False
    reason: str = ""
    stage_residuals: list[float] = field(default_factory=list)

    def reconstruct(self) -> np.ndarray:
        """Outer (classical) or Kronecker (quantum) product of the factors."""
        if not self.factors:
            raise ValueError("no factors to reconstruct from")
        if self.factors[0].ndim == 2:
            out = self.factors[0]
            for f in self.factors[1:]:
                out = np.kron(out, f)
            return out
        out = self.factors[0]
        for f in self.factors[1:]:
            out = np.multiply.outer(out, f)
        return out.ravel()

    def to_json(self) -> dict[str, Any]:
        def enc(f: np.ndarray):
            if np.iscomplexobj(f):
                return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(f)]
            return f.tolist()

        out = {"success": self.success, "residual": float(self.residual),
               "factors": [enc(f) for f in self.factors], "gauge": self.gauge}
        if self.degenerate:
            out["degenerate"] = True
        if self.reason:
            out["reason"] = self.reason
        return out


def _first_significant(x: np.ndarray) -> complex:
    flat = x.ravel()
    big = np.max(np.abs(flat), initial=0.0)
    for z in flat:
        if abs(z) > 1e-12 * big:
            return z
    return 0.0


def _gauge_sign(x: np.ndarray) -> float:
    z = complex(_first_significant(x))
    big = max(abs(z), 1e-300)
    if abs(z.real) > 1e-12 * big:
        return 1.0 if z.real > 0 else -1.0
    return 1.0 if z.imag >= 0 else -1.0


def rank1_fit(mat: np.ndarray, tol: float = ALT_TOL, maxiter: int = ALT_MAXITER) -> tuple[np.ndarray, np.ndarray, int]:
    """Alternating least-squares fit ``mat ~ outer(u, v)`` (no conjugation).

    Starts from the column holding the entry of largest magnitude and stops
    when the relative change of ``v`` falls below ``tol``. ``u`` is returned
    with unit norm.
    """
    r, c = np.unravel_index(np.argmax(np.abs(mat)), mat.shape)
    u = mat[:, c].copy()
    u = u / np.linalg.norm(u)
    v = mat.T @ u.conj()
    it = 0
    for it in range(1, maxiter + 1):
        u_new = mat @ v.conj()
        nu = np.linalg.norm(u_new)
        if nu == 0:
            break
        u_new = u_new / nu
        v_new = mat.T @ u_new.conj()
        delta = np.linalg.norm(v_new - v) / max(np.linalg.norm(v_new), 1e-300)
        u, v = u_new, v_new
        if delta <= tol:
            break
    return u, v, it


def _split(mat: np.ndarray, scale: float, tol: float) -> tuple[np.ndarray, np.ndarray, float, bool]:
    u, v, _ = rank1_fit(mat)
    sign = _gauge_sign(u)
    u, v = u * sign, v * sign
    residual = float(np.max(np.abs(mat - np.outer(u, v))))
    return u, v, residual, residual <= tol * scale


def _zero_result(shapes: list[tuple[int, ...]], dtype) -> FactorizationResult:
    return FactorizationResult(success=True, factors=[np.zeros(s, dtype=dtype) for s in shapes],
                               residual=0.0, degenerate=True, reason="zero observable")


def factor_classical(obs, index_map: IndexMap, tol: float = DEFAULT_TOL) -> FactorizationResult:
    """Write F(s(j,k)) = phi(j) chi(k) when the value matrix has rank one.

    ``tol`` is relative to ``max |F|``; the reported residual is the
    max-abs reconstruction error.
    """
    if index_map.parts != 2:
        raise UnsupportedPartitionError(f"bipartite map required, got {index_map.parts} factors")
    return factor_classical_multi(obs, index_map, tol)


def factor_classical_multi(obs, index_map: IndexMap, tol: float = DEFAULT_TOL) -> FactorizationResult:
    """Peel factors left to right: subsystem 1 against the rest, then recurse."""
    obs = as_observable(obs)
    if index_map.parts < 2:
        raise UnsupportedPartitionError(f"at least two subsystems required, got {index_map.parts}")
    if index_map.total != obs.dim:
        raise DimensionError(f"map covers N={index_map.total}, observable has N={obs.dim}")
    values = index_map.to_tensor(obs.values)
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return _zero_result([(n,) for n in index_map.factors], float)

    factors: list[np.ndarray] = []
    stages: list[float] = []
    rest = values
    ok = True
    for n in index_map.factors[:-1]:
        u, v, res, good = _split(rest.reshape(n, -1), scale, tol)
        stages.append(res)
        ok = ok and good
        factors.append(u)
        rest = v.reshape(rest.shape[1:])
    factors.append(rest.ravel())
    result = FactorizationResult(success=False, factors=factors, residual=0.0, stage_residuals=stages)
    result.residual = float(np.max(np.abs(result.reconstruct() - values.ravel())))
    result.success = ok and result.residual <= tol * scale
    if not result.success:
        result.reason = "not product-form under this map"
    return result


def kronecker_unfolding(matrix: np.ndarray, n: int, m: int) -> np.ndarray:
    """Rearrange an nm x nm matrix so A (x) B becomes outer(vec A, vec B)."""
    return matrix.reshape(n, m, n, m).transpose(0, 2, 1, 3).reshape(n * n, m * m)


def _hermitian_phase(a: np.ndarray) -> complex:
    """Phase w with w * a Hermitian, assuming a is a complex multiple of a Hermitian matrix."""
    i, j = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    ratio = np.conj(a[j, i]) / a[i, j]  # = exp(-2i arg c) for a = c * H
    return complex(np.sqrt(ratio))


def factor_quantum(obs, index_map: IndexMap, tol: float = DEFAULT_TOL) -> FactorizationResult:
    """Write F = F_1 (x) F_2 with Hermitian factors when possible.

    Requires a row-major bipartite map. A Kronecker-exact input whose
    factors cannot be made Hermitian by a common phase reports
    ``success=False`` with reason ``"non-Hermitian factor gauge"``.
    """
    f = as_quantum_observable(obs).entries
    if index_map.parts != 2:
        raise UnsupportedPartitionError(f"bipartite map required, got {index_map.parts} factors")
    _require_row_major(index_map)
    n, m = index_map.factors
    if f.shape[0] != n * m:
        raise DimensionError(f"map covers N={n * m}, observable has N={f.shape[0]}")
    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        return _zero_result([(n, n), (m, m)], complex)

    u, v, _ = rank1_fit(kronecker_unfolding(f, n, m))
    a = u.reshape(n, n)
    b = v.reshape(m, m)
    w = _hermitian_phase(a)
    a, b = a * w, b / w
    sign = _gauge_sign(a)
    a, b = a * sign, b * sign
    residual = float(np.max(np.abs(np.kron(a, b) - f)))
    result = FactorizationResult(success=residual <= tol * scale, factors=[a, b], residual=residual,
                                 stage_residuals=[residual])
    if not result.success:
        result.reason = "not product-form under this map"
        return result
    herm_tol = tol * max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    if hermiticity_defect(a) > herm_tol or hermiticity_defect(b) > herm_tol:
        result.success = False
        result.reason = "non-Hermitian factor gauge"
        return result
    result.factors = [0.5 * (a + a.conj().T), 0.5 * (b + b.conj().T)]
    return result


def factor_observables(result: FactorizationResult) -> list:
    """Wrap successful factors as observable objects of the matching kind."""
    if result.factors[0].ndim == 2:
        return [QuantumObservable(f) for f in result.factors]
    return [ClassicalObservable(f) for f in result.factors]
