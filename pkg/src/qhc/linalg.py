"""Cyclic Jacobi eigendecomposition for small dense Hermitian matrices."""

from __future__ import annotations

import numpy as np

from qhc.errors import ConsistencyError, DimensionError

JACOBI_TOL = 1e-12
MAX_SWEEPS = 60


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(matrix, tol: float = JACOBI_TOL, vectors: bool = True):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then applies the real Jacobi rotation that zeroes it.
    Sweeps run over all pairs ``p < q`` until the off-diagonal Frobenius
    norm drops below ``tol * max(1, ||A||_F)``.

    Returns ``(w, v)`` with ``A = v @ diag(w) @ v.conj().T``; ``v`` is
    ``None`` when ``vectors=False``.
    """
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex) if vectors else None
    thresh = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(MAX_SWEEPS):
        if _off_norm(a) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag <= 1e-300:
                    continue
                phase = g / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # theta**2 would overflow
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                if v is not None:
                    v[:, idx] = v[:, idx] @ u
    else:
        if _off_norm(a) > thresh:
            raise ConsistencyError("Jacobi iteration did not converge")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if v is not None:
        v = v[:, order]
    return w, v


def jacobi_eigvalsh(matrix, tol: float = JACOBI_TOL) -> np.ndarray:
    return jacobi_eigh(matrix, tol=tol, vectors=False)[0]
