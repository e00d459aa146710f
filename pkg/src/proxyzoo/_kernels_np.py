"""NumPy fallback for the rotation-manifold hot kernels.

The compiled extension (``proxyzoo._rotation_kernels``) implements the same
two entry points; ``proxyzoo._kernels`` picks whichever is available at
import time.  Both exploit that a skew-symmetric ``S`` is normal: ``i*S`` is
Hermitian, so one ``eigh`` gives ``exp(S)`` and, via divided differences of
``exp`` on the spectrum, every partial derivative of ``exp(S)`` with respect
to the strictly-lower-triangular entries of ``S``.
"""

from __future__ import annotations

import numpy as np

_PAIRS: dict[int, tuple[np.ndarray, np.ndarray]] = {}

# Eigenvalue gaps below this use the midpoint value of exp instead of the
# divided difference (second-order accurate, avoids 0/0).
_GAP_TOL = 1e-9


def lower_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the strictly-lower triangle in row-major order."""
    if n not in _PAIRS:
        rows, cols = np.tril_indices(n, k=-1)
        _PAIRS[n] = (rows.astype(np.intp), cols.astype(np.intp))
    return _PAIRS[n]


def n_params(n: int) -> int:
    return n * (n - 1) // 2


def skew_matrix(theta: np.ndarray, n: int) -> np.ndarray:
    """Assemble S from its strictly-lower entries (row-major)."""
    rows, cols = lower_pairs(n)
    S = np.zeros((n, n))
    S[rows, cols] = theta
    S[cols, rows] = -theta
    return S


def _spectral(S: np.ndarray):
    # eigh of the Hermitian matrix i*S; S = V diag(-i w) V^H
    w, V = np.linalg.eigh(1j * S)
    return w, V


def rotation_from_params(theta: np.ndarray, n: int) -> np.ndarray:
    """exp(S(theta)) without derivatives."""
    w, V = _spectral(skew_matrix(theta, n))
    phase = np.exp(-1j * w)
    return np.ascontiguousarray(((V * phase) @ V.conj().T).real)


def rotation_and_dexp(theta: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """exp(S(theta)) and all partials dexp/dtheta_k, shape (m, n, n)."""
    rows, cols = lower_pairs(n)
    w, V = _spectral(skew_matrix(theta, n))
    phase = np.exp(-1j * w)
    O = ((V * phase) @ V.conj().T).real

    dw = w[:, None] - w[None, :]
    close = np.abs(dw) < _GAP_TOL
    denom = np.where(close, 1.0, -1j * dw)
    Phi = np.where(
        close,
        0.5 * (phase[:, None] + phase[None, :]),
        (phase[:, None] - phase[None, :]) / denom,
    )

    # V^H E_k V for the skew basis E_k = e_r e_c' - e_c e_r', batched over k.
    Vr = V[rows, :]
    Vc = V[cols, :]
    G = Vr.conj()[:, :, None] * Vc[:, None, :] - Vc.conj()[:, :, None] * Vr[:, None, :]
    W = V @ (Phi[None, :, :] * G) @ V.conj().T
    return np.ascontiguousarray(O), np.ascontiguousarray(W.real)
