# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled rotation-manifold kernels.

Same contract as ``proxyzoo._kernels_np``: exp of a skew-symmetric matrix and
its partial derivatives via one Hermitian eigendecomposition (LAPACK zheev)
plus divided differences of exp on the spectrum.  Matrices here are tiny
(n <= ~10) but the kernels sit inside constrained-optimization inner loops,
so per-call overhead is what matters.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, fabs, sin
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

cdef double GAP_TOL = 1e-9


cdef int _eig_skew(double[::1] theta, Py_ssize_t n,
                   double complex[::1, :] V, double[::1] w,
                   double complex[::1] work, double[::1] rwork) except -1:
    """Fill V (eigenvectors of i*S, Fortran order) and w (eigenvalues)."""
    cdef Py_ssize_t i, j, k
    cdef int info = 0, nn = <int> n
    cdef int lwork = <int> work.shape[0]

    k = 0
    for i in range(n):
        V[i, i] = 0
        for j in range(i):
            # (i*S)[i, j] = 1j * theta_k ; Hermitian mirror above.
            V[i, j] = 1j * theta[k]
            V[j, i] = 1j * theta[k]
            k += 1
    zheev(b"V", b"L", &nn, &V[0, 0], &nn, &w[0], &work[0], &lwork,
          &rwork[0], &info)
    if info != 0:
        raise RuntimeError(f"zheev failed with info={info}")
    return 0


def rotation_from_params(double[::1] theta, Py_ssize_t n):
    """exp(S(theta)) without derivatives."""
    cdef cnp.ndarray[double complex, ndim=2, mode="fortran"] Vbuf = \
        np.empty((n, n), dtype=np.complex128, order="F")
    cdef cnp.ndarray[double, ndim=1] wbuf = np.empty(n)
    cdef cnp.ndarray[double complex, ndim=1] workbuf = np.empty(4 * n * n + 2 * n, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] rworkbuf = np.empty(3 * n)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Obuf = np.empty((n, n))

    cdef double complex[::1, :] V = Vbuf
    cdef double[::1] w = wbuf
    cdef double[:, ::1] O = Obuf
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    cdef double complex[8] ph_stack
    cdef cnp.ndarray[double complex, ndim=1] ph_heap
    cdef double complex * ph

    _eig_skew(theta, n, V, w, workbuf, rworkbuf)

    if n <= 8:
        ph = &ph_stack[0]
    else:
        ph_heap = np.empty(n, dtype=np.complex128)
        ph = <double complex *> ph_heap.data
    for k in range(n):
        ph[k] = cos(w[k]) - 1j * sin(w[k])

    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + V[i, k] * ph[k] * V[j, k].conjugate()
            O[i, j] = acc.real
    return Obuf


def rotation_and_dexp(double[::1] theta, Py_ssize_t n):
    """exp(S(theta)) and all partials dexp/dtheta_k, shape (m, n, n)."""
    cdef Py_ssize_t m = n * (n - 1) // 2
    cdef cnp.ndarray[double complex, ndim=2, mode="fortran"] Vbuf = \
        np.empty((n, n), dtype=np.complex128, order="F")
    cdef cnp.ndarray[double, ndim=1] wbuf = np.empty(n)
    cdef cnp.ndarray[double complex, ndim=1] workbuf = np.empty(4 * n * n + 2 * n, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] rworkbuf = np.empty(3 * n)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Obuf = np.empty((n, n))
    cdef cnp.ndarray[double, ndim=3, mode="c"] dObuf = np.empty((m, n, n))
    cdef cnp.ndarray[double complex, ndim=2, mode="c"] scratch = \
        np.empty((3 * n + 2, n), dtype=np.complex128)

    cdef double complex[::1, :] V = Vbuf
    cdef double[::1] w = wbuf
    cdef double[:, ::1] O = Obuf
    cdef double[:, :, ::1] dO = dObuf
    cdef double complex[:, ::1] sc = scratch

    cdef Py_ssize_t i, j, k, p, q, r, c
    cdef double dw
    cdef double complex acc, gpq

    _eig_skew(theta, n, V, w, workbuf, rworkbuf)

    # scratch rows: [0] phases, [1..n] Phi, [n+1..2n] X, [2n+1..3n] tmp
    cdef double complex * ph = &sc[0, 0]
    cdef double complex[:, ::1] Phi = sc[1:n + 1]
    cdef double complex[:, ::1] X = sc[n + 1:2 * n + 1]
    cdef double complex[:, ::1] tmp = sc[2 * n + 1:3 * n + 1]

    for k in range(n):
        ph[k] = cos(w[k]) - 1j * sin(w[k])
    for p in range(n):
        for q in range(n):
            dw = w[p] - w[q]
            if fabs(dw) < GAP_TOL:
                Phi[p, q] = 0.5 * (ph[p] + ph[q])
            else:
                Phi[p, q] = 1j * (ph[p] - ph[q]) / dw

    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + V[i, k] * ph[k] * V[j, k].conjugate()
            O[i, j] = acc.real

    k = 0
    for r in range(n):
        for c in range(r):
            # X = Phi * (V^H E_k V) with E_k = e_r e_c' - e_c e_r'
            for p in range(n):
                for q in range(n):
                    gpq = (V[r, p].conjugate() * V[c, q]
                           - V[c, p].conjugate() * V[r, q])
                    X[p, q] = Phi[p, q] * gpq
            for i in range(n):
                for q in range(n):
                    acc = 0
                    for p in range(n):
                        acc = acc + V[i, p] * X[p, q]
                    tmp[i, q] = acc
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for q in range(n):
                        acc = acc + tmp[i, q] * V[j, q].conjugate()
                    dO[k, i, j] = acc.real
            k += 1
    return Obuf, dObuf
