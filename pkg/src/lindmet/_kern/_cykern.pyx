# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel.

Implements the matrix exponential (Pade-13 approximant with scaling and
squaring) and the piecewise-constant schedule propagation loop for small dense
complex matrices. These two routines dominate the runtime of the control
search, where they are called hundreds of thousands of times.

All buffers are handled with column-major (BLAS) semantics internally. Feeding
C-contiguous arrays is nevertheless correct: the buffer of a C-ordered matrix
is the column-major buffer of its transpose, every product below is formed
consistently in that transposed world, and expm(A^T) = expm(A)^T, so reading
the result buffer back in C order recovers the desired matrix.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, log2
from scipy.linalg.cython_blas cimport zgemm, zgemv
from scipy.linalg.cython_lapack cimport zgesv

cnp.import_array()

cdef double _THETA13 = 5.371920351148152

cdef double[14] _PADE13_B = [
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0]


cdef void _zmm(double complex* a, double complex* b, double complex* c, int m) noexcept nogil:
    cdef double complex one = 1.0, zero = 0.0
    zgemm("N", "N", &m, &m, &m, &one, a, &m, b, &m, &zero, c, &m)


cdef int _expm_inplace(double complex* A, double complex* out, int m,
                       double complex* w, int* ipiv) noexcept nogil:
    """out = expm(A); destroys A. w must hold >= 7*m*m scratch entries."""
    cdef int mm = m * m
    cdef int i, j, k, s, info
    cdef double nrm = 0.0, colsum
    cdef double complex z
    cdef double complex* A2 = w
    cdef double complex* A4 = w + mm
    cdef double complex* A6 = w + 2 * mm
    cdef double complex* W1 = w + 3 * mm
    cdef double complex* W2 = w + 4 * mm
    cdef double complex* U = w + 5 * mm
    cdef double complex* V = w + 6 * mm

    for j in range(m):
        colsum = 0.0
        for i in range(m):
            z = A[j * m + i]
            colsum += abs(z.real) + abs(z.imag)
        if colsum > nrm:
            nrm = colsum
    s = 0
    if nrm > _THETA13:
        s = <int>ceil(log2(nrm / _THETA13))
    if s > 0:
        z = 1.0 / (2.0 ** s)
        for i in range(mm):
            A[i] = A[i] * z

    _zmm(A, A, A2, m)
    _zmm(A2, A2, A4, m)
    _zmm(A2, A4, A6, m)

    for i in range(mm):
        W1[i] = _PADE13_B[13] * A6[i] + _PADE13_B[11] * A4[i] + _PADE13_B[9] * A2[i]
    _zmm(A6, W1, W2, m)
    for i in range(mm):
        W2[i] = W2[i] + _PADE13_B[7] * A6[i] + _PADE13_B[5] * A4[i] + _PADE13_B[3] * A2[i]
    for i in range(m):
        W2[i * m + i] = W2[i * m + i] + _PADE13_B[1]
    _zmm(A, W2, U, m)

    for i in range(mm):
        W1[i] = _PADE13_B[12] * A6[i] + _PADE13_B[10] * A4[i] + _PADE13_B[8] * A2[i]
    _zmm(A6, W1, V, m)
    for i in range(mm):
        V[i] = V[i] + _PADE13_B[6] * A6[i] + _PADE13_B[4] * A4[i] + _PADE13_B[2] * A2[i]
    for i in range(m):
        V[i * m + i] = V[i * m + i] + _PADE13_B[0]

    # solve (V - U) X = (V + U)
    for i in range(mm):
        W1[i] = V[i] - U[i]
        out[i] = V[i] + U[i]
    info = 0
    zgesv(&m, &m, W1, &m, ipiv, out, &m, &info)
    if info != 0:
        return info

    for k in range(s):
        _zmm(out, out, W2, m)
        for i in range(mm):
            out[i] = W2[i]
    return 0


def expm(a):
    """Matrix exponential of a square complex matrix."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] acopy = np.array(
        a, dtype=np.complex128, order="C", copy=True)
    cdef int m = acopy.shape[0]
    if acopy.shape[1] != m:
        raise ValueError("expm requires a square matrix")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m, m), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] work = np.empty(7 * m * m, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ipiv = np.empty(m, dtype=np.int32)
    cdef int info = _expm_inplace(<double complex*>acopy.data, <double complex*>out.data,
                                  m, <double complex*>work.data, <int*>ipiv.data)
    if info != 0:
        raise ArithmeticError(f"Pade denominator solve failed (zgesv info={info})")
    return out


def propagate_schedule(L0, ctrls, amps, double dt, v0, bint trajectory=False):
    """Apply exp((L0 + sum_l amps[k,l]*ctrls[l]) * dt) to v0 for k = 0..K-1.

    L0: (m, m) complex generator common to all slices; ctrls: (L, m, m) complex
    per-field generators; amps: (K, L) real amplitudes; v0: (m,) complex.
    Returns the final vector, or the full (K+1, m) trajectory when requested.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] L0c = np.ascontiguousarray(L0, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] Cc = np.ascontiguousarray(ctrls, dtype=np.complex128)
    cdef cnp.ndarray[cnp.double_t, ndim=2] Uc = np.ascontiguousarray(amps, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] v = np.array(v0, dtype=np.complex128, copy=True)
    cdef int m = L0c.shape[0]
    cdef int K = Uc.shape[0]
    cdef int nl = Uc.shape[1]
    cdef int mm = m * m
    cdef int i, k, l, info
    cdef int inc = 1
    cdef double complex one = 1.0, zero = 0.0
    cdef double u
    if L0c.shape[1] != m:
        raise ValueError("L0 must be square")
    if Cc.shape[0] != nl:
        raise ValueError("amps field count does not match control generators")
    if nl > 0 and (Cc.shape[1] != m or Cc.shape[2] != m):
        raise ValueError("control generators must match L0 shape")
    if v.shape[0] != m:
        raise ValueError("state vector length does not match generator")

    cdef cnp.ndarray[cnp.complex128_t, ndim=2] A = np.empty((m, m), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] P = np.empty((m, m), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] work = np.empty(7 * mm, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ipiv = np.empty(m, dtype=np.int32)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vnext = np.empty(m, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] traj = np.empty(
        (K + 1 if trajectory else 1, m), dtype=np.complex128)
    if trajectory:
        traj[0, :] = v

    cdef double complex* Ap = <double complex*>A.data
    cdef double complex* Pp = <double complex*>P.data
    cdef double complex* L0p = <double complex*>L0c.data
    cdef double complex* Cp = <double complex*>Cc.data
    cdef double complex* vp = <double complex*>v.data
    cdef double complex* vn = <double complex*>vnext.data

    for k in range(K):
        for i in range(mm):
            Ap[i] = L0p[i]
        for l in range(nl):
            u = Uc[k, l]
            if u != 0.0:
                for i in range(mm):
                    Ap[i] = Ap[i] + u * Cp[l * mm + i]
        for i in range(mm):
            Ap[i] = Ap[i] * dt
        info = _expm_inplace(Ap, Pp, m, <double complex*>work.data, <int*>ipiv.data)
        if info != 0:
            raise ArithmeticError(f"Pade denominator solve failed at slice {k}")
        zgemv("T", &m, &m, &one, Pp, &m, vp, &inc, &zero, vn, &inc)
        for i in range(m):
            vp[i] = vn[i]
        if trajectory:
            traj[k + 1, :] = v
    if trajectory:
        return traj
    return v
