# cython: language_level=3
"""Compiled integration kernels (RK4 moment flow, Euler-Maruyama ensembles).

Arrays are C-contiguous float64. Matrix products go through the BLAS that
scipy ships, so the per-step Python overhead disappears while large
covariance matrices still get an optimised ``dgemm``.
"""
import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


cdef inline void _mm(char ta, char tb, int M, int N, int K, double alpha,
                     const double* A, int lda, const double* B, int ldb, double beta,
                     double* C, int ldc) noexcept nogil:
    # row-major C(MxN) = alpha*op(A)(MxK) @ op(B)(KxN) + beta*C, as the
    # column-major product C^T = op(B)^T op(A)^T
    dgemm(&tb, &ta, &N, &M, &K, &alpha, <double*>B, &ldb, <double*>A, &lda, &beta, C, &ldc)


cdef void _cov_rhs(int n, int m, const double* A, const double* D, const double* Cc,
                   const double* G, const double* V, double* T, double* Kb, double* F) noexcept nogil:
    cdef int i, j, a
    _mm(b'N', b'N', n, n, n, 1.0, A, n, V, n, 0.0, T, n)
    for i in range(n):
        for j in range(n):
            F[i * n + j] = T[i * n + j] + T[j * n + i] + D[i * n + j]
    if m > 0:
        for i in range(n):
            for a in range(m):
                Kb[i * m + a] = G[a * n + i]
        _mm(b'N', b'T', n, m, n, 1.0, V, n, Cc, n, 1.0, Kb, m)
        _mm(b'N', b'T', n, n, m, -1.0, Kb, m, Kb, m, 1.0, F, n)


cdef void _mean_rhs(int n, const double* A, const double* b, const double* R, double* out) noexcept nogil:
    cdef int i, j
    cdef double acc
    for i in range(n):
        acc = b[i]
        for j in range(n):
            acc += A[i * n + j] * R[j]
        out[i] = acc


def rk4_moments(A, D, b, calC, Gamma, V0, R0, hs, ksteps):
    """Fixed-step RK4 for the covariance (Riccati/Lyapunov) and mean flows.

    Interval ``i`` is covered by ``ksteps[i]`` substeps of size ``hs[i]``.
    Returns the covariance and mean at the start and at the end of every
    interval, stacked along the first axis.
    """
    cdef const double[:, ::1] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] D_ = np.ascontiguousarray(D, dtype=np.float64)
    cdef const double[::1] b_ = np.ascontiguousarray(b, dtype=np.float64)
    cdef int n = A_.shape[0]
    cdef int m = calC.shape[0]
    cdef const double[:, ::1] Cc_ = np.ascontiguousarray(calC, dtype=np.float64).reshape(m, n) if m else np.zeros((1, n))
    cdef const double[:, ::1] G_ = np.ascontiguousarray(Gamma, dtype=np.float64).reshape(m, n) if m else np.zeros((1, n))
    cdef const double[::1] hs_ = np.ascontiguousarray(hs, dtype=np.float64)
    cdef const long long[::1] ks_ = np.ascontiguousarray(ksteps, dtype=np.int64)
    cdef Py_ssize_t n_int = hs_.shape[0]

    V_out_arr = np.empty((n_int + 1, n, n))
    R_out_arr = np.empty((n_int + 1, n))
    cdef double[:, :, ::1] V_out = V_out_arr
    cdef double[:, ::1] R_out = R_out_arr

    cdef double[::1] V = np.ascontiguousarray(V0, dtype=np.float64).ravel().copy()
    cdef double[::1] R = np.ascontiguousarray(R0, dtype=np.float64).ravel().copy()
    cdef double[::1] Vt = np.empty(n * n)
    cdef double[::1] T = np.empty(n * n)
    cdef double[::1] F = np.empty(n * n)
    cdef double[::1] acc = np.empty(n * n)
    cdef double[::1] Kb = np.empty(n * max(m, 1))
    cdef double[::1] Rt = np.empty(n)
    cdef double[::1] q = np.empty(n)
    cdef double[::1] racc = np.empty(n)

    cdef Py_ssize_t i, s, p, nn = n * n
    cdef int r, c
    cdef double h, sym

    with nogil:
        for p in range(nn):
            V_out[0, p // n, p % n] = V[p]
        for p in range(n):
            R_out[0, p] = R[p]
        for i in range(n_int):
            h = hs_[i]
            for s in range(ks_[i]):
                # covariance
                _cov_rhs(n, m, &A_[0, 0], &D_[0, 0], &Cc_[0, 0], &G_[0, 0], &V[0], &T[0], &Kb[0], &F[0])
                for p in range(nn):
                    acc[p] = F[p]
                    Vt[p] = V[p] + 0.5 * h * F[p]
                _cov_rhs(n, m, &A_[0, 0], &D_[0, 0], &Cc_[0, 0], &G_[0, 0], &Vt[0], &T[0], &Kb[0], &F[0])
                for p in range(nn):
                    acc[p] += 2.0 * F[p]
                    Vt[p] = V[p] + 0.5 * h * F[p]
                _cov_rhs(n, m, &A_[0, 0], &D_[0, 0], &Cc_[0, 0], &G_[0, 0], &Vt[0], &T[0], &Kb[0], &F[0])
                for p in range(nn):
                    acc[p] += 2.0 * F[p]
                    Vt[p] = V[p] + h * F[p]
                _cov_rhs(n, m, &A_[0, 0], &D_[0, 0], &Cc_[0, 0], &G_[0, 0], &Vt[0], &T[0], &Kb[0], &F[0])
                for p in range(nn):
                    V[p] += (h / 6.0) * (acc[p] + F[p])
                for r in range(n):
                    for c in range(r + 1, n):
                        sym = 0.5 * (V[r * n + c] + V[c * n + r])
                        V[r * n + c] = sym
                        V[c * n + r] = sym

                # mean
                _mean_rhs(n, &A_[0, 0], &b_[0], &R[0], &q[0])
                for p in range(n):
                    racc[p] = q[p]
                    Rt[p] = R[p] + 0.5 * h * q[p]
                _mean_rhs(n, &A_[0, 0], &b_[0], &Rt[0], &q[0])
                for p in range(n):
                    racc[p] += 2.0 * q[p]
                    Rt[p] = R[p] + 0.5 * h * q[p]
                _mean_rhs(n, &A_[0, 0], &b_[0], &Rt[0], &q[0])
                for p in range(n):
                    racc[p] += 2.0 * q[p]
                    Rt[p] = R[p] + h * q[p]
                _mean_rhs(n, &A_[0, 0], &b_[0], &Rt[0], &q[0])
                for p in range(n):
                    R[p] += (h / 6.0) * (racc[p] + q[p])
            for p in range(nn):
                V_out[i + 1, p // n, p % n] = V[p]
            for p in range(n):
                R_out[i + 1, p] = R[p]
    return V_out_arr, R_out_arr


def em_ensemble(A, b, K, dts, dw, R0, record):
    """Euler-Maruyama for ``dR = (A R + b) dt + K dw`` over many trajectories.

    ``K`` has shape ``(1, n, m)`` (constant gain) or ``(n_steps, n, m)``;
    ``dw`` holds the already-scaled Wiener increments, shape
    ``(n_traj, n_steps, m)``. The mean vector is stored after each step
    index listed in ``record`` (index 0 is the initial value).
    """
    cdef const double[:, ::1] A_ = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] b_ = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, :, ::1] K_ = np.ascontiguousarray(K, dtype=np.float64)
    cdef const double[::1] dts_ = np.ascontiguousarray(dts, dtype=np.float64)
    cdef const double[:, :, ::1] dw_ = np.ascontiguousarray(dw, dtype=np.float64)
    cdef const double[::1] R0_ = np.ascontiguousarray(R0, dtype=np.float64)
    cdef const long long[::1] rec = np.ascontiguousarray(record, dtype=np.int64)

    cdef Py_ssize_t n_traj = dw_.shape[0]
    cdef Py_ssize_t n_steps = dw_.shape[1]
    cdef Py_ssize_t m = dw_.shape[2]
    cdef Py_ssize_t n = A_.shape[0]
    cdef Py_ssize_t n_rec = rec.shape[0]
    cdef bint constant_gain = K_.shape[0] == 1

    out_arr = np.empty((n_traj, n_rec, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] R = np.empty(n)
    cdef double[::1] Rn = np.empty(n)

    cdef Py_ssize_t t, j, i, k, a, slot, kj
    cdef double acc, dt

    with nogil:
        for t in range(n_traj):
            for i in range(n):
                R[i] = R0_[i]
            slot = 0
            if slot < n_rec and rec[slot] == 0:
                for i in range(n):
                    out[t, slot, i] = R[i]
                slot += 1
            for j in range(n_steps):
                dt = dts_[j]
                kj = 0 if constant_gain else j
                for i in range(n):
                    acc = b_[i]
                    for k in range(n):
                        acc = acc + A_[i, k] * R[k]
                    acc = R[i] + acc * dt
                    for a in range(m):
                        acc = acc + K_[kj, i, a] * dw_[t, j, a]
                    Rn[i] = acc
                for i in range(n):
                    R[i] = Rn[i]
                while slot < n_rec and rec[slot] == j + 1:
                    for i in range(n):
                        out[t, slot, i] = R[i]
                    slot += 1
    return out_arr
