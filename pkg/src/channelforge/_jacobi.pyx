# Compiled cyclic Jacobi sweep for complex Hermitian matrices.
# Mirrors channelforge._jacobi_py.jacobi_sweeps operation for operation.
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline double cmod(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline void _rot_conj(double complex* xp, double complex* xq,
                           double c, double s, double er, double ei) noexcept nogil:
    cdef double pr = xp[0].real, pi = xp[0].imag
    cdef double qr = xq[0].real, qi = xq[0].imag
    # w = conj(e) * x_q with e = er + i ei
    cdef double wr = er * qr + ei * qi
    cdef double wi = er * qi - ei * qr
    xp[0] = (c * pr - s * wr) + 1j * (c * pi - s * wi)
    xq[0] = (s * pr + c * wr) + 1j * (s * pi + c * wi)


def jacobi_sweeps(h, double tol, int max_sweeps):
    """Diagonalize ``h`` in place of a copy; return (diag, vectors, sweeps, converged)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.array(h, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = arr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] varr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = arr
    cdef double complex[:, ::1] v = varr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, scale, absa, theta, t, c, s, app, aqq, er, ei
    cdef bint converged = False

    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    scale = sqrt(scale)
    if scale == 0.0:
        scale = 1.0

    with nogil:
        while True:
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
            off = sqrt(2.0 * off)
            if off <= tol * scale:
                converged = True
                break
            if sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    absa = cmod(a[p, q])
                    if absa == 0.0:
                        continue
                    er = a[p, q].real / absa
                    ei = a[p, q].imag / absa
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * absa)
                    if theta >= 0.0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    # columns: x_p <- c x_p - s conj(e) x_q ; x_q <- s x_p + c conj(e) x_q
                    for k in range(n):
                        _rot_conj(&a[k, p], &a[k, q], c, s, er, ei)
                        _rot_conj(&v[k, p], &v[k, q], c, s, er, ei)
                    # rows: same with e in place of conj(e)
                    for k in range(n):
                        _rot_conj(&a[p, k], &a[q, k], c, s, er, -ei)
                    a[p, p] = app - t * absa
                    a[q, q] = aqq + t * absa
                    a[p, q] = 0.0
                    a[q, p] = 0.0

    diag = np.array([arr[k, k].real for k in range(n)], dtype=np.float64)
    return diag, varr, sweep, bool(converged)
