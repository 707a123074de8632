"""Pure-Python cyclic Jacobi kernel, used when the compiled one is unavailable."""
import math

import numpy as np


def jacobi_sweeps(h, tol, max_sweeps):
    """Diagonalize a copy of Hermitian ``h`` by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of ``a[p, q]`` and then applies the
    real symmetric Jacobi rotation, so the pivot is annihilated exactly.

    Returns ``(diag, vectors, sweeps, converged)``; the columns of
    ``vectors`` are the (unsorted) eigenvectors.
    """
    a = np.array(h, dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = float(np.sqrt(np.sum(np.abs(a) ** 2))) or 1.0
    upper = np.triu_indices(n, 1)

    sweep = 0
    converged = False
    while True:
        off = math.sqrt(2.0 * float(np.sum(np.abs(a[upper]) ** 2)))
        if off <= tol * scale:
            converged = True
            break
        if sweep >= max_sweeps:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absa = abs(apq)
                if absa == 0.0:
                    continue
                e = apq / absa
                ec = e.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * absa)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * ec * colq
                a[:, q] = s * colp + c * ec * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * e * rowq
                a[q, :] = s * rowp + c * e * rowq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = s * vp + c * ec * vq

                a[p, p] = app - t * absa
                a[q, q] = aqq + t * absa
                a[p, q] = 0.0
                a[q, p] = 0.0

    return np.real(np.diag(a)).copy(), v, sweep, converged
