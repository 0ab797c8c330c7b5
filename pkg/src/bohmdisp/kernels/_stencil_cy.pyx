# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled centered-difference primitives.

Mirror of ``stencil_numpy``: same ``(pre, n, post)`` layout, same margin
convention, and - deliberately - the same per-element sequence of
floating-point operations, so results on the valid interior are bitwise
identical to the pure-NumPy backend.
"""

BACKEND_NAME = "cython"

ctypedef fused numeric:
    double
    double complex


def diff1_pnq(numeric[:, :, ::1] a, numeric[:, :, ::1] out, double h, int order):
    """First derivative along the middle axis of a ``(pre, n, post)`` view."""
    cdef Py_ssize_t np_ = a.shape[0], n = a.shape[1], nq = a.shape[2]
    cdef Py_ssize_t p, i, q
    cdef double c
    if order == 2:
        c = 0.5 / h
        with nogil:
            for p in range(np_):
                for i in range(1, n - 1):
                    for q in range(nq):
                        out[p, i, q] = (a[p, i + 1, q] - a[p, i - 1, q]) * c
    elif order == 4:
        c = 1.0 / (12.0 * h)
        with nogil:
            for p in range(np_):
                for i in range(2, n - 2):
                    for q in range(nq):
                        out[p, i, q] = (
                            -a[p, i + 2, q] + 8.0 * a[p, i + 1, q]
                            - 8.0 * a[p, i - 1, q] + a[p, i - 2, q]
                        ) * c
    else:
        raise ValueError(f"unsupported stencil order {order}")


def diff2_pnq(numeric[:, :, ::1] a, numeric[:, :, ::1] out, double h, int order):
    """Second derivative along the middle axis of a ``(pre, n, post)`` view."""
    cdef Py_ssize_t np_ = a.shape[0], n = a.shape[1], nq = a.shape[2]
    cdef Py_ssize_t p, i, q
    cdef double c
    if order == 2:
        c = 1.0 / (h * h)
        with nogil:
            for p in range(np_):
                for i in range(1, n - 1):
                    for q in range(nq):
                        out[p, i, q] = (
                            a[p, i + 1, q] - 2.0 * a[p, i, q] + a[p, i - 1, q]
                        ) * c
    elif order == 4:
        c = 1.0 / (12.0 * (h * h))
        with nogil:
            for p in range(np_):
                for i in range(2, n - 2):
                    for q in range(nq):
                        out[p, i, q] = (
                            -a[p, i + 2, q] + 16.0 * a[p, i + 1, q]
                            - 30.0 * a[p, i, q]
                            + 16.0 * a[p, i - 1, q] - a[p, i - 2, q]
                        ) * c
    else:
        raise ValueError(f"unsupported stencil order {order}")


def box3_o2(numeric[:, :, ::1] a, numeric[:, :, ::1] out,
            double c0, double c1, double c2, double w0):
    """Fused order-2 wave operator on a rank-3 array (interior only).

    Same contraction as ``stencil_numpy.box3_o2`` on the full interior;
    edge bands are left at zero here (the NumPy backend leaves partial sums
    there instead) and are excluded by the caller's mask either way.
    """
    cdef Py_ssize_t n0 = a.shape[0], n1 = a.shape[1], n2 = a.shape[2]
    cdef Py_ssize_t i, j, k
    cdef numeric acc
    with nogil:
        for i in range(1, n0 - 1):
            for j in range(1, n1 - 1):
                for k in range(1, n2 - 1):
                    acc = ((a[i + 1, j, k] - 2.0 * a[i, j, k]
                            + a[i - 1, j, k]) * c0) * w0
                    acc = acc + (a[i, j + 1, k] - 2.0 * a[i, j, k]
                                 + a[i, j - 1, k]) * c1
                    acc = acc + (a[i, j, k + 1] - 2.0 * a[i, j, k]
                                 + a[i, j, k - 1]) * c2
                    out[i, j, k] = acc
