"""Pure-NumPy centered-difference primitives.

All primitives operate on a contiguous ``(pre, n, post)`` view of the data,
where ``n`` is the length of the differentiated axis, and fill a same-shaped
output whose boundary margin (``order // 2`` planes on each side of the axis)
is left at zero.  The arithmetic is written so that each output element is
produced by exactly the same sequence of floating-point operations as the
compiled backend, which makes the two backends bitwise interchangeable on the
valid interior.
"""

import numpy as np

BACKEND_NAME = "numpy"


def diff1_pnq(a, out, h, order):
    """First derivative along the middle axis of a ``(pre, n, post)`` view."""
    n = a.shape[1]
    if order == 2:
        c = 0.5 / h
        out[:, 1:n - 1, :] = (a[:, 2:, :] - a[:, :n - 2, :]) * c
    elif order == 4:
        c = 1.0 / (12.0 * h)
        out[:, 2:n - 2, :] = (
            -a[:, 4:, :] + 8.0 * a[:, 3:n - 1, :]
            - 8.0 * a[:, 1:n - 3, :] + a[:, :n - 4, :]
        ) * c
    else:  # pragma: no cover - guarded by the dispatching wrapper
        raise ValueError(f"unsupported stencil order {order}")


def diff2_pnq(a, out, h, order):
    """Second derivative along the middle axis of a ``(pre, n, post)`` view."""
    n = a.shape[1]
    if order == 2:
        c = 1.0 / (h * h)
        out[:, 1:n - 1, :] = (
            a[:, 2:, :] - 2.0 * a[:, 1:n - 1, :] + a[:, :n - 2, :]
        ) * c
    elif order == 4:
        c = 1.0 / (12.0 * (h * h))
        out[:, 2:n - 2, :] = (
            -a[:, 4:, :] + 16.0 * a[:, 3:n - 1, :] - 30.0 * a[:, 2:n - 2, :]
            + 16.0 * a[:, 1:n - 3, :] - a[:, :n - 4, :]
        ) * c
    else:  # pragma: no cover
        raise ValueError(f"unsupported stencil order {order}")


def box3_o2(a, out, c0, c1, c2, w0):
    """Fused order-2 wave operator on a rank-3 array.

    Computes ``w0 * d2_axis0 + d2_axis1 + d2_axis2`` with per-axis inverse
    squared spacings ``c0, c1, c2`` and axis-0 weight ``w0`` (``-1/c**2``
    when axis 0 is time).  Only the full interior (margin 1 on every axis)
    carries the complete sum; edge bands hold backend-dependent partial
    sums, which the dispatching wrapper zeroes before returning.
    """
    d = np.zeros_like(a)
    d[1:-1, :, :] = (a[2:, :, :] - 2.0 * a[1:-1, :, :] + a[:-2, :, :]) * c0
    out[...] = d * w0
    d = np.zeros_like(a)
    d[:, 1:-1, :] = (a[:, 2:, :] - 2.0 * a[:, 1:-1, :] + a[:, :-2, :]) * c1
    out += d
    d = np.zeros_like(a)
    d[:, :, 1:-1] = (a[:, :, 2:] - 2.0 * a[:, :, 1:-1] + a[:, :, :-2]) * c2
    out += d
