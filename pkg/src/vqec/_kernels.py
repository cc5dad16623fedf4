"""Low-level in-place statevector kernels.

numba-jitted when numba is installed (the `fast` extra), with equivalent
pure-numpy fallbacks otherwise.  All kernels mutate flat complex128 buffers;
`pre`/`post` describe the (pre, 2, post) view that places the target qubit
on the middle axis, so a leading batch axis can be folded into `pre`.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without the extra
    HAVE_NUMBA = False


def _ry_numpy(amps: np.ndarray, pre: int, post: int, c: float, s: float) -> None:
    a = amps.reshape(pre, 2, post)
    a0 = a[:, 0, :].copy()
    a1 = a[:, 1, :].copy()
    a[:, 0, :] = c * a0 - s * a1
    a[:, 1, :] = s * a0 + c * a1


def _block_numpy(amps: np.ndarray, n: int, cs: np.ndarray, ss: np.ndarray) -> None:
    for q in range(n):
        _ry_numpy(amps, 1 << q, 1 << (n - q - 1), cs[q], ss[q])


if HAVE_NUMBA:

    @njit(cache=True)
    def ry_inplace(amps, pre, post, c, s):  # pragma: no cover - jitted
        for i in range(pre):
            base = i * 2 * post
            for j in range(base, base + post):
                a0 = amps[j]
                a1 = amps[j + post]
                amps[j] = c * a0 - s * a1
                amps[j + post] = s * a0 + c * a1

    @njit(cache=True)
    def block_inplace(amps, n, cs, ss):  # pragma: no cover - jitted
        for q in range(n):
            pre = 1 << q
            post = 1 << (n - q - 1)
            c = cs[q]
            s = ss[q]
            for i in range(pre):
                base = i * 2 * post
                for j in range(base, base + post):
                    a0 = amps[j]
                    a1 = amps[j + post]
                    amps[j] = c * a0 - s * a1
                    amps[j + post] = s * a0 + c * a1

else:
    ry_inplace = _ry_numpy
    block_inplace = _block_numpy
