"""Counter-based Philox4x32-10 generator compiled with numba.

Every draw is a pure function of ``(seed, path_index, step)``, so a path's
random stream does not depend on how paths are scheduled across workers.
"""

import numpy as np
from numba import njit

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)
_INV_2_32 = 1.0 / 4294967296.0


@njit(cache=True, inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten Philox rounds on a 4x32-bit counter with a 2x32-bit key.

    Inputs and outputs are uint64 values holding 32-bit words.
    """
    for i in range(10):
        if i > 0:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SHIFT
        lo0 = p0 & _MASK
        hi1 = p1 >> _SHIFT
        lo1 = p1 & _MASK
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


_ATTEMPT_SHIFT = np.uint64(24)


@njit(cache=True, inline="always")
def _signed_pair(x0, x1):
    a = (np.float64(x0) + 0.5) * (2.0 * _INV_2_32) - 1.0
    b = (np.float64(x1) + 0.5) * (2.0 * _INV_2_32) - 1.0
    return a, b


@njit(cache=True, inline="always")
def draw(seed, path, step):
    """Two standard normals and one uniform on (0, 1) for one time step.

    Normals come from the Marsaglia polar method.  A rejected pair is redrawn
    from the block whose second counter word carries the attempt number in
    bits 24 and up, which stays disjoint from real steps below 2**56.
    """
    s = np.uint64(seed)
    p = np.uint64(path)
    n = np.uint64(step)
    k0 = s & _MASK
    k1 = s >> _SHIFT
    c0 = n & _MASK
    c1 = n >> _SHIFT
    c2 = p & _MASK
    c3 = p >> _SHIFT
    x0, x1, x2, _ = philox4x32(c0, c1, c2, c3, k0, k1)
    u3 = (np.float64(x2) + 0.5) * _INV_2_32
    a, b = _signed_pair(x0, x1)
    q = a * a + b * b
    attempt = np.uint64(1)
    while q >= 1.0:
        x0, x1, _, _ = philox4x32(c0, c1 | (attempt << _ATTEMPT_SHIFT), c2, c3, k0, k1)
        a, b = _signed_pair(x0, x1)
        q = a * a + b * b
        attempt += np.uint64(1)
    f = np.sqrt(-2.0 * np.log(q) / q)
    return a * f, b * f, u3


@njit(cache=True)
def philox_block(seed, path, step):
    """Raw 32-bit output words for ``(seed, path, step)`` (for tests/diagnostics)."""
    s = np.uint64(seed)
    p = np.uint64(path)
    n = np.uint64(step)
    out = np.empty(4, dtype=np.uint64)
    out[0], out[1], out[2], out[3] = philox4x32(
        n & _MASK, n >> _SHIFT, p & _MASK, p >> _SHIFT, s & _MASK, s >> _SHIFT)
    return out


@njit(cache=True)
def _philox_words(c0, c1, c2, c3, k0, k1):
    out = np.empty(4, dtype=np.uint64)
    out[0], out[1], out[2], out[3] = philox4x32(
        np.uint64(c0), np.uint64(c1), np.uint64(c2), np.uint64(c3),
        np.uint64(k0), np.uint64(k1))
    return out


def philox_words(counter, key):
    """Philox4x32-10 of a 4-word counter and 2-word key, as Python ints."""
    return [int(v) for v in _philox_words(*counter, *key)]
