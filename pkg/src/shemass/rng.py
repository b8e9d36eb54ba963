"""Counter-based standard normal draws.

Every draw is a pure function of ``(seed, path_index, step, cell)``: the four
integers are folded into a 64-bit counter by the SplitMix64 finalizer, and the
resulting hash feeds a Marsaglia-Tsang ziggurat.  Rejections in the ziggurat
re-hash the cell's own counter chain, so no cell ever consumes another cell's
bits and any single draw can be regenerated in isolation.  This is what makes
ensembles independent of scheduling and of how paths are split into blocks.
"""

import numba as nb
import numpy as np

__all__ = ["normal_cells", "path_key", "step_key", "uniform_cells"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STEP_MULT = np.uint64(0xD1B54A32D192ED03)
_SEED_SALT = np.uint64(0x243F6A8885A308D3)
_ZIG_R = 3.442619855899


def _ziggurat_tables():
    m1 = 2.0**31
    dn = _ZIG_R
    tn = dn
    vn = 9.91256303526217e-3
    kn = np.zeros(128)
    wn = np.zeros(128)
    fn = np.zeros(128)
    q = vn / np.exp(-0.5 * dn * dn)
    kn[0] = (dn / q) * m1
    kn[1] = 0.0
    wn[0] = q / m1
    wn[127] = dn / m1
    fn[0] = 1.0
    fn[127] = np.exp(-0.5 * dn * dn)
    for i in range(126, 0, -1):
        dn = np.sqrt(-2.0 * np.log(vn / dn + np.exp(-0.5 * dn * dn)))
        kn[i + 1] = (dn / tn) * m1
        tn = dn
        fn[i] = np.exp(-0.5 * dn * dn)
        wn[i] = dn / m1
    return kn, wn, fn


ZIG_K, ZIG_W, ZIG_F = _ziggurat_tables()


@nb.njit(inline="always")
def _mix(x):
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@nb.njit(inline="always")
def _unit(h):
    # 53 high bits -> open interval (0, 1)
    return (np.float64(h >> np.uint64(11)) + 0.5) * 1.1102230246251565e-16


@nb.njit(inline="always")
def _key_for_path(seed, path_index):
    return _mix(_mix(seed ^ _SEED_SALT) + np.uint64(path_index) * _GOLDEN)


@nb.njit(inline="always")
def _key_for_step(pkey, step):
    return _mix(pkey ^ ((np.uint64(step) + np.uint64(1)) * _STEP_MULT))


@nb.njit(inline="always")
def _cell_hash(skey, cell):
    return _mix(skey + (np.uint64(cell) + np.uint64(1)) * _GOLDEN)


@nb.njit(inline="always")
def _znorm(h, kn, wn, fn):
    hz = np.int64(np.int32(np.uint32(h >> np.uint64(32))))
    iz = np.int64(h & np.uint64(127))
    if abs(hz) < kn[iz]:
        return hz * wn[iz]
    while True:
        x = hz * wn[iz]
        if iz == 0:
            # base strip: Marsaglia's exponential tail sampler
            while True:
                h = _mix(h + _GOLDEN)
                x = -np.log(_unit(h)) / _ZIG_R
                h = _mix(h + _GOLDEN)
                y = -np.log(_unit(h))
                if y + y >= x * x:
                    break
            return _ZIG_R + x if hz > 0 else -_ZIG_R - x
        h = _mix(h + _GOLDEN)
        if fn[iz] + _unit(h) * (fn[iz - 1] - fn[iz]) < np.exp(-0.5 * x * x):
            return x
        h = _mix(h + _GOLDEN)
        hz = np.int64(np.int32(np.uint32(h >> np.uint64(32))))
        iz = np.int64(h & np.uint64(127))
        if abs(hz) < kn[iz]:
            return hz * wn[iz]


@nb.njit(nogil=True, cache=True)
def _fill_normals(seed, path_index, step, out, kn, wn, fn):
    skey = _key_for_step(_key_for_path(seed, path_index), step)
    for c in range(out.shape[0]):
        out[c] = _znorm(_cell_hash(skey, c), kn, wn, fn)


@nb.njit(nogil=True, cache=True)
def _fill_uniforms(seed, path_index, step, out):
    skey = _key_for_step(_key_for_path(seed, path_index), step)
    for c in range(out.shape[0]):
        out[c] = _unit(_cell_hash(skey, c))


def _as_u64(value, name):
    value = int(value)
    if value < 0 or value >= 2**64:
        raise ValueError(f"{name} must lie in [0, 2**64), got {value}")
    return np.uint64(value)


def normal_cells(seed, path_index, step, n_cells):
    """Standard normals for cells ``0..n_cells-1`` of one time step of one path."""
    out = np.empty(int(n_cells))
    _fill_normals(_as_u64(seed, "seed"), _as_u64(path_index, "path_index"),
                  _as_u64(step, "step"), out, ZIG_K, ZIG_W, ZIG_F)
    return out


def uniform_cells(seed, path_index, step, n_cells):
    """Uniforms on (0, 1) from the same counter layout, used for diagnostics."""
    out = np.empty(int(n_cells))
    _fill_uniforms(_as_u64(seed, "seed"), _as_u64(path_index, "path_index"),
                   _as_u64(step, "step"), out)
    return out


def path_key(seed, path_index):
    return int(_key_for_path(_as_u64(seed, "seed"), _as_u64(path_index, "path_index")))


def step_key(seed, path_index, step):
    return int(_key_for_step(np.uint64(path_key(seed, path_index)), _as_u64(step, "step")))
