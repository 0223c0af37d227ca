"""Hot kernels for sparse series arithmetic.

Series are dicts mapping flat exponent tuples to complex coefficients;
the kernels operate on packed int64 keys (one base-B digit per exponent
component).  Two implementations are provided:

* a numba ``@njit`` path (default when numba imports), and
* a pure-numpy fallback.

Selection: set ``NORMFLOW_NUMBA=0`` to force the numpy path.  The two
paths are compared in ``benchmarks/bench_kernels.py``.
"""

import os

import numpy as np

try:
    from numba import njit, types
    from numba.typed import Dict as NumbaDict

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

__all__ = [
    "numba_enabled",
    "pack_base",
    "sparse_mul",
    "sparse_bracket",
    "plan_eval",
]


def numba_enabled():
    if not HAVE_NUMBA:
        return False
    return os.environ.get("NORMFLOW_NUMBA", "1").lower() not in ("0", "false", "no")


def pack_base(max_deg):
    """Packing radix: large enough for any component arising before truncation."""
    return 2 * max_deg + 3


def _check_packable(n, base):
    if base ** (2 * n) >= 2**62:
        raise ValueError(
            f"packed multi-index overflow: base={base}, 2n={2 * n}; "
            "reduce the truncation degree or the number of degrees of freedom"
        )


def _to_arrays(series, n, base):
    """Sorted (graded-lex) packed keys, exponent matrix, degrees, coefficients."""
    keys = sorted(series, key=lambda k: (sum(k), k))
    T = len(keys)
    exps = np.zeros((T, 2 * n), dtype=np.int64)
    coefs = np.zeros(T, dtype=np.complex128)
    for i, k in enumerate(keys):
        exps[i] = k
        coefs[i] = series[k]
    weights = base ** np.arange(2 * n, dtype=np.int64)
    packed = exps @ weights
    degs = exps.sum(axis=1)
    return packed, exps, degs, coefs


def _unpack(packed, n, base):
    digits = []
    rest = packed
    for _ in range(2 * n):
        digits.append(rest % base)
        rest //= base
    return tuple(int(d) for d in digits)


def _dict_from_packed(packed, coefs, n, base):
    out = {}
    for p, c in zip(packed, coefs):
        if c != 0:
            out[_unpack(int(p), n, base)] = complex(c)
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _mul_numba(pa, da, ca, pb, db, cb, max_deg):
        out = NumbaDict.empty(types.int64, types.complex128)
        for i in range(pa.size):
            for j in range(pb.size):
                if da[i] + db[j] <= max_deg:
                    key = pa[i] + pb[j]
                    if key in out:
                        out[key] += ca[i] * cb[j]
                    else:
                        out[key] = ca[i] * cb[j]
        return out

    @njit(cache=True)
    def _bracket_numba(pa, ea, da, ca, pb, eb, db, cb, n, base, max_deg):
        out = NumbaDict.empty(types.int64, types.complex128)
        for i in range(pa.size):
            for j in range(pb.size):
                if da[i] + db[j] - 2 > max_deg:
                    continue
                cc = ca[i] * cb[j]
                for l in range(n):
                    w = ea[i, n + l] * eb[j, l] - ea[i, l] * eb[j, n + l]
                    if w != 0:
                        key = pa[i] + pb[j] - base**l - base ** (n + l)
                        val = 1j * w * cc
                        if key in out:
                            out[key] += val
                        else:
                            out[key] = val
        return out

    @njit(cache=True)
    def _plan_eval_numba(out, oi, ai, bi, w, x):
        for t in range(oi.size):
            out[oi[t]] += w[t] * x[ai[t]] * x[bi[t]]


def _accumulate(packed_flat, vals_flat):
    uniq, inv = np.unique(packed_flat, return_inverse=True)
    sums = np.bincount(inv, weights=vals_flat.real) + 1j * np.bincount(
        inv, weights=vals_flat.imag
    )
    return uniq, sums


def _mul_numpy(pa, da, ca, pb, db, cb, max_deg):
    mask = (da[:, None] + db[None, :]) <= max_deg
    if not mask.any():
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.complex128)
    keys = (pa[:, None] + pb[None, :])[mask]
    vals = (ca[:, None] * cb[None, :])[mask]
    return _accumulate(keys, vals)


def _bracket_numpy(pa, ea, da, ca, pb, eb, db, cb, n, base, max_deg):
    degmask = (da[:, None] + db[None, :] - 2) <= max_deg
    key_flats = []
    val_flats = []
    psum = pa[:, None] + pb[None, :]
    csum = ca[:, None] * cb[None, :]
    for l in range(n):
        w = ea[:, None, n + l] * eb[None, :, l] - ea[:, None, l] * eb[None, :, n + l]
        mask = degmask & (w != 0)
        if mask.any():
            key_flats.append((psum - base**l - base ** (n + l))[mask])
            val_flats.append((1j * w * csum)[mask])
    if not key_flats:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.complex128)
    return _accumulate(np.concatenate(key_flats), np.concatenate(val_flats))


def sparse_mul(a, b, n, max_deg):
    """Product of two coefficient dicts, truncated at total degree max_deg."""
    if not a or not b:
        return {}
    base = pack_base(max_deg)
    _check_packable(n, base)
    pa, _, da, ca = _to_arrays(a, n, base)
    pb, _, db, cb = _to_arrays(b, n, base)
    if numba_enabled():
        d = _mul_numba(pa, da, ca, pb, db, cb, max_deg)
        return _dict_from_packed(list(d.keys()), list(d.values()), n, base)
    packed, vals = _mul_numpy(pa, da, ca, pb, db, cb, max_deg)
    return _dict_from_packed(packed, vals, n, base)


def sparse_bracket(a, b, n, max_deg):
    """Poisson bracket {A, B} = i sum_j (dA/dzbar_j dB/dz_j - dA/dz_j dB/dzbar_j).

    Inputs and output are coefficient dicts; output truncated at max_deg.
    """
    if not a or not b:
        return {}
    base = pack_base(max_deg)
    _check_packable(n, base)
    pa, ea, da, ca = _to_arrays(a, n, base)
    pb, eb, db, cb = _to_arrays(b, n, base)
    if numba_enabled():
        d = _bracket_numba(pa, ea, da, ca, pb, eb, db, cb, n, base, max_deg)
        return _dict_from_packed(list(d.keys()), list(d.values()), n, base)
    packed, vals = _bracket_numpy(pa, ea, da, ca, pb, eb, db, cb, n, base, max_deg)
    return _dict_from_packed(packed, vals, n, base)


class QuadraticPlan:
    """Precompiled quadratic form: out[o] += w * x[a] * x[b] over all entries.

    Built once per fixed support; evaluation is the hot inner loop of the
    RK4 oracles.
    """

    def __init__(self, out_idx, a_idx, b_idx, weights, size):
        self.out_idx = np.ascontiguousarray(out_idx, dtype=np.int64)
        self.a_idx = np.ascontiguousarray(a_idx, dtype=np.int64)
        self.b_idx = np.ascontiguousarray(b_idx, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.complex128)
        self.size = size

    def __len__(self):
        return self.out_idx.size


def plan_eval(plan, x, out=None):
    """Evaluate a QuadraticPlan at the coefficient vector x."""
    if out is None:
        out = np.zeros(plan.size, dtype=np.complex128)
    if plan.out_idx.size == 0:
        return out
    if numba_enabled():
        _plan_eval_numba(out, plan.out_idx, plan.a_idx, plan.b_idx, plan.weights, x)
    else:
        np.add.at(out, plan.out_idx, plan.weights * x[plan.a_idx] * x[plan.b_idx])
    return out
