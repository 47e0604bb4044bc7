"""Per-Matsubara-term wave-vector integrals.

Every term is an integral over the dimensionless variable y = 2 a k^(2)
(or u = 2 a k_perp for the zero-frequency plasma term, whose integrand has
a square-root endpoint in y). The integrand carries exp(-y) explicitly; it
is multiplied by exp(y_min) so that the absolute tolerance is uniform
across terms, and callers rescale by exp(-y_min).

Two interchangeable backends evaluate a block of terms with the same
locally adaptive Gauss-Kronrod (7/15) rule and the same acceptance test:
a numba kernel parallel over terms, and a numpy one vectorised over panels.
``FILMCASIMIR_DISABLE_JIT=1`` selects the numpy backend.
"""
import numpy as np

from ._jit import JIT_ENABLED, njit, prange

# regimes
MATSUBARA = 0      # l >= 1, params (eps_plate, eps_film, (xi/c)^2)
PLASMA_STATIC = 1  # l = 0 plasma, params ((wp_plate/c)^2, (wp_film/c)^2, -)
DRUDE_STATIC = 2   # l = 0 Drude, params (r_D, -, -)

# kinds
FREE_ENERGY = 0
PRESSURE = 1

SPAN = 60.0        # e^-60 ~ 1e-26 relative to the integrand at y_min
YMIN_SKIP = 600.0  # terms with y_min beyond this are dropped as exactly 0
EPSABS = 1e-10
EPSREL = 1e-10
MAX_SPLITS = 400

_OFFSETS = np.array([0.0, 0.5, 1.5, 3.5, 7.5, 15.5, 31.5, SPAN])

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:7:2] = _WG[:3]
W_GAUSS[7] = _WG[3]
W_GAUSS[9:15:2] = _WG[2::-1]


def _integrand(t, a, regime, p1, p2, p3, ymin, kind):
    """Scaled integrand; works on scalars (under numba) and on numpy arrays."""
    if regime == MATSUBARA:
        e1 = p1
        e2 = p2
        q2 = p3
        y = t
        k2 = y / (2.0 * a)
        kap = np.sqrt(e2 * q2)
        kp2 = np.maximum((k2 - kap) * (k2 + kap), 0.0)
        k1 = np.sqrt(kp2 + e1 * q2)
        k3 = np.sqrt(kp2 + q2)
        d = e1 * k2 + e2 * k1
        tm21 = (e1 - e2) * ((e1 + e2) * kp2 + e1 * e2 * q2) / (d * d)
        d = k2 + e2 * k3
        tm23 = (1.0 - e2) * ((1.0 + e2) * kp2 + e2 * q2) / (d * d)
        s = k2 + k1
        te21 = (e2 - e1) * q2 / (s * s)
        s = k2 + k3
        te23 = (e2 - 1.0) * q2 / (s * s)
        weight = y
    elif regime == PLASMA_STATIC:
        o1 = p1
        o2 = p2
        u = t
        kp = u / (2.0 * a)
        kp2 = kp * kp
        k1 = np.sqrt(kp2 + o1)
        k2 = np.sqrt(kp2 + o2)
        y = 2.0 * a * k2
        d = o1 * k2 + o2 * k1
        tm21 = (o1 - o2) * ((o1 + o2) * kp2 + o1 * o2) / (d * d)
        tm23 = -1.0
        s = k2 + k1
        te21 = (o2 - o1) / (s * s)
        s = k2 + kp
        te23 = o2 / (s * s)
        weight = u
    else:
        y = t
        tm21 = p1
        tm23 = -1.0
        te21 = 0.0
        te23 = 0.0
        weight = y
    decay = np.exp(-y)
    x_tm = tm21 * tm23 * decay
    x_te = te21 * te23 * decay
    scale = np.exp(ymin)
    if kind == FREE_ENERGY:
        return weight * (np.log1p(-x_tm) + np.log1p(-x_te)) * scale
    return weight * y * (x_tm / (1.0 - x_tm) + x_te / (1.0 - x_te)) * scale


def breakpoints(regime, ymin):
    """Initial panel edges for one term, in that term's integration variable."""
    if regime == PLASMA_STATIC:
        return np.sqrt(_OFFSETS * (2.0 * ymin + _OFFSETS))
    return ymin + _OFFSETS


_integrand_jit = njit(cache=True)(_integrand)


@njit(cache=True)
def _adapt_one(a, regime, p1, p2, p3, ymin, kind, epsabs, epsrel, max_splits, offsets, nodes, wk, wg):
    nb = offsets.shape[0]
    edges = np.empty(nb)
    for j in range(nb):
        if regime == PLASMA_STATIC:
            edges[j] = np.sqrt(offsets[j] * (2.0 * ymin + offsets[j]))
        else:
            edges[j] = ymin + offsets[j]
    width_total = edges[nb - 1] - edges[0]
    cap = nb + max_splits + 1
    lo = np.empty(cap)
    hi = np.empty(cap)
    sp = 0
    for j in range(nb - 2, -1, -1):
        lo[sp] = edges[j]
        hi[sp] = edges[j + 1]
        sp += 1
    total = 0.0
    comp = 0.0
    panels = 0
    splits = 0
    converged = True
    while sp > 0:
        sp -= 1
        x0 = lo[sp]
        x1 = hi[sp]
        half = 0.5 * (x1 - x0)
        mid = 0.5 * (x1 + x0)
        rk = 0.0
        rg = 0.0
        for i in range(15):
            f = _integrand_jit(mid + half * nodes[i], a, regime, p1, p2, p3, ymin, kind)
            rk += wk[i] * f
            rg += wg[i] * f
        rk *= half
        rg *= half
        err = abs(rk - rg)
        tol = max(epsabs * (x1 - x0) / width_total, epsrel * abs(rk))
        if err <= tol or splits >= max_splits:
            if err > tol:
                converged = False
            # Kahan summation in panel order
            yk = rk - comp
            tk = total + yk
            comp = (tk - total) - yk
            total = tk
            panels += 1
        else:
            lo[sp] = mid
            hi[sp] = x1
            lo[sp + 1] = x0
            hi[sp + 1] = mid
            sp += 2
            splits += 1
    return total, panels, converged


@njit(parallel=True, cache=True)
def _block_jit(a, kind, regime, p1, p2, p3, ymin, epsabs, epsrel, max_splits,
               offsets, nodes, wk, wg, out, panels, ok):
    for i in prange(regime.shape[0]):
        if ymin[i] > YMIN_SKIP:
            out[i] = 0.0
            panels[i] = 0
            ok[i] = True
            continue
        v, n, c = _adapt_one(a, regime[i], p1[i], p2[i], p3[i], ymin[i], kind,
                             epsabs, epsrel, max_splits, offsets, nodes, wk, wg)
        out[i] = v
        panels[i] = n
        ok[i] = c


def integrate_block_numba(a, kind, regime, p1, p2, p3, ymin,
                          epsabs=EPSABS, epsrel=EPSREL, max_splits=MAX_SPLITS):
    n = len(regime)
    out = np.empty(n)
    panels = np.empty(n, dtype=np.int64)
    ok = np.empty(n, dtype=np.bool_)
    _block_jit(float(a), int(kind), np.ascontiguousarray(regime, dtype=np.int64),
               np.ascontiguousarray(p1, dtype=float), np.ascontiguousarray(p2, dtype=float),
               np.ascontiguousarray(p3, dtype=float), np.ascontiguousarray(ymin, dtype=float),
               float(epsabs), float(epsrel), int(max_splits),
               _OFFSETS, NODES, W_KRONROD, W_GAUSS, out, panels, ok)
    return out, panels, ok


def integrate_block_numpy(a, kind, regime, p1, p2, p3, ymin,
                          epsabs=EPSABS, epsrel=EPSREL, max_splits=MAX_SPLITS):
    regime = np.asarray(regime, dtype=np.int64)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    p3 = np.asarray(p3, dtype=float)
    ymin = np.asarray(ymin, dtype=float)
    n = len(regime)
    out = np.zeros(n)
    panels = np.zeros(n, dtype=np.int64)
    ok = np.ones(n, dtype=bool)
    splits = np.zeros(n, dtype=np.int64)

    live = np.nonzero(ymin <= YMIN_SKIP)[0]
    edges = np.empty((live.size, _OFFSETS.size))
    for j, i in enumerate(live):
        edges[j] = breakpoints(regime[i], ymin[i])
    width_total = np.zeros(n)
    width_total[live] = edges[:, -1] - edges[:, 0]
    idx = np.repeat(live, _OFFSETS.size - 1)
    lo = edges[:, :-1].ravel()
    hi = edges[:, 1:].ravel()

    while idx.size:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        t = mid[:, None] + half[:, None] * NODES[None, :]
        vals = np.empty_like(t)
        for reg in np.unique(regime[idx]):
            m = regime[idx] == reg
            j = idx[m]
            vals[m] = _integrand(t[m], a, int(reg), p1[j, None], p2[j, None], p3[j, None],
                                 ymin[j, None], kind)
        rk = half * (vals @ W_KRONROD)
        rg = half * (vals @ W_GAUSS)
        err = np.abs(rk - rg)
        tol = np.maximum(epsabs * (hi - lo) / width_total[idx], epsrel * np.abs(rk))
        good = err <= tol
        accept = good | (splits[idx] >= max_splits)
        np.add.at(out, idx[accept], rk[accept])
        np.add.at(panels, idx[accept], 1)
        bad = accept & ~good
        ok[idx[bad]] = False
        rest = ~accept
        # one split per failing panel per pass
        np.add.at(splits, idx[rest], 1)
        idx = np.repeat(idx[rest], 2)
        lo_r, mid_r, hi_r = lo[rest], mid[rest], hi[rest]
        lo = np.column_stack([lo_r, mid_r]).ravel()
        hi = np.column_stack([mid_r, hi_r]).ravel()
    return out, panels, ok


def integrate_block(a, kind, regime, p1, p2, p3, ymin, backend=None, **kw):
    """Scaled integrals J for a block of terms; the true value is exp(-ymin) * J."""
    if backend is None:
        backend = "numba" if JIT_ENABLED else "numpy"
    if backend == "numba":
        if not JIT_ENABLED:
            raise RuntimeError("numba backend requested but JIT is disabled or unavailable")
        return integrate_block_numba(a, kind, regime, p1, p2, p3, ymin, **kw)
    return integrate_block_numpy(a, kind, regime, p1, p2, p3, ymin, **kw)


def default_backend():
    return "numba" if JIT_ENABLED else "numpy"
