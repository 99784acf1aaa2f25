"""Hot numeric loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``KCOVER_NUMBA`` is not set to
``0``.  Both paths perform the same floating point operations in the same order,
so they return identical results for identical inputs.
"""
from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("KCOVER_NUMBA", "1").strip().lower() in ("0", "false", "no", "off"):
        raise ImportError("numba disabled by KCOVER_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

# repulsion parameters for the packing local search
REPULSE_RADIUS = 2.6
REPULSE_STEP = 0.15


# ---------------------------------------------------------------- numpy path

def contains_matrix_np(points, centers, lim):
    """(n, m) bool: point i lies within distance ``lim`` of center j."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    dx = points[:, None, 0] - centers[None, :, 0]
    dy = points[:, None, 1] - centers[None, :, 1]
    return dx * dx + dy * dy <= lim * lim


def pack_trials_np(cands, valid, tau, steps, sep2, out_counts, out_cfg):
    T, P, _ = cands.shape
    A = out_cfg.shape[1]
    rows = np.arange(T)
    n = np.zeros(T, dtype=np.int64)
    _insert_pool_np(cands, valid, sep2, n, out_cfg, rows)
    slots = np.arange(A)
    for _ in range(steps):
        live = slots[None, :] < n[:, None]                       # (T, A)
        px, py = out_cfg[:, :, 0], out_cfg[:, :, 1]
        fx = np.zeros((T, A))
        fy = np.zeros((T, A))
        for j in range(A):
            use = live & live[:, j:j + 1] & (slots[None, :] != j)
            dx = px - px[:, j:j + 1]
            dy = py - py[:, j:j + 1]
            d = np.sqrt(dx * dx + dy * dy)
            safe = np.where(use, d, 1.0)
            w = np.where(use, np.maximum(0.0, REPULSE_RADIUS - safe), 0.0)
            fx = fx + np.where(use, dx / safe * w, 0.0)
            fy = fy + np.where(use, dy / safe * w, 0.0)
        nx = px + REPULSE_STEP * fx
        ny = py + REPULSE_STEP * fy
        qx = np.minimum(np.maximum(nx, 0.0), tau)
        qy = np.minimum(np.maximum(ny, 0.0), tau)
        vx, vy = nx - qx, ny - qy
        L = np.sqrt(vx * vx + vy * vy)
        far = L > 1.0
        Ls = np.where(far, L, 1.0)
        nx = np.where(far, qx + vx / Ls, nx)
        ny = np.where(far, qy + vy / Ls, ny)
        ok = np.ones(T, dtype=bool)
        for i in range(A):
            for j in range(i + 1, A):
                both = live[:, i] & live[:, j]
                dx = nx[:, i] - nx[:, j]
                dy = ny[:, i] - ny[:, j]
                ok &= ~both | (dx * dx + dy * dy > sep2)
        commit = ok[:, None] & live
        out_cfg[:, :, 0] = np.where(commit, nx, px)
        out_cfg[:, :, 1] = np.where(commit, ny, py)
        _insert_pool_np(cands, valid, sep2, n, out_cfg, rows)
    out_counts[:] = n


def _insert_pool_np(cands, valid, sep2, n, cfg, rows):
    T, P, _ = cands.shape
    A = cfg.shape[1]
    slots = np.arange(A)
    for j in range(P):
        cx = cands[:, j, 0]
        cy = cands[:, j, 1]
        live = slots[None, :] < n[:, None]
        dx = cfg[:, :, 0] - cx[:, None]
        dy = cfg[:, :, 1] - cy[:, None]
        clear = np.all(~live | (dx * dx + dy * dy > sep2), axis=1)
        take = valid[:, j] & clear & (n < A)
        idx = np.where(take, n, 0)
        cfg[rows[take], idx[take], 0] = cx[take]
        cfg[rows[take], idx[take], 1] = cy[take]
        n += take


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def contains_matrix_nb(points, centers, lim):
        n = points.shape[0]
        m = centers.shape[0]
        out = np.zeros((n, m), dtype=np.bool_)
        lim2 = lim * lim
        for i in range(n):
            for j in range(m):
                dx = points[i, 0] - centers[j, 0]
                dy = points[i, 1] - centers[j, 1]
                out[i, j] = dx * dx + dy * dy <= lim2
        return out

    @njit(cache=True)
    def _insert_pool_nb(cands, valid, t, sep2, n, cfg):
        P = cands.shape[1]
        A = cfg.shape[1]
        for j in range(P):
            if not valid[t, j] or n >= A:
                continue
            cx = cands[t, j, 0]
            cy = cands[t, j, 1]
            clear = True
            for i in range(n):
                dx = cfg[t, i, 0] - cx
                dy = cfg[t, i, 1] - cy
                if not dx * dx + dy * dy > sep2:
                    clear = False
                    break
            if clear:
                cfg[t, n, 0] = cx
                cfg[t, n, 1] = cy
                n += 1
        return n

    @njit(cache=True)
    def pack_trials_nb(cands, valid, tau, steps, sep2, out_counts, out_cfg):
        T = cands.shape[0]
        A = out_cfg.shape[1]
        nx = np.empty(A)
        ny = np.empty(A)
        for t in range(T):
            n = _insert_pool_nb(cands, valid, t, sep2, 0, out_cfg)
            for _ in range(steps):
                for i in range(n):
                    fx = 0.0
                    fy = 0.0
                    px = out_cfg[t, i, 0]
                    py = out_cfg[t, i, 1]
                    for j in range(n):
                        if j == i:
                            continue
                        dx = px - out_cfg[t, j, 0]
                        dy = py - out_cfg[t, j, 1]
                        d = np.sqrt(dx * dx + dy * dy)
                        w = max(0.0, REPULSE_RADIUS - d)
                        fx = fx + dx / d * w
                        fy = fy + dy / d * w
                    x = px + REPULSE_STEP * fx
                    y = py + REPULSE_STEP * fy
                    qx = min(max(x, 0.0), tau)
                    qy = min(max(y, 0.0), tau)
                    vx = x - qx
                    vy = y - qy
                    L = np.sqrt(vx * vx + vy * vy)
                    if L > 1.0:
                        x = qx + vx / L
                        y = qy + vy / L
                    nx[i] = x
                    ny[i] = y
                ok = True
                for i in range(n):
                    for j in range(i + 1, n):
                        dx = nx[i] - nx[j]
                        dy = ny[i] - ny[j]
                        if not dx * dx + dy * dy > sep2:
                            ok = False
                if ok:
                    for i in range(n):
                        out_cfg[t, i, 0] = nx[i]
                        out_cfg[t, i, 1] = ny[i]
                n = _insert_pool_nb(cands, valid, t, sep2, n, out_cfg)
            out_counts[t] = n


def contains_matrix(points, centers, lim, backend: str | None = None):
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    centers = np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 2)
    if _use_numba(backend):
        return contains_matrix_nb(points, centers, float(lim))
    return contains_matrix_np(points, centers, float(lim))


def pack_trials(cands, valid, tau, steps, sep2, slots, backend: str | None = None):
    """Greedy + repulsion packing for a batch of candidate pools.

    Returns (counts (T,), configurations (T, slots, 2)).
    """
    T = cands.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    cfg = np.zeros((T, slots, 2))
    fn = pack_trials_nb if _use_numba(backend) else pack_trials_np
    fn(np.ascontiguousarray(cands), np.ascontiguousarray(valid), float(tau), int(steps),
       float(sep2), counts, cfg)
    return counts, cfg


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return HAVE_NUMBA
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def active_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
