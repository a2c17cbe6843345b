"""Hot numeric kernels with numba and pure-numpy twins.

Every kernel exists twice: a scalar-loop version compiled with ``@njit``
(early exits, no temporaries) and a vectorized numpy fallback. The numba
path is selected by default when numba imports; set ``SUNSAT_NO_NUMBA=1``
to force the numpy path. Boolean/integer outputs of the two paths agree
exactly on non-degenerate inputs; float outputs agree to rounding.

All angles are radians here; callers convert once at the boundary.
Distances use the haversine quantity h = sin^2(d/2), compared against
h_lam = sin^2(lam/2) so no inverse trig runs in the inner loops.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


_ENV_FLAG = os.environ.get("SUNSAT_NO_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _ENV_FLAG not in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# curve membership: which points lie within lam of a sampled curve
# ---------------------------------------------------------------------------

def _curve_cover_mask_loop(pt_lat, pt_lon, cv_lat, cv_lon, h_lam):
    n = pt_lat.shape[0]
    m = cv_lat.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        sp = math.sin(pt_lat[i])
        cp = math.cos(pt_lat[i])
        for j in range(m):
            s1 = math.sin(0.5 * (cv_lat[j] - pt_lat[i]))
            s2 = math.sin(0.5 * (cv_lon[j] - pt_lon[i]))
            h = s1 * s1 + cp * math.cos(cv_lat[j]) * s2 * s2
            if h <= h_lam:
                out[i] = 1
                break
    return out


curve_cover_mask_numba = njit(cache=True)(_curve_cover_mask_loop)


def curve_cover_mask_numpy(pt_lat, pt_lon, cv_lat, cv_lon, h_lam, chunk=2048):
    n = pt_lat.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    cos_cv = np.cos(cv_lat)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        s1 = np.sin(0.5 * (cv_lat[None, :] - pt_lat[lo:hi, None]))
        s2 = np.sin(0.5 * (cv_lon[None, :] - pt_lon[lo:hi, None]))
        h = s1 * s1 + np.cos(pt_lat[lo:hi, None]) * cos_cv[None, :] * s2 * s2
        out[lo:hi] = (h <= h_lam).any(axis=1)
    return out


# ---------------------------------------------------------------------------
# max over points of (min distance to a sampled curve), for gap surveys
# ---------------------------------------------------------------------------

def _curve_max_gap_loop(pt_lat, pt_lon, cv_lat, cv_lon):
    n = pt_lat.shape[0]
    m = cv_lat.shape[0]
    best_h = -1.0
    for i in range(n):
        cp = math.cos(pt_lat[i])
        h_min = 2.0
        for j in range(m):
            s1 = math.sin(0.5 * (cv_lat[j] - pt_lat[i]))
            s2 = math.sin(0.5 * (cv_lon[j] - pt_lon[i]))
            h = s1 * s1 + cp * math.cos(cv_lat[j]) * s2 * s2
            if h < h_min:
                h_min = h
                if h_min <= best_h:  # cannot raise the running max
                    break
        if h_min > best_h:
            best_h = h_min
    return best_h


curve_max_gap_numba = njit(cache=True)(_curve_max_gap_loop)


def curve_max_gap_numpy(pt_lat, pt_lon, cv_lat, cv_lon, chunk=1024):
    best_h = -1.0
    cos_cv = np.cos(cv_lat)
    for lo in range(0, pt_lat.shape[0], chunk):
        hi = min(lo + chunk, pt_lat.shape[0])
        s1 = np.sin(0.5 * (cv_lat[None, :] - pt_lat[lo:hi, None]))
        s2 = np.sin(0.5 * (cv_lon[None, :] - pt_lon[lo:hi, None]))
        h = s1 * s1 + np.cos(pt_lat[lo:hi, None]) * cos_cv[None, :] * s2 * s2
        best_h = max(best_h, h.min(axis=1).max())
    return best_h


# ---------------------------------------------------------------------------
# moving-set coverage: every target within lam of some satellite at all times
# ---------------------------------------------------------------------------
# Positions arrive as precomputed (sin lat, cos lat, lon) so the inner loop is
# one cosine per membership test:  cos d = s1 s2 + c1 c2 cos(lon1 - lon2).

def _moving_set_cover_ok_loop(
    tgt_sin, tgt_cos, tgt_lon, sat_sin, sat_cos, sat_lon, cos_lam
):
    n_t = sat_sin.shape[0]
    n_s = sat_sin.shape[1]
    n_m = tgt_sin.shape[0]
    prev = np.zeros(n_m, dtype=np.int64)  # temporal-coherence scan hint
    for k in range(n_t):
        for m in range(n_m):
            hit = False
            start = prev[m]
            for off in range(n_s):
                j = start + off
                if j >= n_s:
                    j -= n_s
                cd = tgt_sin[m] * sat_sin[k, j] + tgt_cos[m] * sat_cos[k, j] * math.cos(
                    sat_lon[k, j] - tgt_lon[m]
                )
                if cd >= cos_lam:
                    prev[m] = j
                    hit = True
                    break
            if not hit:
                return False
    return True


moving_set_cover_ok_numba = njit(cache=True)(_moving_set_cover_ok_loop)


def moving_set_cover_ok_numpy(
    tgt_sin, tgt_cos, tgt_lon, sat_sin, sat_cos, sat_lon, cos_lam, chunk=512
):
    n_t = sat_sin.shape[0]
    for k in range(n_t):
        for lo in range(0, tgt_sin.shape[0], chunk):
            hi = min(lo + chunk, tgt_sin.shape[0])
            cd = tgt_sin[lo:hi, None] * sat_sin[k][None, :] + (
                tgt_cos[lo:hi, None]
                * sat_cos[k][None, :]
                * np.cos(sat_lon[k][None, :] - tgt_lon[lo:hi, None])
            )
            if not (cd >= cos_lam).any(axis=1).all():
                return False
    return True


# ---------------------------------------------------------------------------
# banded-grid coverage by rasterized footprints (Walker feasibility check)
# ---------------------------------------------------------------------------

def _walker_cover_ok_loop(sat_lat, sat_lon, lat_c, lon0, dlon, n_lon, h_lam, lam):
    n_t = sat_lat.shape[0]
    n_s = sat_lat.shape[1]
    n_lat = lat_c.shape[0]
    lat0 = lat_c[0]
    dlat = lat_c[1] - lat_c[0] if n_lat > 1 else 1.0
    covered = np.zeros((n_lat, n_lon), dtype=np.uint8)
    for k in range(n_t):
        covered[:, :] = 0
        for s in range(n_s):
            phs = sat_lat[k, s]
            lms = sat_lon[k, s]
            cps = math.cos(phs)
            # superset row range; the rem < 0 test below is the exact filter
            r_lo = int(math.floor((phs - lam - lat0) / dlat))
            r_hi = int(math.ceil((phs + lam - lat0) / dlat))
            if r_lo < 0:
                r_lo = 0
            if r_hi >= n_lat:
                r_hi = n_lat - 1
            for r in range(r_lo, r_hi + 1):
                s1 = math.sin(0.5 * (lat_c[r] - phs))
                rem = h_lam - s1 * s1
                if rem < 0.0:
                    continue
                denom = math.cos(lat_c[r]) * cps
                if denom <= rem:  # includes denom <= 0: full row within reach
                    covered[r, :] = 1
                    continue
                w = 2.0 * math.asin(math.sqrt(rem / denom))
                j_lo = int(math.ceil((lms - w - lon0) / dlon))
                j_hi = int(math.floor((lms + w - lon0) / dlon))
                if j_hi - j_lo + 1 >= n_lon:
                    covered[r, :] = 1
                    continue
                for j in range(j_lo, j_hi + 1):
                    jj = j % n_lon
                    covered[r, jj] = 1
        for r in range(n_lat):
            for j in range(n_lon):
                if covered[r, j] == 0:
                    return False
    return True


walker_cover_ok_numba = njit(cache=True)(_walker_cover_ok_loop)


def walker_cover_ok_numpy(sat_lat, sat_lon, lat_c, lon0, dlon, n_lon, h_lam, lam):
    n_lat = lat_c.shape[0]
    lat0 = lat_c[0]
    dlat = lat_c[1] - lat_c[0] if n_lat > 1 else 1.0
    for k in range(sat_lat.shape[0]):
        covered = np.zeros((n_lat, n_lon), dtype=bool)
        for s in range(sat_lat.shape[1]):
            phs = sat_lat[k, s]
            lms = sat_lon[k, s]
            cps = math.cos(phs)
            r_lo = max(0, int(math.floor((phs - lam - lat0) / dlat)))
            r_hi = min(n_lat - 1, int(math.ceil((phs + lam - lat0) / dlat)))
            for r in range(r_lo, r_hi + 1):
                s1 = math.sin(0.5 * (lat_c[r] - phs))
                rem = h_lam - s1 * s1
                if rem < 0.0:
                    continue
                denom = math.cos(lat_c[r]) * cps
                if denom <= rem:
                    covered[r, :] = True
                    continue
                w = 2.0 * math.asin(math.sqrt(rem / denom))
                j_lo = int(math.ceil((lms - w - lon0) / dlon))
                j_hi = int(math.floor((lms + w - lon0) / dlon))
                if j_hi - j_lo + 1 >= n_lon:
                    covered[r, :] = True
                    continue
                idx = np.arange(j_lo, j_hi + 1) % n_lon
                covered[r, idx] = True
        if not covered.all():
            return False
    return True


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    curve_cover_mask = curve_cover_mask_numba
    curve_max_gap = curve_max_gap_numba
    moving_set_cover_ok = moving_set_cover_ok_numba
    walker_cover_ok = walker_cover_ok_numba
else:
    curve_cover_mask = curve_cover_mask_numpy
    curve_max_gap = curve_max_gap_numpy
    moving_set_cover_ok = moving_set_cover_ok_numpy
    walker_cover_ok = walker_cover_ok_numpy


def backend() -> str:
    """Active kernel backend: 'numba' or 'numpy'."""
    return "numba" if USE_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation of all kernels on tiny inputs."""
    la = np.array([0.0, 0.1])
    lo = np.array([0.0, 0.2])
    sl = np.zeros((1, 2))
    ones = np.ones((1, 2))
    curve_cover_mask(la, lo, la, lo, 0.01)
    curve_max_gap(la, lo, la, lo)
    moving_set_cover_ok(np.sin(la), np.cos(la), lo, sl, ones, sl, 0.5)
    walker_cover_ok(sl, sl, la, -math.pi, 0.1, 4, 0.9, 2.0)
