"""Hot numeric kernels, each with a numba path and a numpy/scipy fallback.

The dispatch is decided once at import time by :mod:`rmtkit.accel`
(``RMTKIT_NO_NUMBA=1`` forces the fallback). Both paths implement the same
algorithms; they may differ in the last floating-point bits because of
operation ordering, never in structure. ``benchmarks/bench_kernels.py``
times the two side by side.

Contents:
  - Householder tridiagonalization of a Hermitian matrix (values-only).
  - Implicit-shift QL eigenvalues of a real symmetric tridiagonal matrix.
  - Unitary Hessenberg reduction and single-shift complex QR eigenvalues.
  - Partial-pivot LU log|det|.
  - Max ball-count over sample points (Levy concentration sup-over-centers).
  - Mean squared distance to the Gaussian-integer lattice over a theta grid.
"""

import math

import numpy as np

from .accel import USE_NUMBA

_EPS = float(np.finfo(np.float64).eps)


# ---------------------------------------------------------------------------
# Householder tridiagonalization (Hermitian, values only)
# ---------------------------------------------------------------------------

def _hermitian_tridiag_np(H):
    """Reduce Hermitian H to real (d, e) tridiagonal data. Vectorized fallback."""
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    d = np.empty(n)
    e = np.empty(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1:, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            e[k] = 0.0
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        alpha = -phase * xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm > 0.0:
            u = v / vnorm
            B = A[k + 1:, k + 1:]
            p = B @ u
            kappa = np.real(np.vdot(u, p))
            w = p - kappa * u
            B -= 2.0 * (np.outer(u, w.conj()) + np.outer(w, u.conj()))
        A[k + 1, k] = alpha
        A[k, k + 1] = np.conj(alpha)
        if n - k > 2:
            A[k + 2:, k] = 0.0
            A[k, k + 2:] = 0.0
        e[k] = abs(alpha)
    if n >= 2:
        e[n - 2] = abs(A[n - 1, n - 2])
    d[:] = np.real(np.diag(A))
    return d, e


def _hermitian_tridiag_loops(A):
    n = A.shape[0]
    d = np.empty(n)
    e = np.empty(max(n - 1, 0))
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += (A[i, k].real ** 2 + A[i, k].imag ** 2)
        xnorm = math.sqrt(xnorm2)
        if xnorm == 0.0:
            e[k] = 0.0
            continue
        x0 = A[k + 1, k]
        if x0 != 0.0:
            phase = x0 / abs(x0)
        else:
            phase = 1.0 + 0.0j
        alpha = -phase * xnorm
        m = n - k - 1
        u = np.empty(m, dtype=np.complex128)
        for i in range(m):
            u[i] = A[k + 1 + i, k]
        u[0] -= alpha
        unorm2 = 0.0
        for i in range(m):
            unorm2 += u[i].real ** 2 + u[i].imag ** 2
        unorm = math.sqrt(unorm2)
        if unorm > 0.0:
            for i in range(m):
                u[i] /= unorm
            p = np.zeros(m, dtype=np.complex128)
            for i in range(m):
                acc = 0.0 + 0.0j
                for j in range(m):
                    acc += A[k + 1 + i, k + 1 + j] * u[j]
                p[i] = acc
            kappa = 0.0
            for i in range(m):
                kappa += (np.conj(u[i]) * p[i]).real
            for i in range(m):
                p[i] -= kappa * u[i]
            for i in range(m):
                for j in range(m):
                    A[k + 1 + i, k + 1 + j] -= 2.0 * (
                        u[i] * np.conj(p[j]) + p[i] * np.conj(u[j])
                    )
        A[k + 1, k] = alpha
        e[k] = abs(alpha)
    if n >= 2:
        e[n - 2] = abs(A[n - 1, n - 2])
    for i in range(n):
        d[i] = A[i, i].real
    return d, e


# ---------------------------------------------------------------------------
# Implicit-shift QL for a real symmetric tridiagonal matrix (values only)
# ---------------------------------------------------------------------------

def _tridiag_eigvals_core(d, e, max_iter):
    """QL with implicit Wilkinson shifts. d (n,), e (n,) with e[n-1] spare.

    Returns (d, ok). d holds eigenvalues (unsorted) when ok.
    """
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return d, False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return d, True


# ---------------------------------------------------------------------------
# Hessenberg reduction (complex, values-only)
# ---------------------------------------------------------------------------

def _hessenberg_reduce_np(A):
    H = np.array(A, dtype=np.complex128)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0.0 else 1.0
        alpha = -phase * xnorm
        v = x
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        u = v / vnorm
        # similarity: rows then columns
        H[k + 1:, k:] -= 2.0 * np.outer(u, u.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ u, u.conj())
        H[k + 1, k] = alpha
        H[k + 2:, k] = 0.0
    return H


def _hessenberg_reduce_loops(H):
    n = H.shape[0]
    u = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += H[i, k].real ** 2 + H[i, k].imag ** 2
        xnorm = math.sqrt(xnorm2)
        if xnorm == 0.0:
            continue
        x0 = H[k + 1, k]
        if x0 != 0.0:
            phase = x0 / abs(x0)
        else:
            phase = 1.0 + 0.0j
        alpha = -phase * xnorm
        m = n - k - 1
        for i in range(m):
            u[i] = H[k + 1 + i, k]
        u[0] -= alpha
        unorm2 = 0.0
        for i in range(m):
            unorm2 += u[i].real ** 2 + u[i].imag ** 2
        unorm = math.sqrt(unorm2)
        if unorm == 0.0:
            continue
        for i in range(m):
            u[i] /= unorm
        # rows k+1.. of columns k..n-1
        for j in range(k, n):
            acc = 0.0 + 0.0j
            for i in range(m):
                acc += np.conj(u[i]) * H[k + 1 + i, j]
            acc *= 2.0
            for i in range(m):
                H[k + 1 + i, j] -= u[i] * acc
        # columns k+1.. of all rows
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(m):
                acc += H[i, k + 1 + j] * u[j]
            acc *= 2.0
            for j in range(m):
                H[i, k + 1 + j] -= acc * np.conj(u[j])
        H[k + 1, k] = alpha
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H


# ---------------------------------------------------------------------------
# Single-shift complex QR on a Hessenberg matrix (values only)
# ---------------------------------------------------------------------------

def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a,b],[c,d]] closer to d."""
    tr2 = 0.5 * (a + d)
    det = a * d - b * c
    disc = np.sqrt(tr2 * tr2 - det + 0.0j)
    l1 = tr2 + disc
    l2 = tr2 - disc
    if abs(l1 - d) < abs(l2 - d):
        return l1
    return l2


def _hessenberg_eigvals_core(H, tol, max_iter_per_eig):
    """Explicit single-shift QR with deflation. Returns (eigs, found, ok, sweeps)."""
    n = H.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    found = 0
    total_sweeps = 0
    cc = np.empty(n, dtype=np.complex128)
    ss = np.empty(n, dtype=np.complex128)
    hi = n - 1
    it = 0
    while hi >= 0:
        if hi == 0:
            eigs[found] = H[0, 0]
            found += 1
            hi -= 1
            it = 0
            continue
        # deflation scan: find lo such that subdiagonal lo-1 is negligible
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            scale = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if scale == 0.0:
                scale = 1.0
            if sub <= tol * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[found] = H[hi, hi]
            found += 1
            hi -= 1
            it = 0
            continue
        if lo == hi - 1:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            c = H[hi, hi - 1]
            d = H[hi, hi]
            tr2 = 0.5 * (a + d)
            disc = np.sqrt(tr2 * tr2 - (a * d - b * c) + 0.0j)
            eigs[found] = tr2 + disc
            eigs[found + 1] = tr2 - disc
            found += 2
            hi -= 2
            it = 0
            continue
        it += 1
        if it > max_iter_per_eig:
            return eigs, found, False, total_sweeps
        if it % 10 == 0:
            # exceptional shift to break symmetric stalls
            sigma = H[hi, hi] + 1.5 * abs(H[hi, hi - 1]) + 0.5 * abs(
                H[hi - 1, hi - 2]
            )
        else:
            sigma = _wilkinson_shift(
                H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]
            )
        total_sweeps += 1
        # QR sweep on the active block [lo..hi] of H - sigma*I
        for k in range(lo, hi + 1):
            H[k, k] -= sigma
        for k in range(lo, hi):
            a = H[k, k]
            b = H[k + 1, k]
            r = math.hypot(abs(a), abs(b))
            if r == 0.0:
                cc[k] = 1.0 + 0.0j
                ss[k] = 0.0 + 0.0j
                continue
            c = a / r
            s = b / r
            cc[k] = c
            ss[k] = s
            for j in range(k, hi + 1):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = np.conj(c) * t1 + np.conj(s) * t2
                H[k + 1, j] = -s * t1 + c * t2
        for k in range(lo, hi):
            c = cc[k]
            s = ss[k]
            jmax = k + 2 if k + 2 <= hi else hi
            for i in range(lo, jmax + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c * t1 + s * t2
                H[i, k + 1] = -np.conj(s) * t1 + np.conj(c) * t2
        for k in range(lo, hi + 1):
            H[k, k] += sigma
    return eigs, found, True, total_sweeps


# ---------------------------------------------------------------------------
# LU log|det| with partial pivoting
# ---------------------------------------------------------------------------

def _lu_logabsdet_np(A):
    U = np.array(A, dtype=np.complex128)
    n = U.shape[0]
    acc = 0.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(U[k:, k])))
        if piv != k:
            U[[k, piv], k:] = U[[piv, k], k:]
        p = abs(U[k, k])
        if p < 1e-300:
            return -math.inf
        acc += math.log(p)
        if k + 1 < n:
            U[k + 1:, k:] -= np.outer(U[k + 1:, k] / U[k, k], U[k, k:])
    return acc


def _lu_logabsdet_loops(U):
    n = U.shape[0]
    acc = 0.0
    for k in range(n):
        piv = k
        best = abs(U[k, k])
        for i in range(k + 1, n):
            m = abs(U[i, k])
            if m > best:
                best = m
                piv = i
        if piv != k:
            for j in range(k, n):
                tmp = U[k, j]
                U[k, j] = U[piv, j]
                U[piv, j] = tmp
        p = abs(U[k, k])
        if p < 1e-300:
            return -math.inf
        acc += math.log(p)
        for i in range(k + 1, n):
            f = U[i, k] / U[k, k]
            for j in range(k, n):
                U[i, j] -= f * U[k, j]
    return acc


# ---------------------------------------------------------------------------
# Max count of sample points in a ball of radius r around any sample point
# ---------------------------------------------------------------------------

def _max_ball_count_loops(order, re_s, im_s, r):
    """re_s, im_s sorted by re. order maps sorted pos -> original index.

    Returns (best_count, original index of the first witness).
    """
    m = re_s.shape[0]
    r2 = r * r
    best = 0
    best_idx = -1
    lo = 0
    hi = 0
    for j in range(m):
        while re_s[j] - re_s[lo] > r:
            lo += 1
        if hi < j:
            hi = j
        while hi + 1 < m and re_s[hi + 1] - re_s[j] <= r:
            hi += 1
        cnt = 0
        for k in range(lo, hi + 1):
            dx = re_s[k] - re_s[j]
            dy = im_s[k] - im_s[j]
            if dx * dx + dy * dy <= r2:
                cnt += 1
        orig = order[j]
        if cnt > best or (cnt == best and orig < best_idx):
            best = cnt
            best_idx = orig
    return best, best_idx


def _max_ball_count_kdtree(points_re, points_im, r):
    from scipy.spatial import cKDTree

    pts = np.column_stack([points_re, points_im])
    tree = cKDTree(pts)
    counts = tree.query_ball_point(pts, r, return_length=True)
    best = int(counts.max())
    best_idx = int(np.argmax(counts))
    return best, best_idx


# ---------------------------------------------------------------------------
# Mean squared lattice distance over a grid of theta values
# ---------------------------------------------------------------------------

def _lattice_mean_dist2_loops(thetas, w):
    """w = v * Xt rows, shape (m, n) complex. Returns per-theta mean dist^2."""
    t = thetas.shape[0]
    m = w.shape[0]
    n = w.shape[1]
    out = np.empty(t)
    for a in range(t):
        th = thetas[a]
        acc = 0.0
        for k in range(m):
            s = 0.0
            for j in range(n):
                z = th * w[k, j]
                x = z.real - math.floor(z.real + 0.5)
                y = z.imag - math.floor(z.imag + 0.5)
                s += x * x + y * y
            acc += s
        out[a] = acc / m
    return out


def _lattice_mean_dist2_np(thetas, w):
    out = np.empty(thetas.shape[0])
    for a, th in enumerate(thetas):
        z = th * w
        x = z.real - np.rint(z.real)
        y = z.imag - np.rint(z.imag)
        out[a] = float(np.mean(np.sum(x * x + y * y, axis=1)))
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    from numba import njit

    _hermitian_tridiag_jit = njit(cache=True)(_hermitian_tridiag_loops)
    _tridiag_eigvals_jit = njit(cache=True)(_tridiag_eigvals_core)
    _hessenberg_reduce_jit = njit(cache=True)(_hessenberg_reduce_loops)
    _wilkinson_shift = njit(cache=True)(_wilkinson_shift)
    _hessenberg_eigvals_jit = njit(cache=True)(_hessenberg_eigvals_core)
    _lu_logabsdet_jit = njit(cache=True)(_lu_logabsdet_loops)
    _max_ball_count_jit = njit(cache=True)(_max_ball_count_loops)
    _lattice_mean_dist2_jit = njit(cache=True)(_lattice_mean_dist2_loops)


def hermitian_tridiag(H):
    if USE_NUMBA:
        return _hermitian_tridiag_jit(np.array(H, dtype=np.complex128))
    return _hermitian_tridiag_np(H)


def tridiag_eigvals(d, e, max_iter=50):
    """Eigenvalues (ascending) of the symmetric tridiagonal (d, e)."""
    n = d.shape[0]
    dd = np.array(d, dtype=np.float64)
    ee = np.zeros(n, dtype=np.float64)
    if n > 1:
        ee[: n - 1] = e[: n - 1]
    if USE_NUMBA:
        w, ok = _tridiag_eigvals_jit(dd, ee, max_iter)
    else:
        w, ok = _tridiag_eigvals_core(dd, ee, max_iter)
    return np.sort(w), bool(ok)


def hessenberg_reduce(A):
    if USE_NUMBA:
        return _hessenberg_reduce_jit(np.array(A, dtype=np.complex128))
    return _hessenberg_reduce_np(A)


def hessenberg_eigvals(H, tol=1e-13, max_iter_per_eig=100):
    """Eigenvalues of a Hessenberg matrix. Returns (eigs, found, ok, sweeps)."""
    work = np.array(H, dtype=np.complex128)
    if USE_NUMBA:
        return _hessenberg_eigvals_jit(work, tol, max_iter_per_eig)
    return _hessenberg_eigvals_core(work, tol, max_iter_per_eig)


def lu_logabsdet(A):
    if USE_NUMBA:
        return _lu_logabsdet_jit(np.array(A, dtype=np.complex128))
    return _lu_logabsdet_np(A)


def max_ball_count(points_re, points_im, r):
    """(max over j of #{k: |S_k - S_j| <= r}, witness index, ties to lowest)."""
    re = np.ascontiguousarray(points_re, dtype=np.float64)
    im = np.ascontiguousarray(points_im, dtype=np.float64)
    if USE_NUMBA:
        order = np.argsort(re, kind="stable")
        cnt, idx = _max_ball_count_jit(order, re[order], im[order], float(r))
        return int(cnt), int(idx)
    cnt, idx = _max_ball_count_kdtree(re, im, float(r))
    return cnt, idx


def lattice_mean_dist2_grid(thetas, v, samples):
    """Mean over symmetrized samples of dist^2(theta * v*X, (Z+iZ)^n), per theta."""
    th = np.ascontiguousarray(thetas, dtype=np.complex128)
    w = np.ascontiguousarray(samples * np.asarray(v)[None, :], dtype=np.complex128)
    if USE_NUMBA:
        return _lattice_mean_dist2_jit(th, w)
    return _lattice_mean_dist2_np(th, w)
