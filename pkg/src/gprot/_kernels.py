"""Hot numerical kernels, written once in a numba-compatible numpy subset.

Each kernel exists in two bindings: ``*_numpy`` (the plain function) and
``*_jit`` (numba-compiled when numba imports, otherwise the same plain
function). The unsuffixed names used by the rest of the package point at
whichever variant _backend selected. The two paths agree to floating-point
roundoff (numpy reduces pairwise, numba sequentially, so last-ulp sums can
differ); each path on its own is exactly deterministic for fixed inputs.
"""

import numpy as np

from . import _backend


def _varimax_fg(L):
    # f = -v and dF/dLambda for v = (1/k) sum_j (1/m) sum_i (L_ij^2 - s_j)^2,
    # s_j the column mean of squared loadings.
    m, k = L.shape
    L2 = L * L
    s = np.sum(L2, axis=0) / m
    D = L2 - s
    v = np.sum(D * D) / (m * k)
    G = (-4.0 / (k * m)) * (L * D)
    return -v, G


def _make_gpr(varimax_fg):
    def _gpr(A, T0, alpha0, max_iter, grad_tol, max_halvings):
        T = T0.copy()
        L = A @ T
        f, Gq = varimax_fg(L)
        f_trace = np.empty(max_iter + 1)
        f_trace[0] = f
        nf = 1
        alpha = alpha0
        converged = False
        iterations = 0
        for it in range(max_iter):
            iterations = it + 1
            G = A.T @ Gq
            M = T.T @ G
            S = 0.5 * (M + M.T)
            Gp = G - T @ S
            s2 = np.sum(Gp * Gp)
            if np.sqrt(s2) < grad_tol:
                converged = True
                break
            alpha = 2.0 * alpha
            accepted = False
            for _h in range(max_halvings):
                X = T - alpha * Gp
                U, sv, Vt = np.linalg.svd(X)
                Tt = U @ Vt
                Lt = A @ Tt
                ft, Gqt = varimax_fg(Lt)
                # sufficient decrease; implies strict descent ft < f
                if ft < f - 0.5 * s2 * alpha:
                    T = Tt
                    f = ft
                    Gq = Gqt
                    f_trace[nf] = f
                    nf += 1
                    accepted = True
                    break
                alpha = 0.5 * alpha
            if not accepted:
                # cannot descend within the halving cap: numerically stationary
                converged = True
                break
        return T, f_trace[:nf].copy(), iterations, converged

    return _gpr


def _make_pairwise(varimax_fg):
    def _pairwise(L, T, max_cycles, angle_tol):
        # In-place cyclic planar rotations; one closed-form angle per column
        # pair per cycle. Returns per-cycle criterion values v(L).
        m, k = L.shape
        v_trace = np.empty(max_cycles)
        cycles = 0
        converged = False
        for _c in range(max_cycles):
            cycles += 1
            amax = 0.0
            for p in range(k - 1):
                for r in range(p + 1, k):
                    x = L[:, p].copy()
                    y = L[:, r].copy()
                    u = x * x - y * y
                    w = 2.0 * x * y
                    su = np.sum(u)
                    sw = np.sum(w)
                    cu = np.sum(u * u - w * w)
                    dw = 2.0 * np.sum(u * w)
                    num = dw - 2.0 * su * sw / m
                    den = cu - (su * su - sw * sw) / m
                    phi = 0.25 * np.arctan2(num, den)
                    if np.abs(phi) > amax:
                        amax = np.abs(phi)
                    cphi = np.cos(phi)
                    sphi = np.sin(phi)
                    L[:, p] = cphi * x + sphi * y
                    L[:, r] = -sphi * x + cphi * y
                    tx = T[:, p].copy()
                    ty = T[:, r].copy()
                    T[:, p] = cphi * tx + sphi * ty
                    T[:, r] = -sphi * tx + cphi * ty
            f, _G = varimax_fg(L)
            v_trace[cycles - 1] = -f
            if amax < angle_tol:
                converged = True
                break
        return v_trace[:cycles].copy(), cycles, converged

    return _pairwise


varimax_fg_numpy = _varimax_fg
gpr_numpy = _make_gpr(varimax_fg_numpy)
pairwise_numpy = _make_pairwise(varimax_fg_numpy)

if _backend.HAVE_NUMBA:
    varimax_fg_jit = _backend.jit(_varimax_fg)
    gpr_jit = _backend.jit(_make_gpr(varimax_fg_jit))
    pairwise_jit = _backend.jit(_make_pairwise(varimax_fg_jit))
else:
    varimax_fg_jit = varimax_fg_numpy
    gpr_jit = gpr_numpy
    pairwise_jit = pairwise_numpy

if _backend.USING_NUMBA:
    varimax_fg = varimax_fg_jit
    gpr = gpr_jit
    pairwise = pairwise_jit
else:
    varimax_fg = varimax_fg_numpy
    gpr = gpr_numpy
    pairwise = pairwise_numpy
