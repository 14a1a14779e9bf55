"""Pure-Python kernels for the convex-roof search.

Mirrors ``_ckernels.pyx`` move for move so both backends walk the same
trajectory up to rounding. ``W`` holds ensemble rows sqrt(p_a)|psi_a>; the
per-row objective is homogeneous of degree one in |w|^2, so p_a * f(psi_a)
is evaluated directly on the unnormalized row.
"""
import math

import numpy as np

KIND_COHERENCE = 0
KIND_QI = 1
KIND_ENTANGLEMENT = 2

TINY = 1e-300
ACCEPT = 1e-15


def esym(x, k):
    e = [0.0] * (k + 1)
    e[0] = 1.0
    for i, xi in enumerate(x):
        for j in range(min(i + 1, k), 0, -1):
            e[j] += xi * e[j - 1]
    return max(e[k], 0.0)


def _finish(s, row, k, scale, power):
    # power > 0 selects the smoothed surrogate n2 * (s / n2^k)^power, which
    # shares the zero set and the degree-one homogeneity of the true value
    if power <= 0.0:
        if s < TINY:
            return 0.0
        return scale * (math.sqrt(s) if k == 2 else s ** (1.0 / k))
    n2 = float(np.sum(row.real ** 2 + row.imag ** 2))
    if n2 == 0.0 or s < TINY:
        return 0.0
    nk = n2
    for _ in range(k - 1):
        nk *= n2
    if power == 1.0:
        return scale * n2 * (s / nk)
    return scale * n2 * (s / nk) ** power


def _row_value(row, kind, k, dloc, scale, subsets, power=0.0):
    if kind == KIND_COHERENCE:
        s = esym((row.real ** 2 + row.imag ** 2).tolist(), k)
        return _finish(s, row, k, scale, power)
    if kind == KIND_QI:
        # sequential sums in the compiled kernel's order
        s1 = s2 = 0.0
        for z in row.tolist():
            t = math.sqrt(z.real * z.real + z.imag * z.imag)
            s1 += t
            s2 += t * t
        return max(s1 * s1 - s2, 0.0)
    m = row.reshape(dloc, dloc)
    blocks = m[subsets[:, None, :, None], subsets[None, :, None, :]]
    s = float(np.sum(np.abs(np.linalg.det(blocks)) ** 2))
    return _finish(s, row, k, scale, power)


def row_values(W, kind, k, dloc, scale, subsets, power=0.0):
    return np.array([_row_value(W[a], kind, k, dloc, scale, subsets, power) for a in range(W.shape[0])])


def _try(W, vals, a, b, c, s, e, kind, k, dloc, scale, subsets, power, za=-1, zb=-1):
    # real arithmetic in the compiled kernel's order; numpy's complex SIMD
    # path may fuse multiply-adds and round differently
    ar, ai, br, bi = W[a].real, W[a].imag, W[b].real, W[b].imag
    er, ei = s * e.real, s * e.imag
    ra = (c * ar + (er * br - ei * bi)) + 1j * (c * ai + (er * bi + ei * br))
    rb = ((-er) * ar - ei * ai + c * br) + 1j * ((-er) * ai + ei * ar + c * bi)
    # annihilated entries are exact zeros, not rounding residue
    if za >= 0:
        ra[za] = 0.0
    if zb >= 0:
        rb[zb] = 0.0
    va = _row_value(ra, kind, k, dloc, scale, subsets, power)
    vb = _row_value(rb, kind, k, dloc, scale, subsets, power)
    gain = vals[a] + vals[b] - va - vb
    if gain > ACCEPT:
        W[a] = ra
        W[b] = rb
        vals[a] = va
        vals[b] = vb
        return gain
    return 0.0


def _ratio(u, v, sign):
    # sign * u / v spelled out as in the compiled kernel
    den = v.real * v.real + v.imag * v.imag
    re = sign * (u.real * v.real + u.imag * v.imag)
    im = sign * (u.imag * v.real - u.real * v.imag)
    return complex(re / den, im / den)


def sweep(W, vals, kind, k, dloc, scale, subsets, step, zeroing, power=0.0):
    """One pass of Givens-rotation moves over all row pairs.

    Each pair tries +/- ``step`` along the real and imaginary generators, then
    (if ``zeroing``) the rotations that annihilate one entry of either row.
    Improving moves are applied in place. Returns (total decrease, accepted).
    """
    m, n = W.shape
    total = 0.0
    accepted = 0
    cs, sn = math.cos(step), math.sin(step)
    for a in range(m):
        for b in range(a + 1, m):
            for e in (1.0 + 0j, 1j):
                for sign in (1.0, -1.0):
                    g = _try(W, vals, a, b, cs, sign * sn, e, kind, k, dloc, scale, subsets, power)
                    if g > 0.0:
                        total += g
                        accepted += 1
                        break
            if not zeroing:
                continue
            for i in range(n):
                wa, wb = W[a, i], W[b, i]
                if wa == 0 or wb == 0:
                    continue
                r = _ratio(wa, wb, -1.0)
                mag = math.sqrt(r.real * r.real + r.imag * r.imag)
                t = math.atan(mag)
                g = _try(W, vals, a, b, math.cos(t), math.sin(t), complex(r.real / mag, r.imag / mag), kind, k, dloc, scale, subsets, power, za=i)
                if g > 0.0:
                    total += g
                    accepted += 1
                    continue
                wa, wb = W[a, i], W[b, i]
                if wa == 0 or wb == 0:
                    continue
                r = _ratio(wb, wa, 1.0)
                mag = math.sqrt(r.real * r.real + r.imag * r.imag)
                t = math.atan(mag)
                g = _try(W, vals, a, b, math.cos(t), math.sin(t), complex(r.real / mag, -(r.imag / mag)), kind, k, dloc, scale, subsets, power, zb=i)
                if g > 0.0:
                    total += g
                    accepted += 1
    return total, accepted


def descend(W, vals, kind, k, dloc, scale, subsets, power, step, tol, max_iters, sweeps_per_step, stall):
    """Sweep with step halving until the step drops below ``tol``.

    The step halves when a sweep accepts nothing, gains less than ``stall``,
    or after ``sweeps_per_step`` sweeps at one step. Returns (sweeps, converged).
    """
    sweeps = at_step = 0
    while sweeps < max_iters:
        total, accepted = sweep(W, vals, kind, k, dloc, scale, subsets, step, True, power)
        sweeps += 1
        at_step += 1
        if accepted == 0 or total < stall or at_step >= sweeps_per_step:
            step *= 0.5
            at_step = 0
            if step < tol:
                return sweeps, True
    return sweeps, False
