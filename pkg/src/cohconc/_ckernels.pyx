# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the convex-roof search (see ``_pykernels`` for the reference)."""
from libc.math cimport sqrt, pow, cos, sin, atan, fabs
from libc.stdlib cimport malloc, free

import numpy as np

cdef int KIND_COHERENCE = 0
cdef int KIND_QI = 1
cdef int KIND_ENTANGLEMENT = 2

cdef double TINY = 1e-300
cdef double ACCEPT = 1e-15


cdef struct Ctx:
    int kind
    int k
    int n
    int dloc
    double scale
    double power
    double inv_k
    int nsub
    int* subsets
    double* e
    double* x
    double complex* blk


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef double esym_c(double* x, int n, int k, double* e) nogil:
    cdef int i, j, top
    e[0] = 1.0
    for j in range(1, k + 1):
        e[j] = 0.0
    for i in range(n):
        top = i + 1 if i + 1 < k else k
        for j in range(top, 0, -1):
            e[j] += x[i] * e[j - 1]
    return e[k] if e[k] > 0.0 else 0.0


cdef double det_c(double complex* a, int n) nogil:
    # a is overwritten; row-major n x n
    cdef int c, r, p, j
    cdef double best, v
    cdef double complex det = 1.0, f, tmp
    if n == 2:
        return abs2(a[0] * a[3] - a[1] * a[2])
    if n == 3:
        return abs2(a[0] * (a[4] * a[8] - a[5] * a[7])
                    - a[1] * (a[3] * a[8] - a[5] * a[6])
                    + a[2] * (a[3] * a[7] - a[4] * a[6]))
    for c in range(n):
        p = c
        best = abs2(a[c * n + c])
        for r in range(c + 1, n):
            v = abs2(a[r * n + c])
            if v > best:
                best = v
                p = r
        if best == 0.0:
            return 0.0
        if p != c:
            for j in range(n):
                tmp = a[c * n + j]
                a[c * n + j] = a[p * n + j]
                a[p * n + j] = tmp
        det = det * a[c * n + c]
        for r in range(c + 1, n):
            f = a[r * n + c] / a[c * n + c]
            for j in range(c, n):
                a[r * n + j] = a[r * n + j] - f * a[c * n + j]
    return abs2(det)


cdef inline double finish(double s, double complex* row, Ctx* ctx) nogil:
    cdef int i
    cdef double n2 = 0.0, nk
    if ctx.power <= 0.0:
        if s < TINY:
            return 0.0
        if ctx.k == 2:
            return ctx.scale * sqrt(s)
        return ctx.scale * pow(s, ctx.inv_k)
    for i in range(ctx.n):
        n2 += abs2(row[i])
    if n2 == 0.0 or s < TINY:
        return 0.0
    nk = n2
    for i in range(ctx.k - 1):
        nk *= n2
    if ctx.power == 1.0:
        return ctx.scale * n2 * (s / nk)
    return ctx.scale * n2 * pow(s / nk, ctx.power)


cdef double row_value(double complex* row, Ctx* ctx) nogil:
    cdef int i, j, u, v, k = ctx.k, d = ctx.dloc
    cdef double s, s1, s2, t
    cdef int* rs
    cdef int* cs
    if ctx.kind == KIND_COHERENCE:
        for i in range(ctx.n):
            ctx.x[i] = abs2(row[i])
        s = esym_c(ctx.x, ctx.n, k, ctx.e)
        return finish(s, row, ctx)
    if ctx.kind == KIND_QI:
        s1 = 0.0
        s2 = 0.0
        for i in range(ctx.n):
            t = sqrt(abs2(row[i]))
            s1 += t
            s2 += t * t
        s = s1 * s1 - s2
        return s if s > 0.0 else 0.0
    s = 0.0
    for i in range(ctx.nsub):
        rs = ctx.subsets + i * k
        for j in range(ctx.nsub):
            cs = ctx.subsets + j * k
            for u in range(k):
                for v in range(k):
                    ctx.blk[u * k + v] = row[rs[u] * d + cs[v]]
            s += det_c(ctx.blk, k)
    return finish(s, row, ctx)


cdef double try_move(double complex* wa, double complex* wb, double* va_p, double* vb_p,
                     double c, double s, double complex e,
                     double complex* ra, double complex* rb, Ctx* ctx, int za, int zb) nogil:
    cdef int i
    cdef double va, vb, gain
    cdef double complex se = s * e
    cdef double complex sec = -(s * e.real - 1j * s * e.imag)
    for i in range(ctx.n):
        ra[i] = c * wa[i] + se * wb[i]
        rb[i] = sec * wa[i] + c * wb[i]
    if za >= 0:
        ra[za] = 0.0
    if zb >= 0:
        rb[zb] = 0.0
    va = row_value(ra, ctx)
    vb = row_value(rb, ctx)
    gain = va_p[0] + vb_p[0] - va - vb
    if gain > ACCEPT:
        for i in range(ctx.n):
            wa[i] = ra[i]
            wb[i] = rb[i]
        va_p[0] = va
        vb_p[0] = vb
        return gain
    return 0.0


cdef inline double complex ratio(double complex u, double complex v, double sign) nogil:
    # sign * u / v as u * conj(v) / |v|^2, spelled out so the Python twin matches
    cdef double den = abs2(v)
    cdef double re = sign * (u.real * v.real + u.imag * v.imag)
    cdef double im = sign * (u.imag * v.real - u.real * v.imag)
    return re / den + 1j * (im / den)


cdef Ctx make_ctx(int kind, int k, int n, int dloc, double scale, double power, int[:, ::1] subsets):
    cdef Ctx ctx
    ctx.power = power
    ctx.inv_k = 1.0 / k
    ctx.kind = kind
    ctx.k = k
    ctx.n = n
    ctx.dloc = dloc
    ctx.scale = scale
    ctx.nsub = subsets.shape[0]
    ctx.subsets = &subsets[0, 0]
    ctx.e = <double*> malloc((k + 1) * sizeof(double))
    ctx.x = <double*> malloc(n * sizeof(double))
    ctx.blk = <double complex*> malloc(k * k * sizeof(double complex))
    return ctx


cdef void free_ctx(Ctx* ctx):
    free(ctx.e)
    free(ctx.x)
    free(ctx.blk)


def esym(double[::1] x, int k):
    cdef double* e = <double*> malloc((k + 1) * sizeof(double))
    cdef double out = esym_c(&x[0], x.shape[0], k, e)
    free(e)
    return out


def row_values(double complex[:, ::1] W, int kind, int k, int dloc, double scale,
               int[:, ::1] subsets, double power=0.0):
    cdef int m = W.shape[0], a
    cdef Ctx ctx = make_ctx(kind, k, W.shape[1], dloc, scale, power, subsets)
    out = np.empty(m)
    cdef double[::1] ov = out
    with nogil:
        for a in range(m):
            ov[a] = row_value(&W[a, 0], &ctx)
    free_ctx(&ctx)
    return out


cdef int sweep_c(double complex[:, ::1] W, double[::1] vals, Ctx* ctx, double step, bint zeroing,
                 double complex* ra, double complex* rb, double* total) nogil:
    cdef int m = W.shape[0], n = W.shape[1]
    cdef int a, b, i, p, sg, accepted = 0
    cdef double g, t, cs = cos(step), sn = sin(step), sgn, mag
    cdef double complex e, wa, wb, r
    total[0] = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            for p in range(2):
                e = 1.0 if p == 0 else 1j
                for sg in range(2):
                    sgn = 1.0 if sg == 0 else -1.0
                    g = try_move(&W[a, 0], &W[b, 0], &vals[a], &vals[b], cs, sgn * sn, e, ra, rb, ctx, -1, -1)
                    if g > 0.0:
                        total[0] += g
                        accepted += 1
                        break
            if not zeroing:
                continue
            for i in range(n):
                wa = W[a, i]
                wb = W[b, i]
                if abs2(wa) == 0.0 or abs2(wb) == 0.0:
                    continue
                r = ratio(wa, wb, -1.0)
                mag = sqrt(abs2(r))
                t = atan(mag)
                e = r.real / mag + 1j * (r.imag / mag)
                g = try_move(&W[a, 0], &W[b, 0], &vals[a], &vals[b], cos(t), sin(t), e, ra, rb, ctx, i, -1)
                if g > 0.0:
                    total[0] += g
                    accepted += 1
                    continue
                wa = W[a, i]
                wb = W[b, i]
                if abs2(wa) == 0.0 or abs2(wb) == 0.0:
                    continue
                r = ratio(wb, wa, 1.0)
                mag = sqrt(abs2(r))
                t = atan(mag)
                e = r.real / mag - 1j * (r.imag / mag)
                g = try_move(&W[a, 0], &W[b, 0], &vals[a], &vals[b], cos(t), sin(t), e, ra, rb, ctx, -1, i)
                if g > 0.0:
                    total[0] += g
                    accepted += 1
    return accepted


def sweep(double complex[:, ::1] W, double[::1] vals, int kind, int k, int dloc,
          double scale, int[:, ::1] subsets, double step, bint zeroing, double power=0.0):
    cdef int n = W.shape[1], accepted
    cdef double total
    cdef Ctx ctx = make_ctx(kind, k, n, dloc, scale, power, subsets)
    cdef double complex* ra = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rb = <double complex*> malloc(n * sizeof(double complex))
    with nogil:
        accepted = sweep_c(W, vals, &ctx, step, zeroing, ra, rb, &total)
    free(ra)
    free(rb)
    free_ctx(&ctx)
    return total, accepted


def descend(double complex[:, ::1] W, double[::1] vals, int kind, int k, int dloc, double scale,
            int[:, ::1] subsets, double power, double step, double tol, int max_iters,
            int sweeps_per_step, double stall):
    cdef int n = W.shape[1], accepted, sweeps = 0, at_step = 0
    cdef bint converged = False
    cdef double total
    cdef Ctx ctx = make_ctx(kind, k, n, dloc, scale, power, subsets)
    cdef double complex* ra = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rb = <double complex*> malloc(n * sizeof(double complex))
    with nogil:
        while sweeps < max_iters:
            accepted = sweep_c(W, vals, &ctx, step, True, ra, rb, &total)
            sweeps += 1
            at_step += 1
            if accepted == 0 or total < stall or at_step >= sweeps_per_step:
                step *= 0.5
                at_step = 0
                if step < tol:
                    converged = True
                    break
    free(ra)
    free(rb)
    free_ctx(&ctx)
    return sweeps, converged
