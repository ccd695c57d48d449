# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _kernels_py.xi_block_integrals (see there for the math).

Kept free of numpy C-API usage (typed memoryviews only) so the build needs
nothing beyond Cython and a C compiler.
"""
from libc.math cimport exp, expm1, log, log1p, sqrt

import numpy as np


def xi_block_integrals(double z, double[::1] u, double[::1] s, double[::1] inv_eps,
                       bint is_ideal, double[::1] nodes, double[::1] weights):
    cdef Py_ssize_t nu = u.shape[0]
    cdef Py_ssize_t nt = nodes.shape[0]
    out_np = np.empty((nu, 2, 4))
    cdef double[:, :, ::1] out = out_np
    cdef double inv2z = 0.5 / z
    cdef Py_ssize_t i, j
    cdef int ip
    cdef double t, w, y, y2, y3, y4, eny, base, kap, kapm, r, r2, x, omx, g, lnv
    cdef double acc_e, acc_p, acc_p1, acc_p2

    with nogil:
        for i in range(nu):
            for ip in range(2):
                acc_e = 0.0
                acc_p = 0.0
                acc_p1 = 0.0
                acc_p2 = 0.0
                for j in range(nt):
                    t = nodes[j]
                    w = weights[j]
                    y = u[i] + t
                    kap = y * inv2z
                    eny = exp(-y)
                    base = -expm1(-y)
                    if is_ideal:
                        r2 = 1.0
                    else:
                        kapm = sqrt(kap * kap + s[i])
                        if ip == 0:
                            if s[i] == 0.0:
                                r2 = 0.0  # exact TE zero-frequency limit
                            else:
                                r = (kap - kapm) / (kap + kapm)
                                r2 = r * r
                        else:
                            r = (kap - inv_eps[i] * kapm) / (kap + inv_eps[i] * kapm)
                            r2 = r * r
                    x = r2 * eny
                    omx = base + (1.0 - r2) * eny
                    lnv = log1p(-x) if x < 0.5 else log(omx)
                    g = x / omx
                    y2 = y * y
                    y3 = y2 * y
                    y4 = y2 * y2
                    acc_e += w * y * lnv
                    acc_p += w * y2 * g
                    acc_p1 += w * y3 * g / omx
                    acc_p2 += w * y4 * g * (1.0 + x) / (omx * omx)
                out[i, ip, 0] = acc_e
                out[i, ip, 1] = acc_p
                out[i, ip, 2] = acc_p1
                out[i, ip, 3] = acc_p2
    return out_np
