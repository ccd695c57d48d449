"""NumPy reference implementation of the quadrature kernel.

Evaluates, for a block of imaginary frequencies, the four scaled transverse
integrals that the Lifshitz engine combines into free energy, pressure and
its first two distance derivatives. The compiled extension implements the
same contract; results may differ at the accumulation-rounding level only.

Variable conventions (y = 2 kappa z, u = 2 xi z / c, t = y - u):
    kappa   = y / (2 z)
    kappa_m = sqrt(kappa^2 + s),    s = (eps - 1) xi^2 / c^2
    r_te    = (kappa - kappa_m) / (kappa + kappa_m)
    r_tm    = (kappa - inv_eps kappa_m) / (kappa + inv_eps kappa_m)
    x       = r^2 exp(-y)
Kernel rows per polarization:
    0:  y   ln(1 - x)
    1:  y^2 x / (1 - x)
    2:  y^3 x / (1 - x)^2
    3:  y^4 x (1 + x) / (1 - x)^3
"""
from __future__ import annotations

import numpy as np


def xi_block_integrals(z, u, s, inv_eps, is_ideal, nodes, weights):
    """Integrate the kernel rows for each frequency in the block.

    Parameters are plain arrays: u, s, inv_eps have one entry per frequency
    (ignored when is_ideal); nodes/weights define the t-grid on [0, T_MAX].
    Returns shape (len(u), 2, 4) with axis 1 = (TE, TM).
    """
    u = np.asarray(u, dtype=float)[:, None]
    t = np.asarray(nodes, dtype=float)[None, :]
    w = np.asarray(weights, dtype=float)[None, :]
    y = u + t
    kap = y * (0.5 / z)
    eny = np.exp(-y)
    base = -np.expm1(-y)  # 1 - exp(-y), no cancellation
    y2 = y * y
    y3 = y2 * y
    y4 = y2 * y2

    if is_ideal:
        r2_te = np.ones_like(y)
        r2_tm = r2_te
    else:
        s_col = np.asarray(s, dtype=float)[:, None]
        ie_col = np.asarray(inv_eps, dtype=float)[:, None]
        kapm = np.sqrt(kap * kap + s_col)
        r_te = (kap - kapm) / (kap + kapm)
        # s == 0 marks the metallic zero-frequency limit where kappa_m == kappa
        # exactly; force the TE coefficient to its analytic zero so that the
        # contribution vanishes bitwise rather than to rounding level.
        r_te = np.where(s_col == 0.0, 0.0, r_te)
        r_tm = (kap - ie_col * kapm) / (kap + ie_col * kapm)
        r2_te = r_te * r_te
        r2_tm = r_tm * r_tm

    out = np.empty((u.shape[0], 2, 4))
    for ip, r2 in ((0, r2_te), (1, r2_tm)):
        x = r2 * eny
        omx = base + (1.0 - r2) * eny  # 1 - x, stable for x -> 1
        ln1mx = np.where(x < 0.5, np.log1p(-x), np.log(omx))
        g = x / omx
        out[:, ip, 0] = (y * ln1mx * w).sum(axis=1)
        out[:, ip, 1] = (y2 * g * w).sum(axis=1)
        out[:, ip, 2] = (y3 * g / omx * w).sum(axis=1)
        out[:, ip, 3] = (y4 * g * (1.0 + x) / (omx * omx) * w).sum(axis=1)
    return out
