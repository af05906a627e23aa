"""Pure-Python fallback for the hot kernels.

Mirrors the compiled extension `_core` function for function; selected by
`backend` when the extension is unavailable (or forced via
DIRAC_NODAL_BACKEND=pure).  Same arguments, same numerics, just slower.
"""

from __future__ import annotations

from math import cos, sin


def march(lam, h, n_steps, s_out, y1_0, y2_0,
          p_tab, r_tab, ux_tab, vt_tab, w_comp, src_comp,
          phi1_out, phi2_out, acc_out):
    """Fixed-step RK4 march of the augmented system on precomputed stage tables.

    State is (phi1, phi2, A_0..A_{R-1}) where A_r accumulates the integral of
    t-factor * source-component for separable pair r; the memory integral at x
    is then the sum of x-factor(x)*A_r(x).  Tables hold coefficient values at
    all stage abscissae (spacing h/2).  Every s_out-th step lands on the
    output grid; phi and accumulator snapshots are recorded there.
    """
    p = p_tab.tolist()
    r = r_tab.tolist()
    ux = [row.tolist() for row in ux_tab]
    vt = [row.tolist() for row in vt_tab]
    wc = w_comp.tolist()
    sc = src_comp.tolist()
    R = len(ux)
    pairs = list(range(R))
    A = [0.0] * R
    y1 = float(y1_0)
    y2 = float(y2_0)
    hh = 0.5 * h
    h6 = h / 6.0

    phi1_out[0] = y1
    phi2_out[0] = y2
    for k in pairs:
        acc_out[0, k] = 0.0

    for i in range(n_steps):
        q = 2 * i
        # stage 1 at q
        w1 = w2 = 0.0
        for k in pairs:
            if wc[k] == 0:
                w1 += ux[k][q] * A[k]
            else:
                w2 += ux[k][q] * A[k]
        a1 = (r[q] - lam) * y2 + w2
        a2 = (lam - p[q]) * y1 - w1
        d1 = [vt[k][q] * (y1 if sc[k] == 0 else y2) for k in pairs]
        # stage 2 at q+1
        t1 = y1 + hh * a1
        t2 = y2 + hh * a2
        at = [A[k] + hh * d1[k] for k in pairs]
        w1 = w2 = 0.0
        for k in pairs:
            if wc[k] == 0:
                w1 += ux[k][q + 1] * at[k]
            else:
                w2 += ux[k][q + 1] * at[k]
        b1 = (r[q + 1] - lam) * t2 + w2
        b2 = (lam - p[q + 1]) * t1 - w1
        d2 = [vt[k][q + 1] * (t1 if sc[k] == 0 else t2) for k in pairs]
        # stage 3 at q+1
        t1 = y1 + hh * b1
        t2 = y2 + hh * b2
        at = [A[k] + hh * d2[k] for k in pairs]
        w1 = w2 = 0.0
        for k in pairs:
            if wc[k] == 0:
                w1 += ux[k][q + 1] * at[k]
            else:
                w2 += ux[k][q + 1] * at[k]
        c1 = (r[q + 1] - lam) * t2 + w2
        c2 = (lam - p[q + 1]) * t1 - w1
        d3 = [vt[k][q + 1] * (t1 if sc[k] == 0 else t2) for k in pairs]
        # stage 4 at q+2
        t1 = y1 + h * c1
        t2 = y2 + h * c2
        at = [A[k] + h * d3[k] for k in pairs]
        w1 = w2 = 0.0
        for k in pairs:
            if wc[k] == 0:
                w1 += ux[k][q + 2] * at[k]
            else:
                w2 += ux[k][q + 2] * at[k]
        e1 = (r[q + 2] - lam) * t2 + w2
        e2 = (lam - p[q + 2]) * t1 - w1
        d4 = [vt[k][q + 2] * (t1 if sc[k] == 0 else t2) for k in pairs]

        y1 += h6 * (a1 + 2.0 * (b1 + c1) + e1)
        y2 += h6 * (a2 + 2.0 * (b2 + c2) + e2)
        for k in pairs:
            A[k] += h6 * (d1[k] + 2.0 * (d2[k] + d3[k]) + d4[k])

        if (i + 1) % s_out == 0:
            oi = (i + 1) // s_out
            phi1_out[oi] = y1
            phi2_out[oi] = y2
            for k in pairs:
                acc_out[oi, k] = A[k]


def _series(kinds, coeffs, freqs, lo, hi, x):
    acc = 0.0
    for i in range(lo, hi):
        kind = kinds[i]
        if kind == 0:
            acc += coeffs[i] * x ** freqs[i]
        elif kind == 1:
            acc += coeffs[i] * cos(freqs[i] * x)
        else:
            acc += coeffs[i] * sin(freqs[i] * x)
    return acc


def segment_phi1(lam, mass, x0, y1_in, y2_in, acc_in, x1, n_sub,
                 vkinds, vcoeffs, vfreqs,
                 ukinds, ucoeffs, ufreqs, uoff,
                 tkinds, tcoeffs, tfreqs, toff,
                 w_comp, src_comp):
    """Integrate from a stored state at x0 to x1 with n_sub RK4 substeps.

    Coefficients are evaluated analytically at the substep abscissae, so this
    acts as dense output for node refinement between stored grid points.
    Returns phi1(x1).
    """
    vk = vkinds.tolist(); vc = vcoeffs.tolist(); vf = vfreqs.tolist()
    uk = ukinds.tolist(); uc = ucoeffs.tolist(); uf = ufreqs.tolist()
    tk = tkinds.tolist(); tc = tcoeffs.tolist(); tf = tfreqs.tolist()
    uo = uoff.tolist(); to = toff.tolist()
    wc = w_comp.tolist(); sc = src_comp.tolist()
    R = len(wc)
    pairs = list(range(R))
    nv = len(vk)

    def rhs(x, y1, y2, A):
        v = _series(vk, vc, vf, 0, nv, x)
        w1 = w2 = 0.0
        for k in pairs:
            u = _series(uk, uc, uf, uo[k], uo[k + 1], x)
            if wc[k] == 0:
                w1 += u * A[k]
            else:
                w2 += u * A[k]
        dy1 = (v - mass - lam) * y2 + w2
        dy2 = (lam - v - mass) * y1 - w1
        dA = [_series(tk, tc, tf, to[k], to[k + 1], x) * (y1 if sc[k] == 0 else y2)
              for k in pairs]
        return dy1, dy2, dA

    h = (x1 - x0) / n_sub
    hh = 0.5 * h
    h6 = h / 6.0
    y1 = float(y1_in)
    y2 = float(y2_in)
    A = [float(a) for a in acc_in]
    x = x0
    for _ in range(n_sub):
        a1, a2, da = rhs(x, y1, y2, A)
        b1, b2, db = rhs(x + hh, y1 + hh * a1, y2 + hh * a2,
                         [A[k] + hh * da[k] for k in pairs])
        c1, c2, dc = rhs(x + hh, y1 + hh * b1, y2 + hh * b2,
                         [A[k] + hh * db[k] for k in pairs])
        e1, e2, de = rhs(x + h, y1 + h * c1, y2 + h * c2,
                         [A[k] + h * dc[k] for k in pairs])
        y1 += h6 * (a1 + 2.0 * (b1 + c1) + e1)
        y2 += h6 * (a2 + 2.0 * (b2 + c2) + e2)
        for k in pairs:
            A[k] += h6 * (da[k] + 2.0 * (db[k] + dc[k]) + de[k])
        x += h
    return y1
