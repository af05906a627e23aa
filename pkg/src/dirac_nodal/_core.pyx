# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: the RK4 trajectory march and dense-output segments.

Twin of `_purepy`; see that module for the reference semantics.
"""

from libc.math cimport cos, sin, pow

import numpy as np


def march(double lam, double h, Py_ssize_t n_steps, Py_ssize_t s_out,
          double y1_0, double y2_0,
          double[::1] p_tab, double[::1] r_tab,
          double[:, ::1] ux_tab, double[:, ::1] vt_tab,
          int[::1] w_comp, int[::1] src_comp,
          double[::1] phi1_out, double[::1] phi2_out,
          double[:, ::1] acc_out):
    cdef Py_ssize_t R = ux_tab.shape[0]
    cdef Py_ssize_t cap = R if R > 0 else 1
    scratch = np.zeros((6, cap))
    cdef double[:, ::1] sc_mv = scratch
    cdef double[::1] A = sc_mv[0]
    cdef double[::1] at = sc_mv[1]
    cdef double[::1] d1 = sc_mv[2]
    cdef double[::1] d2 = sc_mv[3]
    cdef double[::1] d3 = sc_mv[4]
    cdef double[::1] d4 = sc_mv[5]
    cdef double y1 = y1_0, y2 = y2_0
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef double a1, a2, b1, b2, c1, c2, e1, e2, w1, w2, t1, t2
    cdef Py_ssize_t i, q, k, oi

    phi1_out[0] = y1
    phi2_out[0] = y2
    for k in range(R):
        acc_out[0, k] = 0.0

    with nogil:
        for i in range(n_steps):
            q = 2 * i
            # stage 1 at q
            w1 = 0.0; w2 = 0.0
            for k in range(R):
                if w_comp[k] == 0:
                    w1 += ux_tab[k, q] * A[k]
                else:
                    w2 += ux_tab[k, q] * A[k]
            a1 = (r_tab[q] - lam) * y2 + w2
            a2 = (lam - p_tab[q]) * y1 - w1
            for k in range(R):
                d1[k] = vt_tab[k, q] * (y1 if src_comp[k] == 0 else y2)
            # stage 2 at q+1
            t1 = y1 + hh * a1; t2 = y2 + hh * a2
            w1 = 0.0; w2 = 0.0
            for k in range(R):
                at[k] = A[k] + hh * d1[k]
                if w_comp[k] == 0:
                    w1 += ux_tab[k, q + 1] * at[k]
                else:
                    w2 += ux_tab[k, q + 1] * at[k]
            b1 = (r_tab[q + 1] - lam) * t2 + w2
            b2 = (lam - p_tab[q + 1]) * t1 - w1
            for k in range(R):
                d2[k] = vt_tab[k, q + 1] * (t1 if src_comp[k] == 0 else t2)
            # stage 3 at q+1
            t1 = y1 + hh * b1; t2 = y2 + hh * b2
            w1 = 0.0; w2 = 0.0
            for k in range(R):
                at[k] = A[k] + hh * d2[k]
                if w_comp[k] == 0:
                    w1 += ux_tab[k, q + 1] * at[k]
                else:
                    w2 += ux_tab[k, q + 1] * at[k]
            c1 = (r_tab[q + 1] - lam) * t2 + w2
            c2 = (lam - p_tab[q + 1]) * t1 - w1
            for k in range(R):
                d3[k] = vt_tab[k, q + 1] * (t1 if src_comp[k] == 0 else t2)
            # stage 4 at q+2
            t1 = y1 + h * c1; t2 = y2 + h * c2
            w1 = 0.0; w2 = 0.0
            for k in range(R):
                at[k] = A[k] + h * d3[k]
                if w_comp[k] == 0:
                    w1 += ux_tab[k, q + 2] * at[k]
                else:
                    w2 += ux_tab[k, q + 2] * at[k]
            e1 = (r_tab[q + 2] - lam) * t2 + w2
            e2 = (lam - p_tab[q + 2]) * t1 - w1
            for k in range(R):
                d4[k] = vt_tab[k, q + 2] * (t1 if src_comp[k] == 0 else t2)

            y1 += h6 * (a1 + 2.0 * (b1 + c1) + e1)
            y2 += h6 * (a2 + 2.0 * (b2 + c2) + e2)
            for k in range(R):
                A[k] += h6 * (d1[k] + 2.0 * (d2[k] + d3[k]) + d4[k])

            if (i + 1) % s_out == 0:
                oi = (i + 1) // s_out
                phi1_out[oi] = y1
                phi2_out[oi] = y2
                for k in range(R):
                    acc_out[oi, k] = A[k]


cdef inline double _series(const int[::1] kinds, const double[::1] coeffs,
                           const double[::1] freqs,
                           Py_ssize_t lo, Py_ssize_t hi, double x) nogil:
    cdef Py_ssize_t i
    cdef int kind
    cdef double acc = 0.0
    for i in range(lo, hi):
        kind = kinds[i]
        if kind == 0:
            acc += coeffs[i] * pow(x, freqs[i])
        elif kind == 1:
            acc += coeffs[i] * cos(freqs[i] * x)
        else:
            acc += coeffs[i] * sin(freqs[i] * x)
    return acc


cdef void _rhs_analytic(double lam, double mass, double x,
                        double y1, double y2, double[::1] A,
                        const int[::1] vk, const double[::1] vc, const double[::1] vf,
                        const int[::1] uk, const double[::1] uc, const double[::1] uf,
                        const int[::1] uo,
                        const int[::1] tk, const double[::1] tc, const double[::1] tf,
                        const int[::1] to,
                        const int[::1] wc, const int[::1] sc, Py_ssize_t R,
                        double* dy1, double* dy2, double[::1] dA) nogil:
    cdef double v = _series(vk, vc, vf, 0, vk.shape[0], x)
    cdef double w1 = 0.0, w2 = 0.0, u
    cdef Py_ssize_t k
    for k in range(R):
        u = _series(uk, uc, uf, uo[k], uo[k + 1], x)
        if wc[k] == 0:
            w1 += u * A[k]
        else:
            w2 += u * A[k]
    dy1[0] = (v - mass - lam) * y2 + w2
    dy2[0] = (lam - v - mass) * y1 - w1
    for k in range(R):
        dA[k] = _series(tk, tc, tf, to[k], to[k + 1], x) * (y1 if sc[k] == 0 else y2)


def segment_phi1(double lam, double mass, double x0,
                 double y1_in, double y2_in, double[::1] acc_in,
                 double x1, Py_ssize_t n_sub,
                 int[::1] vkinds, double[::1] vcoeffs, double[::1] vfreqs,
                 int[::1] ukinds, double[::1] ucoeffs, double[::1] ufreqs, int[::1] uoff,
                 int[::1] tkinds, double[::1] tcoeffs, double[::1] tfreqs, int[::1] toff,
                 int[::1] w_comp, int[::1] src_comp):
    cdef Py_ssize_t R = w_comp.shape[0]
    cdef Py_ssize_t cap = R if R > 0 else 1
    scratch = np.zeros((6, cap))
    cdef double[:, ::1] sc_mv = scratch
    cdef double[::1] A = sc_mv[0]
    cdef double[::1] at = sc_mv[1]
    cdef double[::1] da = sc_mv[2]
    cdef double[::1] db = sc_mv[3]
    cdef double[::1] dc = sc_mv[4]
    cdef double[::1] de = sc_mv[5]
    cdef double y1 = y1_in, y2 = y2_in
    cdef double h = (x1 - x0) / n_sub
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef double x = x0
    cdef double a1, a2, b1, b2, c1, c2, e1, e2
    cdef Py_ssize_t k, i

    for k in range(R):
        A[k] = acc_in[k]

    with nogil:
        for i in range(n_sub):
            _rhs_analytic(lam, mass, x, y1, y2, A,
                          vkinds, vcoeffs, vfreqs, ukinds, ucoeffs, ufreqs, uoff,
                          tkinds, tcoeffs, tfreqs, toff, w_comp, src_comp, R,
                          &a1, &a2, da)
            for k in range(R):
                at[k] = A[k] + hh * da[k]
            _rhs_analytic(lam, mass, x + hh, y1 + hh * a1, y2 + hh * a2, at,
                          vkinds, vcoeffs, vfreqs, ukinds, ucoeffs, ufreqs, uoff,
                          tkinds, tcoeffs, tfreqs, toff, w_comp, src_comp, R,
                          &b1, &b2, db)
            for k in range(R):
                at[k] = A[k] + hh * db[k]
            _rhs_analytic(lam, mass, x + hh, y1 + hh * b1, y2 + hh * b2, at,
                          vkinds, vcoeffs, vfreqs, ukinds, ucoeffs, ufreqs, uoff,
                          tkinds, tcoeffs, tfreqs, toff, w_comp, src_comp, R,
                          &c1, &c2, dc)
            for k in range(R):
                at[k] = A[k] + h * dc[k]
            _rhs_analytic(lam, mass, x + h, y1 + h * c1, y2 + h * c2, at,
                          vkinds, vcoeffs, vfreqs, ukinds, ucoeffs, ufreqs, uoff,
                          tkinds, tcoeffs, tfreqs, toff, w_comp, src_comp, R,
                          &e1, &e2, de)
            y1 += h6 * (a1 + 2.0 * (b1 + c1) + e1)
            y2 += h6 * (a2 + 2.0 * (b2 + c2) + e2)
            for k in range(R):
                A[k] += h6 * (da[k] + 2.0 * (db[k] + dc[k]) + de[k])
            x += h
    return y1
