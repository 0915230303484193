# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: echo accumulation, MUSIC grid scan, Jacobi eigensolver.

Semantics mirror ``_fallback.py``; that module is the reference.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt

cnp.import_array()


def accumulate_echo(cnp.complex128_t[:, ::1] cube,
                    cnp.complex128_t[::1] pulse,
                    Py_ssize_t start_bin,
                    double complex amplitude,
                    cnp.complex128_t[::1] packet_phases):
    cdef Py_ssize_t n_fast = cube.shape[0]
    cdef Py_ssize_t n_pkt = cube.shape[1]
    cdef Py_ssize_t m, p, stop
    cdef double complex w
    if start_bin >= n_fast or start_bin < 0:
        return
    stop = pulse.shape[0]
    if start_bin + stop > n_fast:
        stop = n_fast - start_bin
    for p in range(n_pkt):
        w = amplitude * packet_phases[p]
        for m in range(stop):
            cube[start_bin + m, p] = cube[start_bin + m, p] + w * pulse[m]


def music_spectrum(cnp.complex128_t[:, ::1] projector,
                   cnp.float64_t[::1] freqs,
                   double pri):
    cdef Py_ssize_t p = projector.shape[0]
    cdef Py_ssize_t nf = freqs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nf)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] e_buf = np.empty(p, dtype=complex)
    cdef cnp.complex128_t[::1] e = e_buf
    cdef Py_ssize_t i, r, c
    cdef double ang, denom
    cdef double complex acc, row
    for i in range(nf):
        for r in range(p):
            ang = 2.0 * 3.141592653589793 * freqs[i] * r * pri
            e[r] = cos(ang) + 1j * sin(ang)
        denom = 0.0
        for r in range(p):
            row = 0.0
            for c in range(p):
                row = row + projector[r, c] * e[c]
            acc = e[r].conjugate() * row
            denom = denom + acc.real
        if denom < 1e-300:
            denom = 1e-300
        out[i] = 1.0 / denom
    return out


def jacobi_eigh(h, double tol_scale=1e-10, int max_sweeps=60):
    a_arr = np.array(h, dtype=complex)
    cdef Py_ssize_t n = a_arr.shape[0]
    if a_arr.shape[0] != a_arr.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    v_arr = np.eye(n, dtype=complex)
    cdef cnp.complex128_t[:, ::1] a = a_arr
    cdef cnp.complex128_t[:, ::1] v = v_arr
    cdef double tol = np.linalg.norm(a_arr)
    if tol < 1.0:
        tol = 1.0
    tol *= tol_scale
    cdef Py_ssize_t sweep, p, q, k
    cdef double off, app, aqq, theta, c, mag
    cdef double complex apq, s, phase, rp, rq
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += (a[p, q].real * a[p, q].real
                            + a[p, q].imag * a[p, q].imag)
        if sqrt(off) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if mag == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / mag
                theta = 0.5 * atan2(2.0 * mag, app - aqq)
                c = cos(theta)
                s = sin(theta) * phase
                for k in range(n):
                    rp = c * a[k, p] + s.conjugate() * a[k, q]
                    rq = -s * a[k, p] + c * a[k, q]
                    a[k, p] = rp
                    a[k, q] = rq
                for k in range(n):
                    rp = c * a[p, k] + s * a[q, k]
                    rq = -s.conjugate() * a[p, k] + c * a[q, k]
                    a[p, k] = rp
                    a[q, k] = rq
                for k in range(n):
                    rp = c * v[k, p] + s.conjugate() * v[k, q]
                    rq = -s * v[k, p] + c * v[k, q]
                    v[k, p] = rp
                    v[k, q] = rq
    w = np.diag(a_arr).real.copy()
    order = np.argsort(w)[::-1]
    return w[order], v_arr[:, order]
