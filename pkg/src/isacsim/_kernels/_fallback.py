"""Pure-numpy implementations of the hot kernels.

These are the reference semantics; the compiled extension in ``_core.pyx``
must match them bit-for-bit up to floating-point associativity.
"""

import numpy as np


def accumulate_echo(cube, pulse, start_bin, amplitude, packet_phases):
    """Add one scatterer echo into a fast-time x slow-time data cube in place.

    cube[n, p] += amplitude * packet_phases[p] * pulse[n - start_bin] for the
    part of the pulse that lands inside the cube.  Samples that would fall
    past the end of the fast-time axis are dropped (delay beyond one PRI is
    handled by the caller).
    """
    n_fast = cube.shape[0]
    if start_bin >= n_fast or start_bin < 0:
        return
    stop = min(start_bin + pulse.shape[0], n_fast)
    seg = pulse[: stop - start_bin]
    cube[start_bin:stop, :] += np.multiply.outer(seg, amplitude * packet_phases)


def music_spectrum(projector, freqs, pri):
    """Pseudo-spectrum 1 / (e^H @ projector @ e) on a Doppler frequency grid.

    ``projector`` is the PxP noise-subspace projector; the probe vector for
    frequency f is e[p] = exp(+2j*pi*f*p*pri).  Returns a real, positive
    array, one value per grid frequency.
    """
    p = projector.shape[0]
    steps = np.arange(p)
    # E: P x F probe matrix
    E = np.exp(2j * np.pi * np.multiply.outer(steps * pri, freqs))
    denom = np.einsum("pf,pq,qf->f", E.conj(), projector, E).real
    return 1.0 / np.maximum(denom, 1e-300)


def jacobi_eigh(h, tol_scale=1e-10, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue, with
    eigenvectors in columns.  Convergence is declared when the off-diagonal
    Frobenius norm drops below ``tol_scale * max(1, ||h||_F)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("jacobi_eigh expects a square matrix")
    v = np.eye(n, dtype=complex)
    tol = tol_scale * max(1.0, np.linalg.norm(a))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # unitary 2x2 rotation diagonalizing [[app, apq], [apq*, aqq]]
                phase = apq / abs(apq)
                theta = 0.5 * np.arctan2(2.0 * abs(apq), app - aqq)
                c = np.cos(theta)
                s = np.sin(theta) * phase
                rot_p = c * a[:, p] + np.conj(s) * a[:, q]
                rot_q = -s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] + s * a[q, :]
                rot_q = -np.conj(s) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] + np.conj(s) * v[:, q]
                rot_q = -s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    w = np.diag(a).real.copy()
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]
