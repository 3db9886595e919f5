"""Compiled inner loop of the fixed-step RK4 density-matrix integrator."""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _lindblad_rhs(rho, d, u, v, g2, g3, out):
    # H is non-zero only at (0,0)=d, (0,1)=u, (0,2)=v and the conjugate
    # partners, so -i[H, rho] is spelled out element by element.
    uc = np.conj(u)
    vc = np.conj(v)
    r00, r01, r02 = rho[0, 0], rho[0, 1], rho[0, 2]
    r10, r11, r12 = rho[1, 0], rho[1, 1], rho[1, 2]
    r20, r21, r22 = rho[2, 0], rho[2, 1], rho[2, 2]
    hr00 = d * r00 + u * r10 + v * r20
    hr01 = d * r01 + u * r11 + v * r21
    hr02 = d * r02 + u * r12 + v * r22
    rh00 = r00 * d + r01 * uc + r02 * vc
    rh10 = r10 * d + r11 * uc + r12 * vc
    rh20 = r20 * d + r21 * uc + r22 * vc
    half = 0.5 * (g2 + g3)
    out[0, 0] = -1j * (hr00 - rh00) - 2.0 * half * r00
    out[0, 1] = -1j * (hr01 - r00 * u) - half * r01
    out[0, 2] = -1j * (hr02 - r00 * v) - half * r02
    out[1, 0] = -1j * (uc * r00 - rh10) - half * r10
    out[1, 1] = -1j * (uc * r01 - r10 * u) + g2 * r00
    out[1, 2] = -1j * (uc * r02 - r10 * v)
    out[2, 0] = -1j * (vc * r00 - rh20) - half * r20
    out[2, 1] = -1j * (vc * r01 - r20 * u)
    out[2, 2] = -1j * (vc * r02 - r20 * v) + g3 * r00


@njit(cache=True)
def rk4_chunk(rho, env_p, env_s, cp, cs, delta, g2, g3, dt, n_steps,
              save_every, step_offset, saved, trace_tol):
    """Advance ``rho`` in place by ``n_steps`` RK4 steps.

    ``env_p``/``env_s`` hold the envelope values at the half-step times of
    the chunk (length ``2 * n_steps + 1``). States whose global step index
    is a multiple of ``save_every`` are copied to ``saved``. Returns
    ``(n_saved, failed_step)`` where ``failed_step`` is -1 on success.
    """
    k1 = np.empty((3, 3), dtype=np.complex128)
    k2 = np.empty((3, 3), dtype=np.complex128)
    k3 = np.empty((3, 3), dtype=np.complex128)
    k4 = np.empty((3, 3), dtype=np.complex128)
    tmp = np.empty((3, 3), dtype=np.complex128)
    d = -delta + 0j
    n_saved = 0
    half = 0.5 * dt
    sixth = dt / 6.0
    for n in range(n_steps):
        # <1|H|2> = -cs * control(t), <1|H|3> = -cp * probe(t)
        u0, v0 = -cs * env_s[2 * n], -cp * env_p[2 * n]
        u1, v1 = -cs * env_s[2 * n + 1], -cp * env_p[2 * n + 1]
        u2, v2 = -cs * env_s[2 * n + 2], -cp * env_p[2 * n + 2]
        _lindblad_rhs(rho, d, u0, v0, g2, g3, k1)
        for a in range(3):
            for b in range(3):
                tmp[a, b] = rho[a, b] + half * k1[a, b]
        _lindblad_rhs(tmp, d, u1, v1, g2, g3, k2)
        for a in range(3):
            for b in range(3):
                tmp[a, b] = rho[a, b] + half * k2[a, b]
        _lindblad_rhs(tmp, d, u1, v1, g2, g3, k3)
        for a in range(3):
            for b in range(3):
                tmp[a, b] = rho[a, b] + dt * k3[a, b]
        _lindblad_rhs(tmp, d, u2, v2, g2, g3, k4)
        for a in range(3):
            for b in range(3):
                rho[a, b] += sixth * (k1[a, b] + 2.0 * k2[a, b] + 2.0 * k3[a, b] + k4[a, b])
        tr = rho[0, 0].real + rho[1, 1].real + rho[2, 2].real
        if not abs(tr - 1.0) <= trace_tol:
            return n_saved, n
        if (step_offset + n + 1) % save_every == 0:
            for a in range(3):
                for b in range(3):
                    saved[n_saved, a, b] = rho[a, b]
            n_saved += 1
    return n_saved, -1
