"""Independent reference implementations used only by the tests.

These deliberately avoid the library's own code paths: the rod solver
is a leapfrog finite-difference scheme, and the oscillator stepper uses
explicit trigonometric closed forms instead of matrix exponentials.
"""

from __future__ import annotations

import numpy as np


def rod_fdm(x_eval, times, load_fn, c=1.0, dx=1.0 / 2000.0, cfl=0.5):
    """Leapfrog finite differences for the fixed-free rod.

    Solves ``u_tt = c^2 u_xx`` on (0, 1) with ``u(1) = 0``,
    ``u_x(0, t) = -P(t)`` (ghost-node Neumann) and rest start. Returns
    ``(u, v)`` at ``x_eval`` sampled on ``times`` (velocity by central
    differences).
    """
    nx = int(round(1.0 / dx))
    x = np.linspace(0.0, 1.0, nx + 1)
    dt = cfl * dx / c
    t_max = float(np.max(times))
    nt = int(np.ceil(t_max / dt)) + 2
    r2 = (c * dt / dx) ** 2

    u_prev = np.zeros(nx + 1)
    # First step from rest: u(x, dt) = 0.5 dt^2 c^2 u_xx(0) + bc forcing.
    u_curr = np.zeros(nx + 1)
    p0 = load_fn(0.0)
    u_curr[0] = 0.5 * r2 * (2.0 * (u_prev[1] + dx * p0) - 2.0 * u_prev[0])
    u_hist = np.zeros(nt + 1)
    t_hist = np.zeros(nt + 1)
    u_hist[0], t_hist[0] = u_prev[x_index(x, x_eval)], 0.0
    u_hist[1], t_hist[1] = u_curr[x_index(x, x_eval)], dt

    ie = x_index(x, x_eval)
    for n in range(1, nt):
        t_n = n * dt
        p = load_fn(t_n)
        u_next = np.empty(nx + 1)
        u_next[1:-1] = (
            2.0 * u_curr[1:-1]
            - u_prev[1:-1]
            + r2 * (u_curr[2:] - 2.0 * u_curr[1:-1] + u_curr[:-2])
        )
        # Neumann end via ghost node u[-1] = u[1] + 2 dx P(t).
        u_next[0] = 2.0 * u_curr[0] - u_prev[0] + r2 * (
            2.0 * u_curr[1] + 2.0 * dx * p - 2.0 * u_curr[0]
        )
        u_next[-1] = 0.0
        u_prev, u_curr = u_curr, u_next
        u_hist[n + 1] = u_curr[ie]
        t_hist[n + 1] = (n + 1) * dt

    v_hist = np.gradient(u_hist, dt)
    u_out = np.interp(times, t_hist, u_hist)
    v_out = np.interp(times, t_hist, v_hist)
    return u_out, v_out


def x_index(x_grid, x_eval):
    return int(np.argmin(np.abs(x_grid - x_eval)))


def oscillator_step_series(omega0, load_vals, dt, u0=0.0, v0=0.0):
    """Exact response of ``u'' + omega0^2 u = f(t)`` to a sampled load.

    The load is linear inside each step: ``f = a + b s``. Per step the
    particular solution is ``(a + b s) / omega0^2`` and the homogeneous
    part is fitted to the step's initial conditions with plain
    trigonometry; no matrix operations are involved.
    """
    w2 = omega0 * omega0
    u, v = float(u0), float(v0)
    us = [u]
    vs = [v]
    for j in range(len(load_vals) - 1):
        a = float(load_vals[j])
        b = (float(load_vals[j + 1]) - a) / dt
        cc = u - a / w2
        ss = (v - b / w2) / omega0
        cos_wt, sin_wt = np.cos(omega0 * dt), np.sin(omega0 * dt)
        u = cc * cos_wt + ss * sin_wt + (a + b * dt) / w2
        v = -cc * omega0 * sin_wt + ss * omega0 * cos_wt + b / w2
        us.append(u)
        vs.append(v)
    return np.array(us), np.array(vs)


def forced_oscillator_response(omega0, omega, amp, t):
    """Closed form for ``u'' + omega0^2 u = amp sin(omega t)`` from rest."""
    t = np.asarray(t, dtype=float)
    det = omega0**2 - omega**2
    u = amp / det * (np.sin(omega * t) - (omega / omega0) * np.sin(omega0 * t))
    v = amp * omega / det * (np.cos(omega * t) - np.cos(omega0 * t))
    return u, v
