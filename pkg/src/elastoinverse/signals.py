"""Load signals, the analytic rod benchmark and synthetic noise.

The clamped-at-one-end / loaded-at-the-other plate has no transverse
variation, so its exact response equals the fixed-free rod's: modes
``cos((2k-1) pi x / 2)`` with natural frequencies ``(2k-1) pi c / 2``.
The modal series here is the reference the boundary-element forward
solution is judged against.

Measurement noise follows the bounded model
``d*_j = c_j + pct * amp * (gamma_j - 0.5)`` with ``gamma_j`` i.i.d.
uniform on [0, 1]; every sample deviates by at most half the noise
band. Streams come from numpy's PCG64 generator keyed by
``SeedSequence([seed, channel])`` so runs are reproducible across
platforms and channels stay independent. A zero-mean Gaussian variant
(standard deviation ``pct * amp``) is available but unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HEAVISIDE = "heaviside"
PERIODIC = "periodic"
#: Identically-zero load, for homogeneous pipeline checks.
ZERO = "zero"


@dataclass(frozen=True)
class LoadSignal:
    """Edge traction history: a step of height ``amplitude`` at t = 0,
    ``amplitude * sin(omega t)``, or identically zero."""

    kind: str
    amplitude: float = 1.0
    omega: float | None = None

    def __post_init__(self):
        if self.kind not in (HEAVISIDE, PERIODIC, ZERO):
            raise ValueError(f"unknown load kind {self.kind!r}")
        if self.kind != ZERO and self.amplitude <= 0:
            raise ValueError("load amplitude must be positive")
        if self.kind == PERIODIC and (self.omega is None or self.omega <= 0):
            raise ValueError("periodic load needs a positive angular frequency")

    def sample(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == ZERO:
            return np.zeros_like(t)
        if self.kind == HEAVISIDE:
            return self.amplitude * (t >= 0.0).astype(float)
        return self.amplitude * np.sin(self.omega * t)


def analytic_rod_response(
    x1: float,
    t: np.ndarray | float,
    load: LoadSignal,
    c: float = 1.0,
    n_modes: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Displacement and velocity of the fixed-free rod at ``x1``.

    The rod satisfies ``u_tt = c^2 u_xx`` on (0, 1) with ``u(1) = 0``,
    ``u_x(0, t) = -P(t)`` and rest initial conditions. Solution by modal
    series; the quasi-static part ``P(t) (1 - x1)`` is carried
    separately so only the transient is truncated at ``n_modes``.

    Returns a ``(displacement, velocity)`` pair with the shape of ``t``.
    """
    t_in = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t_in).ravel()  # (M,)
    ks = np.arange(1, n_modes + 1)
    lam = (2 * ks - 1) * np.pi / 2.0  # (K,)
    omega_k = c * lam
    b_k = 2.0 / lam**2
    phi = np.cos(lam * x1)  # (K,)
    p0 = load.amplitude
    kt = np.outer(omega_k, tt)  # (K, M)

    if load.kind == HEAVISIDE:
        u = p0 * (1.0 - x1) - p0 * (b_k * phi) @ np.cos(kt)
        v = p0 * (b_k * omega_k * phi) @ np.sin(kt)
    else:
        w = load.omega
        detune = omega_k**2 - w**2
        if np.min(np.abs(detune)) < 1e-9 * w**2:
            raise ValueError("load frequency resonates with a rod mode")
        sin_wt, cos_wt = np.sin(w * tt), np.cos(w * tt)
        # Modal response to forcing b_k P0 w^2 sin(w t) from rest:
        # v_k = P0 b_k w (w sin wt - omega_k sin omega_k t) / detune.
        coef = p0 * b_k * w / detune * phi  # (K,)
        u = p0 * sin_wt * (1.0 - x1) + coef @ (
            w * sin_wt[None, :] - omega_k[:, None] * np.sin(kt)
        )
        v = p0 * w * cos_wt * (1.0 - x1) + coef @ (
            w**2 * cos_wt[None, :] - (omega_k**2)[:, None] * np.cos(kt)
        )

    u = u.reshape(t_in.shape) if t_in.ndim else float(u[0])
    v = v.reshape(t_in.shape) if t_in.ndim else float(v[0])
    return u, v


def add_noise(
    exact: np.ndarray,
    noise_pct: float,
    amplitude: float | None = None,
    seed: int | np.random.SeedSequence | np.random.Generator = 0,
    distribution: str = "uniform",
) -> np.ndarray:
    """Contaminate a series with amplitude-scaled random noise.

    ``uniform`` (the default) draws ``gamma`` on [0, 1] and adds
    ``noise_pct * amplitude * (gamma - 0.5)``, so the perturbation is
    bounded by half the band. ``normal`` adds zero-mean Gaussian noise
    with standard deviation ``noise_pct * amplitude``. With
    ``amplitude=None`` the series' own peak magnitude is used.
    """
    exact = np.asarray(exact, dtype=float)
    if noise_pct < 0:
        raise ValueError("noise percentage must be nonnegative")
    if noise_pct == 0:
        return exact.copy()
    if amplitude is None:
        amplitude = float(np.max(np.abs(exact)))
    if amplitude <= 0:
        raise ValueError("noise amplitude must be positive")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if distribution == "uniform":
        eps = noise_pct * amplitude * (rng.random(exact.shape) - 0.5)
    elif distribution == "normal":
        eps = noise_pct * amplitude * rng.standard_normal(exact.shape)
    else:
        raise ValueError(f"unknown noise distribution {distribution!r}")
    return exact + eps


def channel_stream(seed: int, channel: int) -> np.random.Generator:
    """Deterministic per-channel PCG64 stream for a run seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(channel)]))
