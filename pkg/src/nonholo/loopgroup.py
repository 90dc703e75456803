"""Spin chains and vortex filaments on the circle.

A spin field is a loop of unit vectors in R^3 evolving by L_t = L x L'';
a closed arclength-parametrized curve evolves by the filament (binormal)
flow gamma_t = gamma' x gamma''.  The Gauss map L = gamma' intertwines the
two, which doubles as a cross-validation between the solvers.
"""

import numpy as np

from nonholo.errors import NonFinite
from nonholo.numkit import Stepper, integrate, spectral_derivative
from nonholo.trajectory import Trajectory

TWO_PI = 2.0 * np.pi


def _check_loop(F, name):
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3)")
    if not np.all(np.isfinite(F)):
        raise NonFinite(f"{name} contains non-finite entries")
    return F


def unit_norm_deviation(L):
    """Worst deviation of node norms from 1."""
    return float(np.max(np.abs(np.linalg.norm(L, axis=1) - 1.0)))


def ll_rhs(L):
    """L x L'' with the spectral second derivative along the loop."""
    L = _check_loop(L, "spin field")
    L2 = spectral_derivative(L, order=2, length=TWO_PI, axis=0)
    return np.cross(L, L2)


def spin_energy(L):
    """H = 1/2 integral |L'|^2 dtheta."""
    Lp = spectral_derivative(L, order=1, length=TWO_PI, axis=0)
    return 0.5 * float(np.sum(Lp * Lp)) * TWO_PI / len(L)


def spin_momentum(L):
    """integral L dtheta (a conserved 3-vector)."""
    return np.sum(L, axis=0) * TWO_PI / len(L)


def magnon(n, k, eps, t=0.0):
    """Single-harmonic precessing solution with frequency k^2 cos(eps)."""
    theta = np.arange(n) * TWO_PI / n
    omega = k * k * np.cos(eps)
    phase = k * theta - omega * t
    return np.column_stack(
        [np.sin(eps) * np.cos(phase), np.sin(eps) * np.sin(phase), np.full(n, np.cos(eps))]
    )


def integrate_ll(L0, t_span, stepper, renormalize=False, record_every=1):
    """Integrate the spin flow; ledger tracks energy, momentum, unit norms."""
    L0 = _check_loop(L0, "spin field")
    n = len(L0)

    def rhs(t, y):
        return ll_rhs(y.reshape(n, 3)).ravel()

    if renormalize:
        times = [float(t_span[0])]
        frames = [L0.copy()]
        y = L0.copy()
        t = float(t_span[0])
        from nonholo.numkit import step

        k = 0
        while t < t_span[1] - 1e-12 * max(1.0, abs(t_span[1])):
            t, yflat, _ = step(rhs, t, y.ravel(), stepper)
            y = yflat.reshape(n, 3)
            y /= np.linalg.norm(y, axis=1)[:, None]
            k += 1
            if k % record_every == 0 or t >= t_span[1] - 1e-12:
                times.append(t)
                frames.append(y.copy())
        times = np.array(times)
        states = np.array([f.ravel() for f in frames])
    else:
        times, states = integrate(
            rhs, L0.ravel(), t_span, stepper, record_every=record_every
        )
    loops = states.reshape(len(times), n, 3)
    ledger = {
        "energy": np.array([spin_energy(L) for L in loops]),
        "norm_dev": np.array([unit_norm_deviation(L) for L in loops]),
    }
    mom = np.array([spin_momentum(L) for L in loops])
    for i, name in enumerate(["mom_x", "mom_y", "mom_z"]):
        ledger[name] = mom[:, i]
    cols = [f"{ax}_{j}" for j in range(n) for ax in ("Lx", "Ly", "Lz")]
    return Trajectory(
        times=times,
        columns=cols,
        states=states,
        ledger=ledger,
        meta={"system": "spin-chain", "n": n, "renormalize": renormalize},
    )


# ---------------------------------------------------------------------------
# closed curves


def circle_curve(n, r=1.0):
    theta = np.arange(n) * TWO_PI / n
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), np.zeros(n)])


def binormal_rhs(gamma, length=TWO_PI):
    """gamma' x gamma'' for an arclength-scaled parametrization."""
    gamma = _check_loop(gamma, "curve")
    g1 = spectral_derivative(gamma, order=1, length=length, axis=0)
    g2 = spectral_derivative(gamma, order=2, length=length, axis=0)
    return np.cross(g1, g2)


def curve_length(gamma, length=TWO_PI):
    g1 = spectral_derivative(gamma, order=1, length=length, axis=0)
    return float(np.sum(np.linalg.norm(g1, axis=1))) * length / len(gamma)


def integrate_binormal(gamma0, t_span, stepper, length=TWO_PI, record_every=1):
    gamma0 = _check_loop(gamma0, "curve")
    n = len(gamma0)

    def rhs(t, y):
        return binormal_rhs(y.reshape(n, 3), length).ravel()

    times, states = integrate(rhs, gamma0.ravel(), t_span, stepper, record_every=record_every)
    loops = states.reshape(len(times), n, 3)
    ledger = {"length": np.array([curve_length(g, length) for g in loops])}
    cols = [f"{ax}_{j}" for j in range(n) for ax in ("x", "y", "z")]
    return Trajectory(
        times=times,
        columns=cols,
        states=states,
        ledger=ledger,
        meta={"system": "filament", "n": n},
    )


def gauss_map_consistency(gamma0, t_span, stepper, length=TWO_PI, record_every=1):
    """Evolve gamma by the filament flow and L0 = gamma' by the spin flow.

    Returns the sup over recorded times of || gamma'(t) - L(t) ||_inf.  The
    curve is rescaled so the loop parameter runs over [0, 2 pi) for both
    flows; arclength parametrization makes gamma' a unit field.
    """
    gamma0 = _check_loop(gamma0, "curve")
    n = len(gamma0)
    scale = length / TWO_PI
    g0 = gamma0 / scale  # now parametrized over [0, 2 pi) by "arclength/scale"
    L0 = spectral_derivative(g0, order=1, length=TWO_PI, axis=0)

    tr_c = integrate_binormal(g0, t_span, stepper, TWO_PI, record_every)
    tr_s = integrate_ll(L0, t_span, stepper, renormalize=False, record_every=record_every)
    worst = 0.0
    for row_c, row_s in zip(tr_c.states, tr_s.states):
        gp = spectral_derivative(row_c.reshape(n, 3), order=1, length=TWO_PI, axis=0)
        worst = max(worst, float(np.max(np.abs(gp - row_s.reshape(n, 3)))))
    return worst
