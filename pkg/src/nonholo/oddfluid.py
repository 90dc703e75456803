"""Compressible 2-D fluid with parity-breaking stress.

The base system is barotropic Euler plus a first-order viscosity tensor
built from two density-dependent coefficients (odd viscosity and odd
torque); the tensor is antisymmetric under exchanging its derivative slots
with its force slots, so it does no work and the fluid energy is conserved
for any coefficient choice.  The extended system carries an intrinsic
angular-momentum deviation field that relaxes at rate mu/nu and feeds back
through a modified pressure and viscosity; the relaxation drains the
extended energy at a rate proportional to the squared deviation.
"""

from dataclasses import dataclass, field

import numpy as np

from nonholo.errors import NegativeDensity, NonFinite
from nonholo.numkit import dealias_2d, integrate, spectral_partial_2d
from nonholo.numkit.dual import Dual, _TAGS
from nonholo.numkit.spectral import _check_pow2
from nonholo.trajectory import Trajectory

TWO_PI = 2.0 * np.pi
DENSITY_FLOOR = 1e-6


def coefficient_and_derivative(f, rho):
    """Evaluate a smooth coefficient function and its exact rho-derivative.

    Uses a forward-difference-free dual pass, so ``f`` must be built from
    arithmetic operations that accept numpy arrays (polynomials in rho).
    """
    tag = next(_TAGS)
    out = f(Dual(np.asarray(rho, dtype=float), np.ones_like(rho), tag))
    if isinstance(out, Dual) and out.tag == tag:
        return np.broadcast_to(out.val, rho.shape).astype(float), np.broadcast_to(
            out.dot, rho.shape
        ).astype(float)
    return np.broadcast_to(np.asarray(out, dtype=float), rho.shape), np.zeros_like(rho)


@dataclass
class FluidParams:
    """Equation of state, parity-breaking coefficients, and relaxation rates.

    ``eos`` is ("isothermal", c) with internal energy c^2 rho (ln rho - 1)
    or ("polytropic2", kappa) with kappa rho^2; both give positive pressure
    on positive densities (c^2 rho and kappa rho^2 respectively).
    """

    eos: tuple = ("isothermal", 1.0)
    eta_H: callable = lambda rho: 0.0 * rho
    Gamma_H: callable = lambda rho: 0.0 * rho
    mu: float = 1.0
    nu: float = 1.0

    def internal_energy(self, rho):
        kind, a = self.eos
        if kind == "isothermal":
            return a * a * rho * (np.log(rho) - 1.0)
        if kind == "polytropic2":
            return a * rho * rho
        raise ValueError(f"unknown equation of state {kind!r}")

    def eps_prime(self, rho):
        kind, a = self.eos
        if kind == "isothermal":
            return a * a * np.log(rho)
        if kind == "polytropic2":
            return 2.0 * a * rho
        raise ValueError(f"unknown equation of state {kind!r}")

    def pressure(self, rho):
        # p = rho eps'(rho) - eps(rho)
        return rho * self.eps_prime(rho) - self.internal_energy(rho)

    def gamma_hat(self, rho):
        """Gamma_H - eta_H + rho * eta_H'."""
        eh, ehp = coefficient_and_derivative(self.eta_H, rho)
        gh, _ = coefficient_and_derivative(self.Gamma_H, rho)
        return gh - eh + rho * ehp

    def eta_value(self, rho):
        return coefficient_and_derivative(self.eta_H, rho)[0]

    def gamma_value(self, rho):
        return coefficient_and_derivative(self.Gamma_H, rho)[0]


@dataclass
class FluidState:
    """Density, velocity, and (extended system) angular-momentum deviation."""

    rho: np.ndarray
    v: np.ndarray
    ell: np.ndarray = None
    lengths: tuple = field(default=(TWO_PI, TWO_PI))

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        _check_pow2(self.rho.shape[0])
        _check_pow2(self.rho.shape[1])
        if self.v.shape != (2,) + self.rho.shape:
            raise ValueError("velocity must have shape (2, nx, ny)")
        if self.ell is not None:
            self.ell = np.asarray(self.ell, dtype=float)
            if self.ell.shape != self.rho.shape:
                raise ValueError("deviation field must match the density grid")

    @property
    def shape(self):
        return self.rho.shape


def _check_state(rho, v, ell=None):
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(v))):
        raise NonFinite("fluid state contains non-finite entries")
    if ell is not None and not np.all(np.isfinite(ell)):
        raise NonFinite("deviation field contains non-finite entries")
    if np.min(rho) <= DENSITY_FLOOR:
        raise NegativeDensity(f"density fell to {np.min(rho):.3e}")


def _grad(f, lengths):
    return np.stack(
        [spectral_partial_2d(f, 1, 0, lengths), spectral_partial_2d(f, 1, 1, lengths)]
    )


def velocity_jacobian(v, lengths):
    """d[i, j] = partial_i v_j."""
    d = np.empty((2, 2) + v.shape[1:])
    for i in range(2):
        for j in range(2):
            d[i, j] = spectral_partial_2d(v[j], 1, i, lengths)
    return d


def viscous_stress(eta_H, Gamma_H, ell, dv, mode):
    """Contraction of the parity-breaking viscosity tensor with dv.

    ``mode`` "base" uses the coefficient -eta_H on the symmetric-rotation
    part; "extended" uses ell/2 in its place (they agree when
    ell = -2 eta_H).  The Gamma_H part is Gamma_H (eps_ij div v -
    delta_ij curl v) in both modes, matching the base-system orientation.
    """
    div = dv[0, 0] + dv[1, 1]
    curl = dv[0, 1] - dv[1, 0]
    coef = 0.5 * ell if mode == "extended" else -eta_H
    T = np.empty_like(dv)
    # eps_ik d_k v_j + eps_jk d_i v_k with eps_12 = 1
    for i in range(2):
        for j in range(2):
            si, ei = (1.0, 1) if i == 0 else (-1.0, 0)
            sj, ej = (1.0, 1) if j == 0 else (-1.0, 0)
            T[i, j] = coef * (si * dv[ei, j] + sj * dv[i, ej])
    T[0, 1] += Gamma_H * div
    T[1, 0] -= Gamma_H * div
    T[0, 0] -= Gamma_H * curl
    T[1, 1] -= Gamma_H * curl
    return T


def stress_tensor(state, params, mode="base"):
    """Full stress T_ij on the grid, shape (2, 2, nx, ny)."""
    _check_state(state.rho, state.v, state.ell)
    dv = velocity_jacobian(state.v, state.lengths)
    p = params.pressure(state.rho)
    eta = params.eta_value(state.rho)
    gam = params.gamma_value(state.rho)
    if mode == "base":
        T = viscous_stress(eta, gam, None, dv, "base")
    elif mode == "extended":
        if state.ell is None:
            raise ValueError("extended stress needs the deviation field")
        dl = state.ell
        ell = dl - 2.0 * eta
        nu = params.nu
        p = p + dl * dl / (2.0 * nu) + (2.0 / nu) * params.gamma_hat(state.rho) * dl
        T = viscous_stress(eta, gam, ell, dv, "extended")
    else:
        raise ValueError(f"unknown stress mode {mode!r}")
    T[0, 0] -= p
    T[1, 1] -= p
    return T


def _euler_terms(rho, v, T, lengths):
    rho_d = dealias_2d(rho)
    v_d = np.stack([dealias_2d(v[0]), dealias_2d(v[1])])
    rho_t = -(
        spectral_partial_2d(dealias_2d(rho_d * v_d[0]), 1, 0, lengths)
        + spectral_partial_2d(dealias_2d(rho_d * v_d[1]), 1, 1, lengths)
    )
    v_t = np.empty_like(v)
    for j in range(2):
        adv = v_d[0] * dealias_2d(spectral_partial_2d(v[j], 1, 0, lengths)) + v_d[
            1
        ] * dealias_2d(spectral_partial_2d(v[j], 1, 1, lengths))
        divT = spectral_partial_2d(T[0, j], 1, 0, lengths) + spectral_partial_2d(
            T[1, j], 1, 1, lengths
        )
        v_t[j] = dealias_2d(-adv + dealias_2d(divT) / rho_d)
    return dealias_2d(rho_t), v_t


def base_rhs(state, params):
    """(rho_t, v_t) of the parity-breaking barotropic system."""
    T = stress_tensor(state, params, "base")
    return _euler_terms(state.rho, state.v, T, state.lengths)


def effective_rhs(state, params):
    """Base system with the relaxation-limit pressure shift -(8/mu) Gamma_hat div v."""
    T = stress_tensor(state, params, "base")
    lengths = state.lengths
    dv = velocity_jacobian(state.v, lengths)
    shift = dealias_2d(-(8.0 / params.mu) * params.gamma_hat(state.rho) * (dv[0, 0] + dv[1, 1]))
    T[0, 0] -= shift
    T[1, 1] -= shift
    return _euler_terms(state.rho, state.v, T, lengths)


def extended_rhs(state, params):
    """(rho_t, v_t, dl_t) of the system with the relaxing deviation field."""
    if state.ell is None:
        raise ValueError("extended dynamics needs the deviation field")
    T = stress_tensor(state, params, "extended")
    rho_t, v_t = _euler_terms(state.rho, state.v, T, state.lengths)
    lengths = state.lengths
    dl = dealias_2d(state.ell)
    v_d = np.stack([dealias_2d(state.v[0]), dealias_2d(state.v[1])])
    dv = velocity_jacobian(state.v, lengths)
    div = dv[0, 0] + dv[1, 1]
    transport = spectral_partial_2d(dealias_2d(dl * v_d[0]), 1, 0, lengths) + spectral_partial_2d(
        dealias_2d(dl * v_d[1]), 1, 1, lengths
    )
    dl_t = dealias_2d(
        -transport
        - 2.0 * dealias_2d(params.gamma_hat(state.rho) * div)
        - (params.mu / params.nu) * state.ell
    )
    return rho_t, v_t, dl_t


# ---------------------------------------------------------------------------
# energies and balance checks


def _cell_area(shape, lengths):
    return lengths[0] * lengths[1] / (shape[0] * shape[1])


def fluid_energy(state, params):
    """H = integral [rho |v|^2 / 2 + eps(rho)]."""
    dens = 0.5 * state.rho * (state.v[0] ** 2 + state.v[1] ** 2) + params.internal_energy(
        state.rho
    )
    return float(np.sum(dens)) * _cell_area(state.shape, state.lengths)


def extended_energy(state, params):
    """H_nu = H + integral (dl)^2 / (2 nu)."""
    extra = float(np.sum(state.ell ** 2)) / (2.0 * params.nu)
    return fluid_energy(state, params) + extra * _cell_area(state.shape, state.lengths)


def rayleigh_dissipation(state, params):
    """R_mu = integral (mu / 2 nu) (dl)^2."""
    return (
        0.5
        * params.mu
        / params.nu
        * float(np.sum(state.ell ** 2))
        * _cell_area(state.shape, state.lengths)
    )


def energy_rate(state, params, rhs_func):
    """Discrete dH/dt (or dH_nu/dt) via the analytic variational derivatives.

    Pairs (|v|^2/2 + eps'(rho), rho v, dl/nu) with the state derivative, so
    the check is independent of the time integrator.
    """
    out = rhs_func(state, params)
    rho_t, v_t = out[0], out[1]
    area = _cell_area(state.shape, state.lengths)
    rate = np.sum(
        (0.5 * (state.v[0] ** 2 + state.v[1] ** 2) + params.eps_prime(state.rho)) * rho_t
    )
    rate += np.sum(state.rho * (state.v[0] * v_t[0] + state.v[1] * v_t[1]))
    if len(out) == 3:
        rate += np.sum(state.ell * out[2]) / params.nu
    return float(rate) * area


def energy_balance_residual(state, params):
    """|dH_nu/dt + 2 R_mu| for the extended system (exact identity at nu=1)."""
    return abs(energy_rate(state, params, extended_rhs) + 2.0 * rayleigh_dissipation(state, params))


def slaved_deviation(state, params):
    """Leading small-coupling deviation -(4 nu / mu) Gamma_hat div v."""
    dv = velocity_jacobian(state.v, state.lengths)
    return -(4.0 * params.nu / params.mu) * params.gamma_hat(state.rho) * (dv[0, 0] + dv[1, 1])


# ---------------------------------------------------------------------------
# integration


def _pack(state):
    parts = [state.rho.ravel(), state.v[0].ravel(), state.v[1].ravel()]
    if state.ell is not None:
        parts.append(state.ell.ravel())
    return np.concatenate(parts)


def _unpack(y, shape, lengths, with_ell):
    m = shape[0] * shape[1]
    rho = y[:m].reshape(shape)
    v = np.stack([y[m : 2 * m].reshape(shape), y[2 * m : 3 * m].reshape(shape)])
    ell = y[3 * m : 4 * m].reshape(shape) if with_ell else None
    return FluidState(rho=rho, v=v, ell=ell, lengths=lengths)


def integrate_fluid(system, state0, params, t_span, stepper, record_every=1):
    """Integrate one of the fluid systems; returns (Trajectory, frames).

    ``system`` is "base", "effective", or "extended".  The trajectory state
    columns are cheap summaries (density range, max speed, rms divergence);
    full field frames are returned alongside for post-processing.
    """
    with_ell = system == "extended"
    if with_ell and state0.ell is None:
        raise ValueError("extended integration needs the deviation field")
    shape, lengths = state0.shape, state0.lengths
    rhs_func = {"base": base_rhs, "effective": effective_rhs, "extended": extended_rhs}[
        system
    ]

    def rhs(t, y):
        st = _unpack(y, shape, lengths, with_ell)
        out = rhs_func(st, params)
        parts = [out[0].ravel(), out[1][0].ravel(), out[1][1].ravel()]
        if with_ell:
            parts.append(out[2].ravel())
        return np.concatenate(parts)

    times, rows = integrate(rhs, _pack(state0), t_span, stepper, record_every=record_every)
    frames = [_unpack(r, shape, lengths, with_ell) for r in rows]
    area = _cell_area(shape, lengths)

    def div_l2(st):
        dv = velocity_jacobian(st.v, lengths)
        return float(np.sqrt(np.sum((dv[0, 0] + dv[1, 1]) ** 2) * area))

    states = np.array(
        [
            [
                float(st.rho.min()),
                float(st.rho.max()),
                float(np.sqrt(st.v[0] ** 2 + st.v[1] ** 2).max()),
                div_l2(st),
            ]
            for st in frames
        ]
    )
    ledger = {"H": np.array([fluid_energy(st, params) for st in frames])}
    if with_ell:
        ledger["H_nu"] = np.array([extended_energy(st, params) for st in frames])
        ledger["R_mu"] = np.array([rayleigh_dissipation(st, params) for st in frames])
        ledger["dl_max"] = np.array([float(np.max(np.abs(st.ell))) for st in frames])
    traj = Trajectory(
        times=times,
        columns=["rho_min", "rho_max", "speed_max", "div_l2"],
        states=states,
        ledger=ledger,
        meta={"system": f"fluid-{system}", "shape": list(shape), "mu": params.mu, "nu": params.nu},
    )
    return traj, frames
