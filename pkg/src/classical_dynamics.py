import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from gauge_fields import MagneticSetup


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    x: float
    y: float
    vx: float
    vy: float

    def p_mech(self, setup: MagneticSetup) -> Tuple[float, float]:
        return setup.m_e * self.vx, setup.m_e * self.vy

    def l_mech(self, setup: MagneticSetup) -> float:
        return setup.m_e * (self.x * self.vy - self.y * self.vx)

    def as_vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy], dtype=float)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def state(self, index: int) -> TrajectoryState:
        return TrajectoryState(
            float(self.t[index]), float(self.x[index]), float(self.y[index]),
            float(self.vx[index]), float(self.vy[index]),
        )


@dataclass(frozen=True)
class ConservedSet:
    p_cons_x: np.ndarray
    p_cons_y: np.ndarray
    l_cons_z: np.ndarray


@dataclass(frozen=True)
class ConservedReport:
    conserved: ConservedSet
    p_mech_x: np.ndarray
    p_mech_y: np.ndarray
    l_mech_z: np.ndarray
    energy: np.ndarray
    drift: Dict[str, float]
    amplitude: Dict[str, float]


@dataclass(frozen=True)
class IdentityReport:
    max_mismatch: Dict[str, float]
    checked: int
    skipped: int


def _rhs(state: np.ndarray, omega_c: float) -> np.ndarray:
    # m x'' = -eB y',  m y'' = +eB x'
    _, _, vx, vy = state
    return np.array([vx, vy, -omega_c * vy, omega_c * vx])


def _rk4_step(state: np.ndarray, dt: float, omega_c: float) -> np.ndarray:
    half = 0.5 * dt
    k1 = _rhs(state, omega_c)
    k2 = _rhs(state + half * k1, omega_c)
    k3 = _rhs(state + half * k2, omega_c)
    k4 = _rhs(state + dt * k3, omega_c)
    return state + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)


def integrate(setup: MagneticSetup, initial: TrajectoryState, dt: float, steps: int) -> Trajectory:
    """Fixed-step classical RK4 for the electron in the uniform field."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    samples = np.empty((steps + 1, 4))
    samples[0] = initial.as_vector()
    state = samples[0]
    omega_c = setup.omega_c
    for i in range(1, steps + 1):
        state = _rk4_step(state, dt, omega_c)
        samples[i] = state
    t = initial.t + dt * np.arange(steps + 1)
    return Trajectory(t=t, x=samples[:, 0], y=samples[:, 1], vx=samples[:, 2], vy=samples[:, 3])


def orbit_center(setup: MagneticSetup, x, y, vx, vy) -> Tuple[np.ndarray, np.ndarray]:
    omega_c = setup.omega_c
    return np.asarray(x) - np.asarray(vy) / omega_c, np.asarray(y) + np.asarray(vx) / omega_c


def exact_state(setup: MagneticSetup, initial: TrajectoryState, t: float) -> TrajectoryState:
    """Closed-form cyclotron motion: velocity rotates counter-clockwise at omega_c."""
    omega_c = setup.omega_c
    cx, cy = orbit_center(setup, initial.x, initial.y, initial.vx, initial.vy)
    angle = omega_c * (t - initial.t)
    c, s = math.cos(angle), math.sin(angle)
    vx = c * initial.vx - s * initial.vy
    vy = s * initial.vx + c * initial.vy
    return TrajectoryState(t=t, x=float(cx) + vy / omega_c, y=float(cy) - vx / omega_c, vx=vx, vy=vy)


def conserved_set(setup: MagneticSetup, trajectory: Trajectory) -> ConservedSet:
    eB, m_e = setup.eB, setup.m_e
    x, y, vx, vy = trajectory.x, trajectory.y, trajectory.vx, trajectory.vy
    l_mech = m_e * (x * vy - y * vx)
    return ConservedSet(
        p_cons_x=m_e * vx + eB * y,
        p_cons_y=m_e * vy - eB * x,
        l_cons_z=l_mech - 0.5 * eB * (x * x + y * y),
    )


def conserved_series(setup: MagneticSetup, trajectory: Trajectory) -> ConservedReport:
    """Conserved and mechanical quantities per sample, with drift and oscillation amplitude.

    Drift is relative to m|v0| for momenta and max(|L0|, m|v0| rho) for L_cons.
    """
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    m_e = setup.m_e
    conserved = conserved_set(setup, trajectory)
    x, y, vx, vy = trajectory.x, trajectory.y, trajectory.vx, trajectory.vy
    p_mech_x, p_mech_y = m_e * vx, m_e * vy
    l_mech = m_e * (x * vy - y * vx)
    energy = 0.5 * m_e * (vx * vx + vy * vy)

    momentum_scale = m_e * math.hypot(vx[0], vy[0]) or 1.0
    rho = momentum_scale / setup.eB

    def drift(series: np.ndarray, scale: float) -> float:
        return float(np.max(np.abs(series - series[0])) / scale)

    l0 = abs(float(conserved.l_cons_z[0]))
    drifts = {
        "p_cons_x": drift(conserved.p_cons_x, momentum_scale),
        "p_cons_y": drift(conserved.p_cons_y, momentum_scale),
        "L_cons_z": drift(conserved.l_cons_z, max(l0, momentum_scale * rho)),
        "energy": drift(energy, max(float(energy[0]), 0.5 * m_e * (momentum_scale / m_e) ** 2)),
    }
    amplitude = {
        name: float(0.5 * (np.max(series) - np.min(series)))
        for name, series in (("p_mech_x", p_mech_x), ("p_mech_y", p_mech_y), ("L_mech_z", l_mech))
    }
    return ConservedReport(
        conserved=conserved, p_mech_x=p_mech_x, p_mech_y=p_mech_y, l_mech_z=l_mech,
        energy=energy, drift=drifts, amplitude=amplitude,
    )


def lagrangian_identities(setup: MagneticSetup, trajectory: Trajectory, r_min: float = 1e-9) -> IdentityReport:
    """Canonical momenta from the gauge-specific Lagrangians against the conserved set.

    symmetric_polar: p_phi(A_S) = m r^2 phi' - eB r^2/2        == L_cons
    symmetric_x:     p_x(A_S) + eB y/2, p_x(A_S) = m x' + eB y/2 == p_cons_x
    landau_x:        p_x(A_L1) = m x' + eB y                   == p_cons_x
    landau_polar:    p_phi(A_L1) - eB r^2 (cos^2 - sin^2)/2     == L_cons,
                     p_phi(A_L1) = m r^2 phi' - eB r^2 sin^2 phi
    """
    eB, m_e = setup.eB, setup.m_e
    conserved = conserved_set(setup, trajectory)
    x, y, vx, vy = trajectory.x, trajectory.y, trajectory.vx, trajectory.vy
    r2 = x * x + y * y
    keep = np.sqrt(r2) >= r_min * setup.l_B
    skipped = int(np.count_nonzero(~keep))

    r2k = r2[keep]
    phi = np.arctan2(y[keep], x[keep])
    phi_dot = (x[keep] * vy[keep] - y[keep] * vx[keep]) / r2k
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)

    symmetric_polar = m_e * r2k * phi_dot - 0.5 * eB * r2k
    p_x_symmetric = m_e * vx[keep] + 0.5 * eB * y[keep]
    symmetric_x = p_x_symmetric + 0.5 * eB * y[keep]
    landau_x = m_e * vx[keep] + eB * y[keep]
    p_phi_landau = m_e * r2k * phi_dot - eB * r2k * sin_phi ** 2
    landau_polar = p_phi_landau - 0.5 * eB * r2k * (cos_phi ** 2 - sin_phi ** 2)

    def mismatch(lhs: np.ndarray, rhs: np.ndarray) -> float:
        if lhs.size == 0:
            return 0.0
        return float(np.max(np.abs(lhs - rhs)))

    return IdentityReport(
        max_mismatch={
            "symmetric_polar": mismatch(symmetric_polar, conserved.l_cons_z[keep]),
            "symmetric_x": mismatch(symmetric_x, conserved.p_cons_x[keep]),
            "landau_x": mismatch(landau_x, conserved.p_cons_x[keep]),
            "landau_polar": mismatch(landau_polar, conserved.l_cons_z[keep]),
        },
        checked=int(np.count_nonzero(keep)),
        skipped=skipped,
    )


def center_relation_mismatch(setup: MagneticSetup, trajectory: Trajectory) -> float:
    """max |p_cons_x - eB Y| + |p_cons_y + eB X| over the samples."""
    conserved = conserved_set(setup, trajectory)
    cx, cy = orbit_center(setup, trajectory.x, trajectory.y, trajectory.vx, trajectory.vy)
    return float(np.max(
        np.abs(conserved.p_cons_x - setup.eB * cy) + np.abs(conserved.p_cons_y + setup.eB * cx)
    ))


def integrator_order(setup: MagneticSetup, initial: TrajectoryState, coarse_steps: int = 40) -> float:
    """Observed global order over one period from dt = T/coarse_steps and half of it."""
    period = setup.cyclotron_period
    exact = exact_state(setup, initial, initial.t + period).as_vector()
    errors = []
    for steps in (coarse_steps, 2 * coarse_steps):
        trajectory = integrate(setup, initial, period / steps, steps)
        final = trajectory.state(len(trajectory) - 1).as_vector()
        errors.append(float(np.max(np.abs(final - exact))))
    return math.log2(errors[0] / errors[1])
