import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from gauge_fields import (
    LANDAU1,
    SYMMETRIC,
    ArrayLike,
    GaugeChoice,
    HarmonicGauge,
    MagneticSetup,
    deform,
    gauge_phase,
    gauge_transition,
)
from special_functions import (
    assoc_laguerre,
    check_quantum_numbers,
    hermite_function,
    norm_constants,
)


FAMILIES = ("SymNM", "SymNKx", "L1NM", "L1NKx", "PacketL1", "Deformed")
DELTA_NORMALIZED = ("SymNKx", "L1NKx")

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _complex(values: np.ndarray) -> ArrayLike:
    if np.ndim(values) == 0:
        return complex(values)
    return values


@dataclass(frozen=True)
class WavePacketSpec:
    n: int
    kx_center: float
    sigma: float

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"packet level must be non-negative, got n={self.n}")
        if not self.sigma > 0:
            raise ValueError(f"packet width sigma must be positive, got {self.sigma}")

    def weight(self, k: ArrayLike) -> ArrayLike:
        """Normalized Gaussian weight g(k); integral of g^2 is exactly 1."""
        k = np.asarray(k, dtype=float)
        g = (math.pi * self.sigma ** 2) ** -0.25 * np.exp(-((k - self.kx_center) ** 2) / (2.0 * self.sigma ** 2))
        if g.ndim == 0:
            return float(g)
        return g

    @property
    def mean_k_squared(self) -> float:
        return self.kx_center ** 2 + 0.5 * self.sigma ** 2

    @property
    def guiding_x_variance(self) -> float:
        return 1.0 / (2.0 * self.sigma ** 2)


def psi_sym_nm(
    setup: MagneticSetup, n: int, m: int, x: ArrayLike, y: ArrayLike, ladder_phase: bool = True
) -> ArrayLike:
    """Symmetric-gauge eigenstate |n, m>.

    With ladder_phase the Laguerre form carries (-1)^k, k the Laguerre
    degree, so the state is exactly |n>_A |n-m>_B.
    """
    check_quantum_numbers(n, m)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    abs_m = abs(m)
    k = n - (abs_m + m) // 2
    xi = (x * x + y * y) / (2.0 * setup.l_B ** 2)
    phi = np.arctan2(y, x)
    norm = norm_constants(setup, n, m).N_nm
    radial = norm * np.power(xi, 0.5 * abs_m) * np.exp(-0.5 * xi) * assoc_laguerre(k, abs_m, xi)
    if ladder_phase and k % 2:
        radial = -radial
    return _complex(_INV_SQRT_2PI * radial * np.exp(1j * m * phi))


def psi_l1_nm(setup: MagneticSetup, n: int, m: int, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _complex(np.exp(0.5j * setup.eB * x * y) * psi_sym_nm(setup, n, m, x, y))


def psi_l1_nkx(setup: MagneticSetup, n: int, kx: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Landau1 eigenstate |n, kx>: plane wave in x times Y_n(y - kx/eB)."""
    if n < 0:
        raise ValueError(f"Landau level must be non-negative, got n={n}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    l_B = setup.l_B
    y0 = kx / setup.eB
    profile = hermite_function(n, (y - y0) / l_B) / math.sqrt(l_B)
    return _complex(_INV_SQRT_2PI * np.exp(1j * kx * x) * profile)


def psi_sym_nkx(setup: MagneticSetup, n: int, kx: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _complex(np.exp(-0.5j * setup.eB * x * y) * psi_l1_nkx(setup, n, kx, x, y))


def _packet_polynomial(n: int, mu: np.ndarray, gamma2: float) -> np.ndarray:
    # Gaussian average of H_n(mu + w); valid at gamma2 = 0 too
    prev = np.ones_like(mu)
    if n == 0:
        return prev
    cur = 2.0 * mu
    for k in range(1, n):
        prev, cur = cur, 2.0 * mu * cur - 2.0 * k * gamma2 * prev
    return cur


def psi_packet(setup: MagneticSetup, spec: WavePacketSpec, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Landau1 packet: integral of g(k) |n, k> dk in closed form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    l_B = setup.l_B
    s = spec.sigma * l_B
    eta = (y - spec.kx_center / setup.eB) / l_B
    zeta = x / l_B
    alpha = 1.0 + 1.0 / s ** 2
    beta = eta / s ** 2 - 1j * zeta
    mu = beta / alpha
    gamma2 = 1.0 - 2.0 / alpha
    n_n = norm_constants(setup, spec.n, spec.n).N_n
    prefactor = (math.pi * spec.sigma ** 2) ** -0.25 * _INV_SQRT_2PI * n_n / l_B * math.sqrt(2.0 * math.pi / alpha)
    exponent = 1j * setup.eB * x * y + beta ** 2 / (2.0 * alpha) - eta ** 2 / (2.0 * s ** 2)
    return _complex(prefactor * np.exp(exponent) * _packet_polynomial(spec.n, mu, gamma2))


def overlap_kernel(setup: MagneticSetup, n: int, kx: float, m: int) -> float:
    """C_{n,m} H_{n-m}(y0/l_B) exp(-y0^2 / 2 l_B^2), y0 = kx/eB."""
    check_quantum_numbers(n, m)
    l_B = setup.l_B
    return float(math.sqrt(l_B) * hermite_function(n - m, kx / setup.eB / l_B))


def kernel_phase(m: int) -> complex:
    return 1j ** (m % 4)


def overlap_amplitude(setup: MagneticSetup, n: int, kx: float, m: int) -> complex:
    """<n, kx (Landau1)| U |n, m (symmetric)> under the ladder phase convention."""
    return kernel_phase(m) * overlap_kernel(setup, n, kx, m)


def kernel_resum(
    setup: MagneticSetup,
    n: int,
    kx: float,
    x: float,
    y: float,
    tail_tol: float = 1e-12,
    max_terms: int = 2000,
) -> Tuple[complex, int]:
    """Rebuild psi_l1_nkx(x, y) as sum_m conj(U_{n,kx;n,m}) |n, m (Landau1)>.

    Terms grow until |m| passes the radial peak near r^2 / 2 l_B^2, then
    fall off; the sum stops after three consecutive terms below the tail
    tolerance.
    """
    xi = (x * x + y * y) / (2.0 * setup.l_B ** 2)
    floor = int(math.ceil(xi)) + 2 * n + 4
    total = 0j
    largest = 0.0
    quiet = 0
    for nu in range(max_terms):
        m = n - nu
        term = overlap_amplitude(setup, n, kx, m).conjugate() * complex(psi_l1_nm(setup, n, m, x, y))
        total += term
        largest = max(largest, abs(term))
        if nu > floor and abs(term) <= tail_tol * max(abs(total), largest):
            quiet += 1
            if quiet >= 3:
                return total, nu + 1
        else:
            quiet = 0
    raise RuntimeError(f"kernel sum for n={n}, kx={kx} at ({x}, {y}) did not converge in {max_terms} terms")


@dataclass(frozen=True)
class QuantumState:
    """Evaluatable eigenstate; call it with coordinate arrays."""

    setup: MagneticSetup
    family: str
    n: int
    gauge: GaugeChoice
    m: Optional[int] = None
    kx: Optional[float] = None
    sigma: Optional[float] = None
    inner: Optional["QuantumState"] = None
    chi: Optional[HarmonicGauge] = None
    ladder_phase: bool = True

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown state family {self.family!r}")
        if self.family == "Deformed" and (self.inner is None or self.chi is None):
            raise ValueError("deformed state needs an inner state and chi")

    def __call__(self, x: ArrayLike, y: ArrayLike) -> ArrayLike:
        family = self.family
        if family == "SymNM":
            return psi_sym_nm(self.setup, self.n, self.m, x, y, ladder_phase=self.ladder_phase)
        if family == "L1NM":
            return psi_l1_nm(self.setup, self.n, self.m, x, y)
        if family == "L1NKx":
            return psi_l1_nkx(self.setup, self.n, self.kx, x, y)
        if family == "SymNKx":
            return psi_sym_nkx(self.setup, self.n, self.kx, x, y)
        if family == "PacketL1":
            return psi_packet(self.setup, self.packet_spec, x, y)
        return _complex(gauge_phase(self.setup, self.chi, x, y) * self.inner(x, y))

    @property
    def root(self) -> "QuantumState":
        state = self
        while state.family == "Deformed":
            state = state.inner
        return state

    @property
    def normalizable(self) -> bool:
        return self.root.family not in DELTA_NORMALIZED

    @property
    def packet_spec(self) -> Optional[WavePacketSpec]:
        root = self.root
        if root.family != "PacketL1":
            return None
        return WavePacketSpec(n=root.n, kx_center=root.kx, sigma=root.sigma)

    @property
    def label(self) -> str:
        root = self.root
        if root.family in ("SymNM", "L1NM"):
            body = f"{root.family}(n={root.n},m={root.m})"
        elif root.family == "PacketL1":
            body = f"PacketL1(n={root.n},kx={root.kx:g},sigma={root.sigma:g})"
        else:
            body = f"{root.family}(n={root.n},kx={root.kx:g})"
        if self.family == "Deformed":
            return f"{body}@{self.gauge.label}"
        return body


def sym_nm_state(setup: MagneticSetup, n: int, m: int, ladder_phase: bool = True) -> QuantumState:
    check_quantum_numbers(n, m)
    return QuantumState(setup, "SymNM", n, SYMMETRIC, m=m, ladder_phase=ladder_phase)


def l1_nm_state(setup: MagneticSetup, n: int, m: int) -> QuantumState:
    check_quantum_numbers(n, m)
    return QuantumState(setup, "L1NM", n, LANDAU1, m=m)


def l1_nkx_state(setup: MagneticSetup, n: int, kx: float) -> QuantumState:
    return QuantumState(setup, "L1NKx", n, LANDAU1, kx=float(kx))


def sym_nkx_state(setup: MagneticSetup, n: int, kx: float) -> QuantumState:
    return QuantumState(setup, "SymNKx", n, SYMMETRIC, kx=float(kx))


def packet_state(setup: MagneticSetup, spec: WavePacketSpec) -> QuantumState:
    return QuantumState(setup, "PacketL1", spec.n, LANDAU1, kx=float(spec.kx_center), sigma=float(spec.sigma))


def deformed_state(state: QuantumState, chi: HarmonicGauge) -> QuantumState:
    """Multiply by exp(-i e chi); the state now lives in A + grad chi."""
    return QuantumState(
        state.setup, "Deformed", state.n, deform(state.gauge, chi), m=state.m, kx=state.kx, sigma=state.sigma,
        inner=state, chi=chi,
    )


def transform_state(state: QuantumState, target: GaugeChoice) -> QuantumState:
    """Carry a state into the target gauge by its gauge phase."""
    chi = gauge_transition(state.gauge, target)
    if chi.is_zero():
        return replace(state, gauge=target) if state.gauge != target else state
    return replace(deformed_state(state, chi), gauge=target)
