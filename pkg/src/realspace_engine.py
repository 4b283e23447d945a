import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from gauge_fields import GaugeChoice, MagneticSetup, potential
from landau_states import (
    QuantumState,
    WavePacketSpec,
    packet_state,
    psi_l1_nkx,
    psi_l1_nm,
    transform_state,
)
from run_config import ConfigurationError


Field = Callable[[np.ndarray, np.ndarray], np.ndarray]

OPERATOR_TAGS = (
    "PCanX", "PMechX", "PConsX", "LCanZ", "LMechZ", "LConsZ", "Hamiltonian", "XSquared", "GccP", "GccL",
)
_GAUGE_FREE = ("PCanX", "LCanZ", "XSquared")


class DeltaNormalizedStateError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorKind:
    tag: str
    physical_gauge: Optional[GaugeChoice] = None

    def __post_init__(self) -> None:
        if self.tag not in OPERATOR_TAGS:
            raise ValueError(f"unknown operator {self.tag!r}")
        if self.tag in ("GccP", "GccL") and self.physical_gauge is None:
            raise ValueError(f"{self.tag} needs a physical gauge")

    @property
    def needs_gauge(self) -> bool:
        return self.tag not in _GAUGE_FREE

    @property
    def label(self) -> str:
        names = {
            "PCanX": "p_can", "PMechX": "p_mech", "PConsX": "p_cons",
            "LCanZ": "L_can", "LMechZ": "L_mech", "LConsZ": "L_cons",
            "Hamiltonian": "H", "XSquared": "x^2",
        }
        if self.tag == "GccP":
            return f"p_gcc[{self.physical_gauge.label}]"
        if self.tag == "GccL":
            return f"L_gcc[{self.physical_gauge.label}]"
        return names[self.tag]


P_CAN = OperatorKind("PCanX")
P_MECH = OperatorKind("PMechX")
P_CONS = OperatorKind("PConsX")
L_CAN = OperatorKind("LCanZ")
L_MECH = OperatorKind("LMechZ")
L_CONS = OperatorKind("LConsZ")
HAMILTONIAN = OperatorKind("Hamiltonian")
X_SQUARED = OperatorKind("XSquared")

MOMENTA_AND_OAM = (P_CAN, P_MECH, P_CONS, L_CAN, L_MECH, L_CONS)
COVARIANT = (P_MECH, P_CONS, L_MECH, L_CONS)


def gcc_build(op_base: str, physical_gauge: GaugeChoice) -> OperatorKind:
    """Gauge-covariant-canonical operator for a designated physical potential.

    momentum: p_mech - e A_phys,x      oam: L_mech - e (r x A_phys)_z
    """
    if not physical_gauge.is_standard:
        raise ValueError("the physical gauge must be symmetric, landau1 or landau2")
    if op_base == "momentum":
        return OperatorKind("GccP", physical_gauge)
    if op_base == "oam":
        return OperatorKind("GccL", physical_gauge)
    raise ValueError(f"op_base must be 'momentum' or 'oam', got {op_base!r}")


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor Gauss-Legendre rule on a rectangle; lengths in units of l_B."""

    half_width: float
    points_per_axis: int
    half_width_y: Optional[float] = None
    points_y: Optional[int] = None
    center_x: float = 0.0
    center_y: float = 0.0

    @property
    def extent(self) -> Tuple[float, float, int, int]:
        hy = self.half_width if self.half_width_y is None else self.half_width_y
        ny = self.points_per_axis if self.points_y is None else self.points_y
        return self.half_width, hy, self.points_per_axis, ny

    def refined(self, factor: float = 1.5, widen: float = 1.25) -> "QuadratureGrid":
        """Denser and wider rule; comparing against it exposes truncation of the rectangle."""
        hx, hy, nx, ny = self.extent
        return QuadratureGrid(
            half_width=hx * widen,
            points_per_axis=int(math.ceil(nx * factor)),
            half_width_y=None if self.half_width_y is None else hy * widen,
            points_y=None if self.points_y is None else int(math.ceil(ny * factor)),
            center_x=self.center_x,
            center_y=self.center_y,
        )

    def nodes(self, setup: MagneticSetup) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        hx, hy, nx, ny = self.extent
        l_B = setup.l_B
        tx, wx = _legendre(nx)
        ty, wy = _legendre(ny)
        xs = l_B * (self.center_x + hx * tx)
        ys = l_B * (self.center_y + hy * ty)
        weights = np.outer(wx * hx * l_B, wy * hy * l_B)
        grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
        return grid_x, grid_y, weights


@lru_cache(maxsize=64)
def _legendre(points: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


@dataclass(frozen=True)
class MatrixElementResult:
    value: complex
    error_estimate: float
    grid_used: QuadratureGrid


def nm_grid(
    states: Sequence[QuantumState], points: int = 160, min_half_width: float = 8.0, margin: float = 4.0
) -> QuadratureGrid:
    """Square around the origin; the margin covers the r^2 and r d/dr weights operators add to the tails."""
    half = min_half_width
    for state in states:
        root = state.root
        if root.m is not None:
            half = max(half, 3.0 * math.sqrt(2 * root.n + abs(root.m) + 1) + margin)
    return QuadratureGrid(half_width=half, points_per_axis=points)


def packet_grid(setup: MagneticSetup, spec: WavePacketSpec, points: int = 160, decay: float = 40.0) -> QuadratureGrid:
    """Rectangle covering |packet|^2 down to exp(-decay).

    |packet|^2 ~ exp(-eta^2/(s^2+1) - zeta^2 s^2/(s^2+1)), s = sigma l_B.
    """
    s2 = (spec.sigma * setup.l_B) ** 2
    margin = 2.0 * math.sqrt(2 * spec.n + 1) + 2.0
    hx = max(8.0, math.sqrt(decay * (s2 + 1.0) / s2) + margin)
    hy = max(8.0, math.sqrt(decay * (s2 + 1.0)) + margin)
    return QuadratureGrid(
        half_width=hx,
        points_per_axis=max(points, int(math.ceil(4.0 * hx))),
        half_width_y=hy,
        points_y=max(points, int(math.ceil(4.0 * hy))),
        center_y=spec.kx_center / setup.eB / setup.l_B,
    )


def default_grid(setup: MagneticSetup, states: Sequence[QuantumState], points: int = 160) -> QuadratureGrid:
    for state in states:
        spec = state.packet_spec
        if spec is not None:
            return packet_grid(setup, spec, points)
    return nm_grid(states, points)


def _step(setup: MagneticSetup, h: Optional[float]) -> float:
    return 1e-3 * setup.l_B if h is None else h


def _dx(f: Field, h: float) -> Field:
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (-f(x + 2 * h, y) + 8.0 * f(x + h, y) - 8.0 * f(x - h, y) + f(x - 2 * h, y)) / (12.0 * h)

    return derivative


def _dy(f: Field, h: float) -> Field:
    def derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (-f(x, y + 2 * h) + 8.0 * f(x, y + h) - 8.0 * f(x, y - h) + f(x, y - 2 * h)) / (12.0 * h)

    return derivative


def _kinetic(setup: MagneticSetup, gauge: GaugeChoice, f: Field, h: float) -> Tuple[Field, Field]:
    dfx, dfy = _dx(f, h), _dy(f, h)

    def pi_x(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ax, _ = potential(setup, gauge, x, y)
        return -1j * dfx(x, y) + ax * f(x, y)

    def pi_y(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _, ay = potential(setup, gauge, x, y)
        return -1j * dfy(x, y) + ay * f(x, y)

    return pi_x, pi_y


def _mechanical_oam(setup: MagneticSetup, gauge: GaugeChoice, f: Field, h: float) -> Field:
    pi_x, pi_y = _kinetic(setup, gauge, f, h)

    def l_mech(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x * pi_y(x, y) - y * pi_x(x, y)

    return l_mech


def apply(
    setup: MagneticSetup,
    op: OperatorKind,
    gauge: Optional[GaugeChoice],
    state: Field,
    h: Optional[float] = None,
) -> Field:
    """Return the field (O psi)(x, y); derivatives by 4th-order central differences."""
    if op.needs_gauge and gauge is None:
        raise ConfigurationError(f"operator {op.label} needs a gauge choice")
    h = _step(setup, h)
    eB = setup.eB
    f = state
    tag = op.tag

    if tag == "PCanX":
        dfx = _dx(f, h)
        return lambda x, y: -1j * dfx(x, y)
    if tag == "LCanZ":
        dfx, dfy = _dx(f, h), _dy(f, h)
        return lambda x, y: -1j * (x * dfy(x, y) - y * dfx(x, y))
    if tag == "XSquared":
        return lambda x, y: x * x * f(x, y)

    pi_x, pi_y = _kinetic(setup, gauge, f, h)
    if tag == "PMechX":
        return pi_x
    if tag == "PConsX":
        return lambda x, y: pi_x(x, y) + eB * y * f(x, y)
    if tag == "GccP":
        def gcc_p(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            ax_phys, _ = potential(setup, op.physical_gauge, x, y)
            return pi_x(x, y) - ax_phys * f(x, y)

        return gcc_p
    if tag == "Hamiltonian":
        pi_xx, _ = _kinetic(setup, gauge, pi_x, h)
        _, pi_yy = _kinetic(setup, gauge, pi_y, h)
        return lambda x, y: (pi_xx(x, y) + pi_yy(x, y)) / (2.0 * setup.m_e)

    l_mech = _mechanical_oam(setup, gauge, f, h)
    if tag == "LMechZ":
        return l_mech
    if tag == "LConsZ":
        return lambda x, y: l_mech(x, y) - 0.5 * eB * (x * x + y * y) * f(x, y)

    def gcc_l(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ax_phys, ay_phys = potential(setup, op.physical_gauge, x, y)
        return l_mech(x, y) - (x * ay_phys - y * ax_phys) * f(x, y)

    return gcc_l


def _require_normalizable(state: QuantumState) -> None:
    if not state.normalizable:
        raise DeltaNormalizedStateError(
            f"{state.label} is a delta-normalized state; wrap it in a wave packet before taking matrix elements"
        )


def _project(setup: MagneticSetup, grid: QuadratureGrid, bras: Sequence[Field], values: Field) -> List[complex]:
    gx, gy, weights = grid.nodes(setup)
    ket_values = values(gx, gy) * weights
    return [complex(np.sum(np.conj(bra(gx, gy)) * ket_values)) for bra in bras]


def operator_elements(
    setup: MagneticSetup,
    bras: Sequence[QuantumState],
    ops: Sequence[OperatorKind],
    gauge: Optional[GaugeChoice],
    ket: QuantumState,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> List[List[MatrixElementResult]]:
    """<bra|O|ket> for every operator and bra, one list per operator.

    Bras are sampled once per grid. The second pass uses the refined grid and
    twice the difference step, so error_estimate covers both discretizations.
    """
    for state in list(bras) + [ket]:
        _require_normalizable(state)
    grid = default_grid(setup, list(bras) + [ket]) if grid is None else grid
    h = _step(setup, h)
    passes = []
    for rule, step in ((grid, h), (grid.refined(), 2.0 * h)):
        gx, gy, weights = rule.nodes(setup)
        conj_bras = [np.conj(bra(gx, gy)) * weights for bra in bras]
        passes.append((gx, gy, conj_bras, step))

    tables: List[List[MatrixElementResult]] = []
    for op in ops:
        sums = []
        for gx, gy, conj_bras, step in passes:
            values = apply(setup, op, gauge, ket, step)(gx, gy)
            sums.append([complex(np.sum(bra * values)) for bra in conj_bras])
        coarse, fine = sums
        tables.append([
            MatrixElementResult(value=c, error_estimate=abs(c - f), grid_used=grid)
            for c, f in zip(coarse, fine)
        ])
    return tables


def matrix_elements(
    setup: MagneticSetup,
    bras: Sequence[QuantumState],
    op: OperatorKind,
    gauge: Optional[GaugeChoice],
    ket: QuantumState,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> List[MatrixElementResult]:
    """<bra|O|ket> for every bra."""
    return operator_elements(setup, bras, [op], gauge, ket, grid, h)[0]


def matrix_element(
    setup: MagneticSetup,
    bra: QuantumState,
    op: OperatorKind,
    gauge: Optional[GaugeChoice],
    ket: QuantumState,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> MatrixElementResult:
    return matrix_elements(setup, [bra], op, gauge, ket, grid, h)[0]


def adjoint_element(
    setup: MagneticSetup,
    bra: QuantumState,
    op: OperatorKind,
    gauge: Optional[GaugeChoice],
    ket: QuantumState,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> MatrixElementResult:
    """<O bra|ket>; equals matrix_element for an observable."""
    _require_normalizable(bra)
    _require_normalizable(ket)
    grid = default_grid(setup, [bra, ket]) if grid is None else grid
    h = _step(setup, h)
    coarse = _project(setup, grid, [apply(setup, op, gauge, bra, h)], ket)[0]
    fine = _project(setup, grid.refined(), [apply(setup, op, gauge, bra, 2.0 * h)], ket)[0]
    return MatrixElementResult(value=coarse, error_estimate=abs(coarse - fine), grid_used=grid)


def packet_expectation(
    setup: MagneticSetup,
    op: OperatorKind,
    gauge: GaugeChoice,
    spec: WavePacketSpec,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> MatrixElementResult:
    """Expectation in the normalized packet carried into the given gauge."""
    state = transform_state(packet_state(setup, spec), gauge)
    grid = packet_grid(setup, spec) if grid is None else grid
    return matrix_element(setup, state, op, gauge, state, grid, h)


def eigen_residual(
    setup: MagneticSetup,
    op: OperatorKind,
    gauge: Optional[GaugeChoice],
    state: QuantumState,
    eigenvalue: complex,
    grid: Optional[QuadratureGrid] = None,
    h: Optional[float] = None,
) -> float:
    """L2 norm of (O - eigenvalue) psi over the grid rectangle."""
    grid = default_grid(setup, [state]) if grid is None else grid
    field = apply(setup, op, gauge, state, h)
    gx, gy, weights = grid.nodes(setup)
    residual = field(gx, gy) - eigenvalue * state(gx, gy)
    return float(math.sqrt(np.sum(np.abs(residual) ** 2 * weights)))


def kx_packet_oracle(setup: MagneticSetup, op: OperatorKind, basis: str, spec: WavePacketSpec) -> complex:
    """Closed-form packet expectation for the |n, kx> rows, L1 or Sym column.

    Uses <k^2> = kx^2 + sigma^2/2 and <X^2> = 1/(2 sigma^2) for the guiding centre.
    """
    if basis not in ("L1", "Sym"):
        raise ValueError(f"basis must be 'L1' or 'Sym', got {basis!r}")
    eB, n, kx = setup.eB, spec.n, spec.kx_center
    k2 = spec.mean_k_squared
    l_cons = n + 0.5 - k2 / (2.0 * eB) - eB * spec.guiding_x_variance / 2.0
    tag = op.tag
    if tag == "PCanX":
        return complex(kx if basis == "L1" else 0.5 * kx)
    if tag == "PMechX":
        return 0j
    if tag == "PConsX":
        return complex(kx)
    if tag == "LCanZ":
        return complex(n + 0.5 - k2 / eB if basis == "L1" else l_cons)
    if tag == "LMechZ":
        return complex(2 * n + 1)
    if tag == "LConsZ":
        return complex(l_cons)
    if tag == "Hamiltonian":
        return complex(setup.energy(n))
    if tag == "XSquared":
        return complex(spec.guiding_x_variance + (n + 0.5) / eB)
    raise ValueError(f"no packet formula for {op.label}")


def kernel_overlap(
    setup: MagneticSetup,
    n: int,
    kx: float,
    m: int,
    points: int = 200,
) -> MatrixElementResult:
    """Quadrature of <n, kx (Landau1)| exp(i eB x y / 2) |n, m (symmetric)>."""
    half = max(10.0, 3.0 * math.sqrt(2 * n + abs(m) + 1) + 4.0)
    grid = QuadratureGrid(half_width=half, points_per_axis=points)

    def bra(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return psi_l1_nkx(setup, n, kx, x, y)

    def ket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return psi_l1_nm(setup, n, m, x, y)

    coarse = _project(setup, grid, [bra], ket)[0]
    fine = _project(setup, grid.refined(), [bra], ket)[0]
    return MatrixElementResult(value=coarse, error_estimate=abs(coarse - fine), grid_used=grid)
