import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from classical_dynamics import (
    TrajectoryState,
    center_relation_mismatch,
    conserved_series,
    exact_state,
    integrate,
    integrator_order,
    lagrangian_identities,
)
from fock_engine import (
    build_operator,
    commutator_suite,
    nm_basis_closed_form,
    nm_basis_entry,
)
from gauge_fields import (
    LANDAU1,
    LANDAU2,
    SYMMETRIC,
    GaugeChoice,
    HarmonicGauge,
    curl_check,
    deform,
    max_divergence,
    random_harmonic_gauge,
)
from landau_states import (
    QuantumState,
    WavePacketSpec,
    deformed_state,
    l1_nkx_state,
    l1_nm_state,
    overlap_amplitude,
    kernel_resum,
    packet_state,
    psi_l1_nkx,
    sym_nkx_state,
    sym_nm_state,
    transform_state,
)
from realspace_engine import (
    COVARIANT,
    HAMILTONIAN,
    L_CAN,
    L_CONS,
    L_MECH,
    MOMENTA_AND_OAM,
    P_CONS,
    P_MECH,
    X_SQUARED,
    OperatorKind,
    default_grid,
    eigen_residual,
    gcc_build,
    kernel_overlap,
    kx_packet_oracle,
    matrix_element,
    nm_grid,
    operator_elements,
    packet_expectation,
    packet_grid,
)
from reports import (
    ReportRow,
    all_required_pass,
    at_least_row,
    bound_row,
    equality_row,
    inequality_row,
    write_report,
    write_trajectory_csv,
)
from run_config import ConfigurationError, RunConfig, build_config, load_dotenv


SUITE_NM = "nm-basis"
SUITE_KX = "kx-basis"
SUITE_GAUGE = "gauge-class"
SUITE_CLASSICAL = "classical"
SUITES = (SUITE_NM, SUITE_KX, SUITE_GAUGE, SUITE_CLASSICAL)

CLASS_GAUGES = {"SymNM": SYMMETRIC, "L1NM": LANDAU1}
CLASS_FACTORIES = {"SymNM": sym_nm_state, "L1NM": l1_nm_state}
PACKET_OPERATORS = MOMENTA_AND_OAM + (X_SQUARED,)
PACKET_COLUMNS = {"L1": LANDAU1, "Sym": SYMMETRIC}

# (n, m) kets cycled through by the chi draws
COVARIANCE_KETS = ((0, 0), (1, -1), (2, 1), (1, 1), (2, -2))
# in units of l_B
RESUM_POINTS = ((0.0, 0.0), (0.8, -0.4), (-1.3, 1.1))
FIELD_PROBES = [(x, y) for x in (-3.0, -1.0, 0.0, 1.5, 3.0) for y in (-3.0, -0.5, 0.0, 1.0, 3.0)]
DEGENERATE_GAP = 1e-6
RESIDUAL_DRAWS = 10
TRAJECTORY_SAMPLES_PER_PERIOD = 100

Task = Callable[[], List[ReportRow]]


@dataclass
class SuiteResult:
    suite: str
    rows: List[ReportRow]
    path: str
    notes: List[str] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(1 for row in self.rows if row.expect_equal and not row.passed)

    @property
    def passed(self) -> bool:
        return all_required_pass(self.rows)


def say(quiet: bool, tag: str, message: str) -> None:
    if not quiet:
        print(f"[{tag}] {message}")


def _run(task: Task) -> List[ReportRow]:
    return task()


def run_tasks(workers: int, tasks: Sequence[Task]) -> List[ReportRow]:
    with ThreadPoolExecutor(max_workers=workers) as pool:
        batches = list(pool.map(_run, tasks))
    return [row for batch in batches for row in batch]


def _fd_step(config: RunConfig) -> float:
    return config.fd_step * config.setup.l_B


def _finish(config: RunConfig, suite: str, rows: List[ReportRow], quiet: bool, notes: Optional[List[str]] = None) -> SuiteResult:
    path = write_report(config.out_dir, suite, rows, config.header(), config.output_format)
    result = SuiteResult(suite=suite, rows=rows, path=path, notes=notes or [])
    say(quiet, "report", f"Saved {len(rows)} rows to {path}")
    say(quiet, suite, "PASS" if result.passed else f"FAIL ({result.failures} failing rows)")
    return result


def _cell(n: int, m_prime: int, m: int) -> str:
    return f"<{n},{m_prime}|.|{n},{m}>"


# nm-basis


def _nm_basis_task(config: RunConfig, basis_class: str, n: int, m: int) -> List[ReportRow]:
    setup = config.setup
    factory = CLASS_FACTORIES[basis_class]
    m_primes = list(range(config.m_min, n + 1))
    bras = [factory(setup, n, m_prime) for m_prime in m_primes]
    ket = factory(setup, n, m)
    grid = nm_grid(bras + [ket], config.grid_points, config.grid_half_width)
    tables = operator_elements(setup, bras, MOMENTA_AND_OAM, CLASS_GAUGES[basis_class], ket, grid, _fd_step(config))

    rows: List[ReportRow] = []
    for op, results in zip(MOMENTA_AND_OAM, tables):
        for m_prime, result in zip(m_primes, results):
            expected = nm_basis_closed_form(op, basis_class, n, m_prime, m, setup)
            tag = f"{op.label} {basis_class} {_cell(n, m_prime, m)}"
            fock = nm_basis_entry(op, basis_class, n, m_prime, m, setup)
            rows.append(equality_row(SUITE_NM, f"fock {tag}", fock, expected, config.tol_fock))
            rows.append(equality_row(SUITE_NM, f"quadrature {tag}", result.value, expected, config.tol_quadrature))
    return rows


def _commutator_task(config: RunConfig) -> List[ReportRow]:
    cutoff_a = max(4, config.n_max + 2)
    cutoff_b = max(4, config.n_max - config.m_min + 2)
    rows: List[ReportRow] = []
    for check in commutator_suite(config.setup, cutoff_a, cutoff_b):
        anchor = f"commutator {check.name}"
        if check.expect_vanishing:
            rows.append(bound_row(SUITE_NM, anchor, check.max_deviation, config.tol_fock))
        else:
            rows.append(inequality_row(SUITE_NM, anchor, check.max_deviation, 0j, config.tol_fock))
    return rows


def cmd_nm_basis(config: RunConfig, quiet: bool = False) -> SuiteResult:
    """Matrix elements of the six momenta and OAMs in both |n, m> classes."""
    tasks: List[Task] = [partial(_commutator_task, config)]
    for basis_class in CLASS_GAUGES:
        for n in range(config.n_max + 1):
            for m in range(config.m_min, n + 1):
                tasks.append(partial(_nm_basis_task, config, basis_class, n, m))
    say(quiet, SUITE_NM, f"{len(tasks)} tasks on {config.workers} workers")
    rows = run_tasks(config.workers, tasks)
    return _finish(config, SUITE_NM, rows, quiet)


# kx-basis


def _packet_task(config: RunConfig, n: int, kx: float, sigma: float, column: str) -> List[ReportRow]:
    setup = config.setup
    spec = WavePacketSpec(n=n, kx_center=kx, sigma=sigma)
    grid = packet_grid(setup, spec, config.grid_points)
    rows: List[ReportRow] = []
    for op in PACKET_OPERATORS:
        result = packet_expectation(setup, op, PACKET_COLUMNS[column], spec, grid, _fd_step(config))
        expected = kx_packet_oracle(setup, op, column, spec)
        anchor = f"packet {op.label} {column} n={n} kx={kx:g} sigma={sigma:g}"
        rows.append(equality_row(SUITE_KX, anchor, result.value, expected, config.tol_packet))
    return rows


def _kernel_task(config: RunConfig, n: int, kx: float) -> List[ReportRow]:
    setup = config.setup
    rows: List[ReportRow] = []
    for m in range(config.m_min, n + 1):
        result = kernel_overlap(setup, n, kx, m, points=max(200, config.grid_points))
        anchor = f"overlap kernel n={n} kx={kx:g} m={m}"
        rows.append(equality_row(SUITE_KX, anchor, result.value, overlap_amplitude(setup, n, kx, m), config.tol_quadrature))
    return rows


def _resum_task(config: RunConfig, n: int, kx: float) -> List[ReportRow]:
    setup = config.setup
    rows: List[ReportRow] = []
    for x, y in RESUM_POINTS:
        x, y = x * setup.l_B, y * setup.l_B
        value, _ = kernel_resum(setup, n, kx, x, y)
        anchor = f"kernel resummation n={n} kx={kx:g} at ({x:g},{y:g})"
        rows.append(equality_row(SUITE_KX, anchor, value, complex(psi_l1_nkx(setup, n, kx, x, y)), config.tol_packet))
    return rows


def cmd_kx_basis(config: RunConfig, quiet: bool = False) -> SuiteResult:
    """Packet-regularized |n, kx> rows plus the overlap kernel against quadrature."""
    tasks: List[Task] = []
    for n in range(config.packet_n_max + 1):
        for kx in config.kx_list:
            for sigma in config.sigma_list:
                for column in PACKET_COLUMNS:
                    tasks.append(partial(_packet_task, config, n, kx, sigma, column))
    for n in range(config.kernel_n_max + 1):
        for kx in config.kernel_kx_list:
            tasks.append(partial(_kernel_task, config, n, kx))
            if n <= 2:
                tasks.append(partial(_resum_task, config, n, kx))
    say(quiet, SUITE_KX, f"{len(tasks)} tasks on {config.workers} workers")
    rows = run_tasks(config.workers, tasks)
    return _finish(config, SUITE_KX, rows, quiet)


# gauge-class


def draw_chis(config: RunConfig) -> List[HarmonicGauge]:
    rng = np.random.default_rng(config.seed)
    return [random_harmonic_gauge(rng, config.chi_degree) for _ in range(config.chi_draws)]


def _covariance_kets(config: RunConfig) -> List[Tuple[int, int]]:
    kets = [(n, m) for n, m in COVARIANCE_KETS if n <= config.n_max and m >= config.m_min]
    return kets or [(config.n_max, config.n_max)]


def _covariance_task(config: RunConfig, index: int, chi: HarmonicGauge, n: int, m: int) -> List[ReportRow]:
    setup = config.setup
    base = config.base_gauge
    h = _fd_step(config)
    m_primes = [m_prime for m_prime in (m - 1, m, m + 1) if m_prime <= n]
    ket = transform_state(sym_nm_state(setup, n, m), base)
    bras = [transform_state(sym_nm_state(setup, n, m_prime), base) for m_prime in m_primes]
    moved_ket = deformed_state(ket, chi)
    moved_bras = [deformed_state(bra, chi) for bra in bras]
    grid = nm_grid(bras + [ket], config.grid_points, config.grid_half_width)

    rows: List[ReportRow] = []
    before_tables = operator_elements(setup, bras, COVARIANT, base, ket, grid, h)
    after_tables = operator_elements(setup, moved_bras, COVARIANT, moved_ket.gauge, moved_ket, grid, h)
    for op, before, after in zip(COVARIANT, before_tables, after_tables):
        for m_prime, old, new in zip(m_primes, before, after):
            anchor = f"covariant {op.label} chi#{index:02d} {_cell(n, m_prime, m)}"
            rows.append(equality_row(SUITE_GAUGE, anchor, new.value, old.value, config.tol_quadrature))
    return rows


def _residual_task(
    config: RunConfig, state: QuantumState, checks: Sequence[Tuple[OperatorKind, complex]], draw: Optional[int] = None
) -> List[ReportRow]:
    setup = config.setup
    grid = default_grid(setup, [state], config.grid_points)
    suffix = "" if draw is None else f" chi#{draw:02d}"
    rows: List[ReportRow] = []
    for op, eigenvalue in checks:
        residual = eigen_residual(setup, op, state.gauge, state, eigenvalue, grid, _fd_step(config))
        anchor = f"eigen {op.label} {state.label}{suffix}"
        rows.append(bound_row(SUITE_GAUGE, anchor, residual, config.tol_residual))
    return rows


def _eigen_checks(config: RunConfig, n: int) -> List[Tuple[QuantumState, List[Tuple[OperatorKind, complex]]]]:
    """|n, m> and |n, kx> states of level n with the eigenvalues they must carry."""
    setup = config.setup
    energy = complex(setup.energy(n))
    checks = []
    for m in sorted({n, 0, -1, config.m_min}):
        if config.m_min <= m <= n:
            for factory in (sym_nm_state, l1_nm_state):
                checks.append((factory(setup, n, m), [(HAMILTONIAN, energy), (L_CONS, complex(m))]))
    for kx in config.kx_list:
        for factory in (l1_nkx_state, sym_nkx_state):
            checks.append((factory(setup, n, kx), [(HAMILTONIAN, energy), (P_CONS, complex(kx))]))
    return checks


def _residual_tasks(config: RunConfig, chis: Sequence[HarmonicGauge]) -> List[Task]:
    """Residuals in the standard gauges, then under each of the first RESIDUAL_DRAWS chi draws.

    Draw j deforms every |n, m> and |n, kx> state of level j mod (n_top + 1).
    """
    setup = config.setup
    n_top = min(config.n_max, 3)
    tasks: List[Task] = []
    for n in range(n_top + 1):
        for state, checks in _eigen_checks(config, n):
            tasks.append(partial(_residual_task, config, state, checks))
        for sigma in config.sigma_list:
            packet = packet_state(setup, WavePacketSpec(n=n, kx_center=config.kx_list[0] if config.kx_list else 0.0, sigma=sigma))
            tasks.append(partial(_residual_task, config, packet, [(HAMILTONIAN, complex(setup.energy(n)))]))
    for draw, chi in enumerate(chis[:RESIDUAL_DRAWS]):
        for state, checks in _eigen_checks(config, draw % (n_top + 1)):
            tasks.append(partial(_residual_task, config, deformed_state(state, chi), checks, draw))
    return tasks


def _p_cons_task(config: RunConfig, basis_class: str, n: int, m: int) -> List[ReportRow]:
    """p_cons has no eigenvalue on |n, m>: its smallest residual is its norm."""
    setup = config.setup
    state = CLASS_FACTORIES[basis_class](setup, n, m)
    grid = default_grid(setup, [state], config.grid_points)
    residual = eigen_residual(setup, P_CONS, CLASS_GAUGES[basis_class], state, 0j, grid, _fd_step(config))
    expected = math.sqrt(setup.eB * (n - m + 0.5))
    tag = f"{basis_class}(n={n},m={m})"
    return [
        equality_row(SUITE_GAUGE, f"p_cons residual norm {tag}", residual, expected, config.tol_residual),
        inequality_row(SUITE_GAUGE, f"p_cons not diagonal on {tag}", residual, 0j, config.tol_residual),
    ]


def _class_independence_task(config: RunConfig, spec: WavePacketSpec, m_near: int, separate: bool) -> List[ReportRow]:
    setup = config.setup
    h = _fd_step(config)
    grid = packet_grid(setup, spec, config.grid_points)
    ket = sym_nm_state(setup, spec.n, m_near)
    tag = f"n={spec.n} kx={spec.kx_center:g} sigma={spec.sigma:g}"
    rows: List[ReportRow] = []
    for op in (L_MECH, P_MECH):
        packet = packet_expectation(setup, op, LANDAU1, spec, grid, h)
        nm = matrix_element(setup, ket, op, SYMMETRIC, ket, grid=None, h=h)
        rows.append(equality_row(SUITE_GAUGE, f"{op.label} class-independent {tag}", packet.value, nm.value, config.tol_packet))
    if separate:
        packet = packet_expectation(setup, L_CONS, LANDAU1, spec, grid, h)
        nm = matrix_element(setup, ket, L_CONS, SYMMETRIC, ket, grid=None, h=h)
        margin = 10.0 * (packet.error_estimate + nm.error_estimate) + config.tol_packet
        anchor = f"L_cons separates classes {tag} m={m_near}"
        rows.append(inequality_row(SUITE_GAUGE, anchor, packet.value, nm.value, margin))
    return rows


def _class_independence_tasks(config: RunConfig) -> Tuple[List[Task], List[str]]:
    setup = config.setup
    tasks: List[Task] = []
    notes: List[str] = []
    for n in range(min(config.n_max, config.packet_n_max) + 1):
        for kx in config.kx_list:
            for sigma in config.sigma_list:
                spec = WavePacketSpec(n=n, kx_center=kx, sigma=sigma)
                l_cons = kx_packet_oracle(setup, L_CONS, "L1", spec).real
                m_near = min(n, int(round(l_cons)))
                separate = abs(l_cons - m_near) >= DEGENERATE_GAP
                if not separate:
                    notes.append(
                        f"skipped L_cons separation for n={n} kx={kx:g} sigma={sigma:g}: "
                        f"packet value {l_cons:g} coincides with m={m_near}"
                    )
                tasks.append(partial(_class_independence_task, config, spec, m_near, separate))
    return tasks, notes


def _canonical_variance_task(config: RunConfig, n: int, m: int) -> List[ReportRow]:
    setup = config.setup
    h = _fd_step(config)
    values = {}
    for basis_class, factory in CLASS_FACTORIES.items():
        values[basis_class] = matrix_element(
            setup, factory(setup, n, m + 2), L_CAN, CLASS_GAUGES[basis_class], factory(setup, n, m), h=h
        )
    l1, sym = values["L1NM"], values["SymNM"]
    margin = 10.0 * (l1.error_estimate + sym.error_estimate) + config.tol_quadrature
    anchor = f"L_can off-diagonal differs across classes {_cell(n, m + 2, m)}"
    return [inequality_row(SUITE_GAUGE, anchor, l1.value, sym.value, margin)]


def _gcc_pairs() -> List[Tuple[OperatorKind, OperatorKind]]:
    return [(gcc_build("oam", SYMMETRIC), L_CONS), (gcc_build("momentum", LANDAU1), P_CONS)]


def _gcc_quadrature_task(
    config: RunConfig, basis_class: str, gauge: GaugeChoice, chi: Optional[HarmonicGauge], n: int, m: int
) -> List[ReportRow]:
    setup = config.setup
    h = _fd_step(config)
    factory = CLASS_FACTORIES[basis_class]
    m_primes = [m_prime for m_prime in range(max(config.m_min, n - 2), n + 1)]
    ket = factory(setup, n, m)
    bras = [factory(setup, n, m_prime) for m_prime in m_primes]
    if chi is not None:
        ket = deformed_state(ket, chi)
        bras = [deformed_state(bra, chi) for bra in bras]
    grid = nm_grid([ket] + bras, config.grid_points, config.grid_half_width)
    rows: List[ReportRow] = []
    pairs = _gcc_pairs()
    tables = operator_elements(setup, bras, [op for pair in pairs for op in pair], gauge, ket, grid, h)
    for index, (gcc, conserved) in enumerate(pairs):
        lhs, rhs = tables[2 * index], tables[2 * index + 1]
        for m_prime, left, right in zip(m_primes, lhs, rhs):
            anchor = f"{gcc.label} == {conserved.label} in {gauge.label} {basis_class} {_cell(n, m_prime, m)}"
            rows.append(equality_row(SUITE_GAUGE, anchor, left.value, right.value, config.tol_quadrature))
    return rows


def _gcc_fock_task(config: RunConfig) -> List[ReportRow]:
    setup = config.setup
    cutoff_a = max(4, config.n_max + 2)
    cutoff_b = max(4, config.n_max - config.m_min + 2)
    rows: List[ReportRow] = []

    def difference(first: OperatorKind, second: OperatorKind, basis_class: str) -> float:
        left = build_operator(first, basis_class, cutoff_a, cutoff_b, setup)
        right = build_operator(second, basis_class, cutoff_a, cutoff_b, setup)
        mask = left.interior_mask(max(left.degree, right.degree))
        dense = (left.matrix - right.matrix).toarray()[np.ix_(mask, mask)]
        return float(np.max(np.abs(dense))) if dense.size else 0.0

    for basis_class in CLASS_GAUGES:
        for gcc, conserved in _gcc_pairs():
            anchor = f"fock {gcc.label} == {conserved.label} {basis_class}"
            rows.append(bound_row(SUITE_GAUGE, anchor, difference(gcc, conserved, basis_class), config.tol_fock))
        landau2 = gcc_build("momentum", LANDAU2)
        anchor = f"fock {landau2.label} differs from p_cons {basis_class}"
        rows.append(inequality_row(SUITE_GAUGE, anchor, difference(landau2, P_CONS, basis_class), 0j, config.tol_fock))
    return rows


def _field_task(config: RunConfig, label: str, gauge: GaugeChoice) -> List[ReportRow]:
    setup = config.setup
    points = [(x * setup.l_B, y * setup.l_B) for x, y in FIELD_PROBES]
    return [
        bound_row(SUITE_GAUGE, f"curl A = B {label}", curl_check(setup, gauge, points), config.tol_identity),
        bound_row(SUITE_GAUGE, f"div A {label}", max_divergence(setup, gauge, points), config.tol_identity),
    ]


def cmd_gauge_class(config: RunConfig, quiet: bool = False) -> SuiteResult:
    """Covariance within a gauge class and the separations between the two classes."""
    setup = config.setup
    base = config.base_gauge
    chis = draw_chis(config)
    say(quiet, SUITE_GAUGE, f"seed {config.seed}, {len(chis)} harmonic draws of degree {config.chi_degree} on {base.label}")

    tasks: List[Task] = []
    gauges: Dict[str, GaugeChoice] = {"symmetric": SYMMETRIC, "landau1": LANDAU1, "landau2": LANDAU2, "base": base}
    for index, chi in enumerate(chis):
        gauges[f"base+chi#{index:02d}"] = deform(base, chi)
    for label, gauge in gauges.items():
        tasks.append(partial(_field_task, config, label, gauge))

    kets = _covariance_kets(config)
    for index, chi in enumerate(chis):
        n, m = kets[index % len(kets)]
        tasks.append(partial(_covariance_task, config, index, chi, n, m))

    tasks.extend(_residual_tasks(config, chis))

    for basis_class in CLASS_GAUGES:
        for n in range(min(config.n_max, 3) + 1):
            for m in sorted({n, n - 1, config.m_min}):
                if config.m_min <= m <= n:
                    tasks.append(partial(_p_cons_task, config, basis_class, n, m))

    independence, notes = _class_independence_tasks(config)
    tasks.extend(independence)
    for note in notes:
        say(quiet, SUITE_GAUGE, note)

    for n in range(min(config.n_max, 3) + 1):
        for m in (n - 2, n - 3):
            if m >= config.m_min:
                tasks.append(partial(_canonical_variance_task, config, n, m))

    tasks.append(partial(_gcc_fock_task, config))
    for n in range(min(config.n_max, 2) + 1):
        for m in range(max(config.m_min, n - 2), n + 1):
            for basis_class, gauge in CLASS_GAUGES.items():
                tasks.append(partial(_gcc_quadrature_task, config, basis_class, gauge, None, n, m))
            if chis:
                moved = deform(SYMMETRIC, chis[0])
                tasks.append(partial(_gcc_quadrature_task, config, "SymNM", moved, chis[0], n, m))

    say(quiet, SUITE_GAUGE, f"{len(tasks)} tasks on {config.workers} workers")
    rows = run_tasks(config.workers, tasks)
    return _finish(config, SUITE_GAUGE, rows, quiet, notes)


# classical


def cmd_classical(config: RunConfig, quiet: bool = False) -> SuiteResult:
    """Integrate the cyclotron orbit and check drifts, identities and the integrator order."""
    setup = config.setup
    initial = TrajectoryState(t=0.0, x=config.x0, y=config.y0, vx=config.vx0, vy=config.vy0)
    period = setup.cyclotron_period
    steps = config.periods * config.steps_per_period
    say(quiet, SUITE_CLASSICAL, f"{config.periods} periods at dt = T/{config.steps_per_period} ({steps} steps)")
    trajectory = integrate(setup, initial, period / config.steps_per_period, steps)
    series = conserved_series(setup, trajectory)

    rows: List[ReportRow] = []
    for name in ("p_cons_x", "p_cons_y", "L_cons_z", "energy"):
        rows.append(bound_row(SUITE_CLASSICAL, f"relative drift {name}", series.drift[name], config.tol_classical))
    for name, amplitude in series.amplitude.items():
        rows.append(inequality_row(SUITE_CLASSICAL, f"{name} oscillates", amplitude, 0j, config.tol_classical))

    identities = lagrangian_identities(setup, trajectory)
    for name, mismatch in identities.max_mismatch.items():
        rows.append(bound_row(SUITE_CLASSICAL, f"identity {name}", mismatch, config.tol_identity))
    if identities.skipped:
        say(quiet, SUITE_CLASSICAL, f"{identities.skipped} samples at the origin left out of the polar identities")
    rows.append(bound_row(
        SUITE_CLASSICAL, "p_cons equals eB times orbit centre", center_relation_mismatch(setup, trajectory), config.tol_identity
    ))

    returned = trajectory.state(config.steps_per_period).as_vector()
    exact = exact_state(setup, initial, initial.t + period).as_vector()
    rows.append(bound_row(
        SUITE_CLASSICAL, "one-period return", float(np.max(np.abs(returned - exact))), config.tol_classical
    ))
    rows.append(at_least_row(SUITE_CLASSICAL, "RK4 observed order", integrator_order(setup, initial), 3.9, 4.0))

    result = _finish(config, SUITE_CLASSICAL, rows, quiet)
    csv_path = os.path.join(config.out_dir, "trajectory.csv")
    stride = max(1, config.steps_per_period // TRAJECTORY_SAMPLES_PER_PERIOD)
    count = write_trajectory_csv(csv_path, trajectory, series, stride)
    say(quiet, "report", f"Saved {count} trajectory samples to {csv_path}")
    return result


COMMANDS: Dict[str, Callable[[RunConfig, bool], SuiteResult]] = {
    SUITE_NM: cmd_nm_basis,
    SUITE_KX: cmd_kx_basis,
    SUITE_GAUGE: cmd_gauge_class,
    SUITE_CLASSICAL: cmd_classical,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify_landau",
        description="Check momentum and OAM matrix elements of the Landau problem across gauge choices.",
    )
    parser.add_argument("command", choices=list(SUITES) + ["all"], help="suite to run")
    parser.add_argument("--config", default=None, help="KEY=VALUE run config file (default: $LANDAU_CONFIG)")
    parser.add_argument("--out", default=None, help="output directory for reports")
    parser.add_argument("--format", choices=("csv", "json"), default=None, help="report format")
    parser.add_argument("--seed", type=int, default=None, help="seed for the harmonic gauge draws")
    parser.add_argument("--n-max", type=int, default=None, help="largest Landau level in the |n, m> sweep")
    parser.add_argument("--sigma", default=None, help="comma-separated packet widths")
    parser.add_argument("--workers", type=int, default=None, help="thread pool size")
    parser.add_argument("--quiet", action="store_true", help="suppress progress lines")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "out_dir": args.out,
        "output_format": args.format,
        "seed": args.seed,
        "n_max": args.n_max,
        "sigma_list": args.sigma,
        "workers": args.workers,
    }
    return build_config(args.config, overrides)


def main(argv: Optional[Iterable[str]] = None) -> int:
    args = build_parser().parse_args(None if argv is None else list(argv))
    try:
        load_dotenv()
        config = config_from_args(args)
    except ConfigurationError as exc:
        print(f"[config] {exc}")
        return 2

    names = list(SUITES) if args.command == "all" else [args.command]
    results: List[SuiteResult] = []
    try:
        for name in names:
            results.append(COMMANDS[name](config, args.quiet))
    except ConfigurationError as exc:
        print(f"[config] {exc}")
        return 2

    failing = [result for result in results if not result.passed]
    if failing:
        for result in failing:
            print(f"[verify] {result.suite}: {result.failures} failing rows, see {result.path}")
        return 1
    say(args.quiet, "verify", f"OK ({sum(len(result.rows) for result in results)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
