import cmath
import math

import hypothesis as hyp
import hypothesis.strategies as st
import numpy as np
import pytest
from scipy.integrate import quad

from gauge_fields import LANDAU1, LANDAU2, SYMMETRIC, MagneticSetup, random_harmonic_gauge
from landau_states import (
    WavePacketSpec,
    deformed_state,
    kernel_phase,
    kernel_resum,
    l1_nkx_state,
    l1_nm_state,
    overlap_amplitude,
    overlap_kernel,
    packet_state,
    psi_l1_nkx,
    psi_l1_nm,
    psi_packet,
    psi_sym_nkx,
    psi_sym_nm,
    sym_nm_state,
    transform_state,
)
from realspace_engine import QuadratureGrid, packet_grid
from special_functions import QuantumNumberError


def integrate_density(setup, grid, field):
    gx, gy, weights = grid.nodes(setup)
    return float(np.sum(np.abs(field(gx, gy)) ** 2 * weights))


def test_symmetric_ground_state_at_origin(setup):
    assert psi_sym_nm(setup, 0, 0, 0.0, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-14)


@pytest.mark.parametrize('eB', [1.0, 2.5])
def test_symmetric_state_is_normalized(eB):
    setup = MagneticSetup(eB=eB)
    grid = QuadratureGrid(half_width=10.0, points_per_axis=120)
    norm = integrate_density(setup, grid, lambda x, y: psi_sym_nm(setup, 3, -2, x, y))
    assert norm == pytest.approx(1.0, abs=1e-10)


def test_symmetric_states_are_orthonormal(setup):
    labels = [(n, m) for n in range(4) for m in range(-3, n + 1)]
    grid = QuadratureGrid(half_width=10.0, points_per_axis=140)
    gx, gy, weights = grid.nodes(setup)
    values = np.array([psi_sym_nm(setup, n, m, gx, gy).ravel() for n, m in labels])
    gram = (values.conj() * weights.ravel()) @ values.T
    np.testing.assert_allclose(gram, np.eye(len(labels)), atol=1e-8)


@hyp.settings(max_examples=25, deadline=None)
@hyp.given(
    r=st.floats(min_value=0.05, max_value=4.0),
    phi=st.floats(min_value=-math.pi, max_value=math.pi),
    m=st.integers(min_value=-4, max_value=2),
)
def test_rotation_multiplies_by_angular_phase(r, phi, m):
    setup = MagneticSetup()
    n = 2
    turn = 2 * math.pi / 3
    before = psi_sym_nm(setup, n, m, r * math.cos(phi), r * math.sin(phi))
    after = psi_sym_nm(setup, n, m, r * math.cos(phi + turn), r * math.sin(phi + turn))
    assert after == pytest.approx(cmath.exp(1j * m * turn) * before, abs=1e-12)


def test_ladder_phase_only_flips_sign(setup):
    for n, m in [(1, 0), (2, -1), (3, 1), (2, 2)]:
        plain = psi_sym_nm(setup, n, m, 0.4, -0.9, ladder_phase=False)
        ladder = psi_sym_nm(setup, n, m, 0.4, -0.9)
        k = n - (abs(m) + m) // 2
        assert ladder == pytest.approx((-1) ** k * plain, abs=1e-15)


def test_rejects_m_above_n(setup):
    with pytest.raises(QuantumNumberError):
        psi_sym_nm(setup, 1, 2, 0.0, 0.0)
    with pytest.raises(QuantumNumberError):
        l1_nm_state(setup, 0, 1)
    with pytest.raises(QuantumNumberError):
        overlap_kernel(setup, 2, 0.0, 3)


def test_landau_plane_wave_examples(setup):
    expected = (2 * math.pi) ** -0.5 * math.pi ** -0.25
    assert psi_l1_nkx(setup, 0, 0.0, 0.0, 0.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.29991, abs=1e-5)

    xs = np.linspace(-5, 5, 11)
    moduli = np.abs(psi_l1_nkx(setup, 2, 1.3, xs, 0.7))
    np.testing.assert_allclose(moduli, moduli[0], rtol=1e-14)

    ys = np.linspace(-3, 6, 9001)
    profile = np.abs(psi_l1_nkx(setup, 0, 1.5, 0.0, ys))
    assert ys[np.argmax(profile)] == pytest.approx(1.5, abs=1e-3)


def test_landau_nm_state_is_phase_shifted_symmetric_state(setup):
    xs = np.linspace(-2, 2, 5)
    ys = np.linspace(-1, 3, 5)
    np.testing.assert_allclose(np.abs(psi_l1_nm(setup, 2, -1, xs, ys)), np.abs(psi_sym_nm(setup, 2, -1, xs, ys)), rtol=1e-14)
    ratio = psi_l1_nm(setup, 0, 0, 1.0, 1.0) / psi_sym_nm(setup, 0, 0, 1.0, 1.0)
    assert cmath.phase(ratio) == pytest.approx(0.5, abs=1e-14)


def test_symmetric_plane_wave_undoes_the_landau_phase(setup):
    value = psi_sym_nkx(setup, 1, 0.4, 1.2, -0.6)
    assert value == pytest.approx(cmath.exp(-0.5j * 1.2 * -0.6) * psi_l1_nkx(setup, 1, 0.4, 1.2, -0.6), abs=1e-15)


def test_packet_weight_is_normalized():
    spec = WavePacketSpec(n=1, kx_center=0.7, sigma=0.4)
    total, _ = quad(lambda k: spec.weight(k) ** 2, -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-12)
    assert spec.mean_k_squared == pytest.approx(0.49 + 0.08)
    assert spec.guiding_x_variance == pytest.approx(1 / 0.32)


@pytest.mark.parametrize('n, sigma', [(-1, 1.0), (0, 0.0), (1, -2.0)])
def test_packet_spec_validation(n, sigma):
    with pytest.raises(ValueError):
        WavePacketSpec(n=n, kx_center=0.0, sigma=sigma)


def test_packet_is_normalized(setup):
    spec = WavePacketSpec(n=2, kx_center=1.0, sigma=0.5)
    norm = integrate_density(setup, packet_grid(setup, spec), lambda x, y: psi_packet(setup, spec, x, y))
    assert norm == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize(
    'eB, n, kx, sigma, x, y',
    [
        (1.0, 0, 0.0, 1.0, 0.3, -0.2),
        (1.0, 2, 1.0, 0.5, -1.1, 0.8),
        (2.0, 3, -1.5, 2.0, 0.4, -0.9),
        (0.5, 1, 0.6, 0.3, 2.0, 1.5),
    ]
)
def test_packet_closed_form_matches_k_integration(eB, n, kx, sigma, x, y):
    setup = MagneticSetup(eB=eB)
    spec = WavePacketSpec(n=n, kx_center=kx, sigma=sigma)
    lo, hi = kx - 12 * sigma, kx + 12 * sigma

    def integrand(k, part):
        value = spec.weight(k) * psi_l1_nkx(setup, n, k, x, y)
        return value.real if part == 0 else value.imag

    re, _ = quad(integrand, lo, hi, args=(0,), epsabs=1e-13, limit=200)
    im, _ = quad(integrand, lo, hi, args=(1,), epsabs=1e-13, limit=200)
    assert psi_packet(setup, spec, x, y) == pytest.approx(complex(re, im), abs=1e-9)


def test_wide_packet_keeps_a_magnetic_length_envelope(setup):
    spec = WavePacketSpec(n=0, kx_center=0.0, sigma=50.0)
    xs = np.linspace(-4, 4, 801)
    density = np.abs(psi_packet(setup, spec, xs, 0.0)) ** 2
    half = xs[density >= 0.5 * density.max()]
    # |packet|^2 ~ exp(-x^2 s^2/(s^2+1)); half width sqrt(ln 2) for large s
    assert half.max() == pytest.approx(math.sqrt(math.log(2.0)), abs=0.01)


def test_overlap_kernel_values(setup):
    assert overlap_kernel(setup, 0, 0.0, 0) == pytest.approx(math.pi ** -0.25, rel=1e-14)
    for kx in (-1.5, 0.0, 0.8):
        assert overlap_kernel(setup, 1, kx, 1) == pytest.approx(math.pi ** -0.25 * math.exp(-kx ** 2 / 2), rel=1e-13)
    assert isinstance(overlap_kernel(setup, 3, 0.4, -2), float)


def test_overlap_amplitude_carries_powers_of_i(setup):
    assert kernel_phase(0) == 1
    assert kernel_phase(1) == 1j
    assert kernel_phase(-1) == -1j
    assert kernel_phase(-2) == -1
    value = overlap_amplitude(setup, 2, 0.5, -1)
    assert value == pytest.approx(-1j * overlap_kernel(setup, 2, 0.5, -1), abs=1e-15)


@pytest.mark.parametrize(
    'n, kx, x, y',
    [
        (0, 0.0, 0.0, 0.0),
        (1, 1.0, 0.8, -0.4),
        (2, -2.0, -1.3, 1.1),
    ]
)
def test_kernel_resummation_rebuilds_plane_wave(setup, n, kx, x, y):
    value, terms = kernel_resum(setup, n, kx, x, y)
    assert terms > 0
    assert value == pytest.approx(psi_l1_nkx(setup, n, kx, x, y), abs=1e-8)


def test_kernel_resummation_reports_non_convergence(setup):
    with pytest.raises(RuntimeError):
        kernel_resum(setup, 1, 0.5, 3.0, 2.0, max_terms=3)


def test_deformed_state_keeps_density(setup):
    chi = random_harmonic_gauge(np.random.default_rng(11))
    state = sym_nm_state(setup, 2, -1)
    moved = deformed_state(state, chi)
    xs = np.linspace(-3, 3, 13)
    ys = np.linspace(-2, 2, 13)
    np.testing.assert_allclose(np.abs(moved(xs, ys)), np.abs(state(xs, ys)), rtol=1e-13)
    assert moved.root is state
    assert moved.gauge.flatten() == (SYMMETRIC, chi)
    assert moved.label.endswith("@symmetric+chi")


def test_transform_state_between_standard_gauges(setup):
    xs = np.linspace(-2, 2, 7)
    ys = np.linspace(-1.5, 2.5, 7)
    carried = transform_state(sym_nm_state(setup, 1, -1), LANDAU1)
    assert carried.gauge == LANDAU1
    np.testing.assert_allclose(carried(xs, ys), psi_l1_nm(setup, 1, -1, xs, ys), atol=1e-15)

    back = transform_state(transform_state(l1_nkx_state(setup, 1, 0.3), LANDAU2), LANDAU1)
    np.testing.assert_allclose(back(xs, ys), psi_l1_nkx(setup, 1, 0.3, xs, ys), atol=1e-14)


def test_state_families(setup):
    assert not l1_nkx_state(setup, 0, 1.0).normalizable
    assert sym_nm_state(setup, 0, 0).normalizable
    packet = packet_state(setup, WavePacketSpec(n=1, kx_center=0.5, sigma=2.0))
    assert packet.packet_spec == WavePacketSpec(n=1, kx_center=0.5, sigma=2.0)
    assert packet.label == "PacketL1(n=1,kx=0.5,sigma=2)"
    assert sym_nm_state(setup, 0, 0).packet_spec is None
