import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np


ArrayLike = Union[float, np.ndarray]

STANDARD_TAGS = ("symmetric", "landau1", "landau2")


@dataclass(frozen=True)
class MagneticSetup:
    """Uniform field in natural units (hbar = c = 1, charge absorbed: e = 1)."""

    eB: float = 1.0
    m_e: float = 1.0

    def __post_init__(self) -> None:
        if not (self.eB > 0 and math.isfinite(self.eB)):
            raise ValueError(f"eB must be positive and finite, got {self.eB}")
        if not (self.m_e > 0 and math.isfinite(self.m_e)):
            raise ValueError(f"m_e must be positive and finite, got {self.m_e}")

    @property
    def l_B(self) -> float:
        return 1.0 / math.sqrt(self.eB)

    @property
    def omega_L(self) -> float:
        return self.eB / (2.0 * self.m_e)

    @property
    def omega_c(self) -> float:
        return self.eB / self.m_e

    @property
    def cyclotron_period(self) -> float:
        return 2.0 * math.pi / self.omega_c

    def energy(self, n: int) -> float:
        return (2 * n + 1) * self.omega_L


def _pad(values: Sequence[float], size: int) -> Tuple[float, ...]:
    return tuple(float(v) for v in values) + (0.0,) * (size - len(values))


@dataclass(frozen=True)
class HarmonicGauge:
    """Harmonic gauge function, stored as the phase e*chi.

    e*chi = sum_k [cos_coeffs[k-1] Re z^k + sin_coeffs[k-1] Im z^k]
            + xy_coeff * (-eB x y / 2),   z = x + i y
    """

    cos_coeffs: Tuple[float, ...] = ()
    sin_coeffs: Tuple[float, ...] = ()
    xy_coeff: float = 0.0

    @property
    def degree(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def is_zero(self) -> bool:
        return self.xy_coeff == 0.0 and not any(self.cos_coeffs) and not any(self.sin_coeffs)

    def __add__(self, other: "HarmonicGauge") -> "HarmonicGauge":
        size = max(self.degree, other.degree)
        cos_a, cos_b = _pad(self.cos_coeffs, size), _pad(other.cos_coeffs, size)
        sin_a, sin_b = _pad(self.sin_coeffs, size), _pad(other.sin_coeffs, size)
        return HarmonicGauge(
            cos_coeffs=tuple(a + b for a, b in zip(cos_a, cos_b)),
            sin_coeffs=tuple(a + b for a, b in zip(sin_a, sin_b)),
            xy_coeff=self.xy_coeff + other.xy_coeff,
        )

    def __neg__(self) -> "HarmonicGauge":
        return HarmonicGauge(
            cos_coeffs=tuple(-c for c in self.cos_coeffs),
            sin_coeffs=tuple(-s for s in self.sin_coeffs),
            xy_coeff=-self.xy_coeff,
        )

    def __sub__(self, other: "HarmonicGauge") -> "HarmonicGauge":
        return self + (-other)

    def _terms(self) -> Iterable[Tuple[int, float, float]]:
        size = self.degree
        cos_c, sin_c = _pad(self.cos_coeffs, size), _pad(self.sin_coeffs, size)
        for k in range(1, size + 1):
            if cos_c[k - 1] or sin_c[k - 1]:
                yield k, cos_c[k - 1], sin_c[k - 1]

    def phase(self, setup: MagneticSetup, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = x + 1j * y
        total = -0.5 * setup.eB * self.xy_coeff * x * y
        for k, c, s in self._terms():
            zk = z ** k
            total = total + c * zk.real + s * zk.imag
        return np.asarray(total, dtype=float)

    def gradient(self, setup: MagneticSetup, x: ArrayLike, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = x + 1j * y
        half = -0.5 * setup.eB * self.xy_coeff
        gx = half * y
        gy = half * x
        for k, c, s in self._terms():
            dz = k * z ** (k - 1)
            gx = gx + c * dz.real + s * dz.imag
            gy = gy - c * dz.imag + s * dz.real
        return np.asarray(gx, dtype=float), np.asarray(gy, dtype=float)

    def hessian(
        self, setup: MagneticSetup, x: ArrayLike, y: ArrayLike
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = x + 1j * y
        hxx = np.zeros(np.broadcast(x, y).shape)
        hxy = np.full(hxx.shape, -0.5 * setup.eB * self.xy_coeff)
        for k, c, s in self._terms():
            if k < 2:
                continue
            d2 = k * (k - 1) * z ** (k - 2)
            hxx = hxx + c * d2.real + s * d2.imag
            hxy = hxy - c * d2.imag + s * d2.real
        # harmonic: chi_yy = -chi_xx
        return hxx, hxy, -hxx


def xy_gauge(coeff: float) -> HarmonicGauge:
    return HarmonicGauge(xy_coeff=float(coeff))


def random_harmonic_gauge(
    rng: np.random.Generator, degree: int = 4, xy_coeff: float = 0.0
) -> HarmonicGauge:
    """Seeded draw; degree-k coefficients are uniform in +-(0.5/k)(1/4)^(k-1)."""
    scales = [0.5 / k * 0.25 ** (k - 1) for k in range(1, degree + 1)]
    cos_c = tuple(float(rng.uniform(-1.0, 1.0) * s) for s in scales)
    sin_c = tuple(float(rng.uniform(-1.0, 1.0) * s) for s in scales)
    return HarmonicGauge(cos_coeffs=cos_c, sin_coeffs=sin_c, xy_coeff=xy_coeff)


@dataclass(frozen=True)
class GaugeChoice:
    tag: str
    base: Optional["GaugeChoice"] = None
    chi: Optional[HarmonicGauge] = field(default=None)

    def __post_init__(self) -> None:
        if self.tag in STANDARD_TAGS:
            if self.base is not None or self.chi is not None:
                raise ValueError(f"standard gauge {self.tag!r} takes no base or chi")
        elif self.tag == "deformed":
            if self.base is None or self.chi is None:
                raise ValueError("deformed gauge needs a base gauge and a harmonic chi")
        else:
            raise ValueError(f"unknown gauge tag {self.tag!r}")

    @property
    def is_standard(self) -> bool:
        return self.tag in STANDARD_TAGS

    def flatten(self) -> Tuple["GaugeChoice", HarmonicGauge]:
        """Return (standard base, accumulated chi)."""
        if self.is_standard:
            return self, HarmonicGauge()
        root, chi = self.base.flatten()
        return root, chi + self.chi

    @property
    def label(self) -> str:
        if self.is_standard:
            return self.tag
        return f"{self.base.label}+chi"


SYMMETRIC = GaugeChoice("symmetric")
LANDAU1 = GaugeChoice("landau1")
LANDAU2 = GaugeChoice("landau2")


def deform(base: GaugeChoice, chi: HarmonicGauge) -> GaugeChoice:
    return GaugeChoice("deformed", base=base, chi=chi)


def _standard_potential(
    setup: MagneticSetup, tag: str, x: np.ndarray, y: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    eB = setup.eB
    if tag == "symmetric":
        return -0.5 * eB * y, 0.5 * eB * x
    if tag == "landau1":
        return -eB * y, np.zeros_like(x)
    return np.zeros_like(y), eB * x


# d(Ax)/dx, d(Ax)/dy, d(Ay)/dx, d(Ay)/dy in units of eB
_STANDARD_JACOBIAN = {
    "symmetric": (0.0, -0.5, 0.5, 0.0),
    "landau1": (0.0, -1.0, 0.0, 0.0),
    "landau2": (0.0, 0.0, 1.0, 0.0),
}


def potential(
    setup: MagneticSetup, gauge: GaugeChoice, x: ArrayLike, y: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    """Vector potential e*A at (x, y) (broadcasts over arrays)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    root, chi = gauge.flatten()
    ax, ay = _standard_potential(setup, root.tag, x, y)
    if not chi.is_zero():
        gx, gy = chi.gradient(setup, x, y)
        ax, ay = ax + gx, ay + gy
    return ax, ay


def potential_jacobian(
    setup: MagneticSetup, gauge: GaugeChoice, x: ArrayLike, y: ArrayLike
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    root, chi = gauge.flatten()
    shape = x.shape
    jac = [np.full(shape, setup.eB * entry) for entry in _STANDARD_JACOBIAN[root.tag]]
    if not chi.is_zero():
        hxx, hxy, hyy = chi.hessian(setup, x, y)
        jac[0] = jac[0] + hxx
        jac[1] = jac[1] + hxy
        jac[2] = jac[2] + hxy
        jac[3] = jac[3] + hyy
    return jac[0], jac[1], jac[2], jac[3]


def _as_points(sample_points: Sequence[Sequence[float]]) -> Tuple[np.ndarray, np.ndarray]:
    points = np.asarray(sample_points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
        raise ValueError("sample_points must be a non-empty sequence of (x, y) pairs")
    return points[:, 0], points[:, 1]


def curl_check(setup: MagneticSetup, gauge: GaugeChoice, sample_points: Sequence[Sequence[float]]) -> float:
    """Max |dAy/dx - dAx/dy - eB| over the samples, from analytic derivatives."""
    x, y = _as_points(sample_points)
    _, dax_dy, day_dx, _ = potential_jacobian(setup, gauge, x, y)
    return float(np.max(np.abs(day_dx - dax_dy - setup.eB)))


def divergence(setup: MagneticSetup, gauge: GaugeChoice, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    dax_dx, _, _, day_dy = potential_jacobian(setup, gauge, x, y)
    return dax_dx + day_dy


def max_divergence(setup: MagneticSetup, gauge: GaugeChoice, sample_points: Sequence[Sequence[float]]) -> float:
    x, y = _as_points(sample_points)
    return float(np.max(np.abs(divergence(setup, gauge, x, y))))


def gauge_phase(setup: MagneticSetup, chi: HarmonicGauge, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """exp(-i e chi(x, y)); multiplies a state when A -> A + grad chi."""
    values = np.exp(-1j * chi.phase(setup, x, y))
    if values.ndim == 0:
        return complex(values)
    return values


def gauge_offset(gauge: GaugeChoice) -> HarmonicGauge:
    """chi such that A(gauge) = A(landau1) + grad chi."""
    root, chi = gauge.flatten()
    if root.tag == "symmetric":
        return xy_gauge(-1.0) + chi
    if root.tag == "landau2":
        return xy_gauge(-2.0) + chi
    return chi


def gauge_transition(source: GaugeChoice, target: GaugeChoice) -> HarmonicGauge:
    """chi with A(target) = A(source) + grad chi."""
    return gauge_offset(target) - gauge_offset(source)


def _parse_coefficients(text: str) -> Tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def parse_gauge(text: str) -> GaugeChoice:
    """Parse 'base[;c=..][;s=..][;xy=..]', e.g. 'symmetric;c=0.1,0.02;xy=1'."""
    parts = [part.strip() for part in text.strip().split(";") if part.strip()]
    if not parts:
        raise ValueError("empty gauge specification")
    base_tag = parts[0].lower()
    if base_tag not in STANDARD_TAGS:
        raise ValueError(f"unknown base gauge {parts[0]!r}; expected one of {', '.join(STANDARD_TAGS)}")
    cos_c: Tuple[float, ...] = ()
    sin_c: Tuple[float, ...] = ()
    xy = 0.0
    for part in parts[1:]:
        if "=" not in part:
            raise ValueError(f"malformed gauge term {part!r}")
        key, value = part.split("=", 1)
        key = key.strip().lower()
        try:
            if key == "c":
                cos_c = _parse_coefficients(value)
            elif key == "s":
                sin_c = _parse_coefficients(value)
            elif key == "xy":
                xy = float(value)
            else:
                raise ValueError(f"unknown gauge term {key!r}")
        except ValueError as exc:
            raise ValueError(f"bad gauge term {part!r}: {exc}") from exc
    base = GaugeChoice(base_tag)
    chi = HarmonicGauge(cos_coeffs=cos_c, sin_coeffs=sin_c, xy_coeff=xy)
    if chi.is_zero():
        return base
    return deform(base, chi)


def format_gauge(gauge: GaugeChoice) -> str:
    root, chi = gauge.flatten()
    parts: List[str] = [root.tag]
    if chi.cos_coeffs:
        parts.append("c=" + ",".join(repr(c) for c in chi.cos_coeffs))
    if chi.sin_coeffs:
        parts.append("s=" + ",".join(repr(s) for s in chi.sin_coeffs))
    if chi.xy_coeff:
        parts.append(f"xy={chi.xy_coeff!r}")
    return ";".join(parts)
