import math
import sys
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
from scipy.special import gammaln

from gauge_fields import MagneticSetup


ArrayLike = Union[float, np.ndarray]

_RESCALE_AT = 1e150
_LOG_RESCALE = math.log(_RESCALE_AT)
_LOG_MAX_FLOAT = math.log(sys.float_info.max)
_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)


class QuantumNumberError(ValueError):
    pass


@dataclass(frozen=True)
class PolyEval:
    """Polynomial value stored as mantissa * exp(log_scale)."""

    value: float
    degree: int
    argument: float
    log_scale: float = 0.0

    @property
    def log_abs(self) -> float:
        if self.value == 0.0:
            return -math.inf
        return math.log(abs(self.value)) + self.log_scale

    def as_float(self) -> float:
        if self.value == 0.0:
            return 0.0
        log_abs = self.log_abs
        if log_abs > _LOG_MAX_FLOAT:
            return math.copysign(math.inf, self.value)
        return math.copysign(math.exp(log_abs), self.value)


@dataclass(frozen=True)
class NormConstants:
    N_n: float
    N_nm: float
    C_nm: float


def check_quantum_numbers(n: int, m: int) -> None:
    if n < 0:
        raise QuantumNumberError(f"Landau level n must be non-negative, got n={n}")
    if m > n:
        raise QuantumNumberError(f"m must satisfy m <= n, got n={n}, m={m}")


def _check_degree(n: int) -> None:
    if n < 0:
        raise QuantumNumberError(f"polynomial degree must be non-negative, got {n}")


def _unwrap(values: np.ndarray) -> ArrayLike:
    if values.ndim == 0:
        return float(values)
    return values


def _scaled_recurrence(
    degree: int,
    first: float,
    second: float,
    step: Callable[[int, float, float], float],
) -> Tuple[float, float]:
    if degree == 0:
        return first, 0.0
    prev, cur, log_scale = first, second, 0.0
    for k in range(1, degree):
        prev, cur = cur, step(k, cur, prev)
        if abs(cur) > _RESCALE_AT:
            prev /= _RESCALE_AT
            cur /= _RESCALE_AT
            log_scale += _LOG_RESCALE
    return cur, log_scale


def hermite(n: int, xi: ArrayLike) -> ArrayLike:
    """Physicists' Hermite polynomial H_n by upward recurrence (vectorized)."""
    _check_degree(n)
    xi = np.asarray(xi, dtype=float)
    prev = np.ones_like(xi)
    if n == 0:
        return _unwrap(prev)
    cur = 2.0 * xi
    for k in range(1, n):
        prev, cur = cur, 2.0 * xi * cur - 2.0 * k * prev
    return _unwrap(cur)


def hermite_eval(n: int, xi: float) -> PolyEval:
    _check_degree(n)
    xi = float(xi)
    value, log_scale = _scaled_recurrence(
        n, 1.0, 2.0 * xi, lambda k, cur, prev: 2.0 * xi * cur - 2.0 * k * prev
    )
    return PolyEval(value=value, degree=n, argument=xi, log_scale=log_scale)


def hermite_function(n: int, xi: ArrayLike) -> ArrayLike:
    """Normalized Hermite function (sqrt(pi) 2^n n!)^(-1/2) H_n(xi) exp(-xi^2/2).

    Uses the normalized recurrence, so high degrees never pass through the
    large raw polynomial values.
    """
    _check_degree(n)
    xi = np.asarray(xi, dtype=float)
    prev = math.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n == 0:
        return _unwrap(prev)
    cur = math.sqrt(2.0) * xi * prev
    for k in range(1, n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * xi * cur - math.sqrt(k / (k + 1)) * prev
    return _unwrap(cur)


def _check_alpha(alpha: int) -> None:
    if alpha < 0 or int(alpha) != alpha:
        raise QuantumNumberError(f"Laguerre order must be a non-negative integer, got {alpha}")


def assoc_laguerre(n: int, alpha: int, xi: ArrayLike) -> ArrayLike:
    """Associated Laguerre polynomial L^alpha_n by upward recurrence (vectorized)."""
    _check_degree(n)
    _check_alpha(alpha)
    xi = np.asarray(xi, dtype=float)
    prev = np.ones_like(xi)
    if n == 0:
        return _unwrap(prev)
    cur = 1.0 + alpha - xi
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - xi) * cur - (k + alpha) * prev) / (k + 1)
    return _unwrap(cur)


def laguerre_eval(n: int, alpha: int, xi: float) -> PolyEval:
    _check_degree(n)
    _check_alpha(alpha)
    xi = float(xi)
    value, log_scale = _scaled_recurrence(
        n,
        1.0,
        1.0 + alpha - xi,
        lambda k, cur, prev: ((2 * k + 1 + alpha - xi) * cur - (k + alpha) * prev) / (k + 1),
    )
    return PolyEval(value=value, degree=n, argument=xi, log_scale=log_scale)


def norm_constants(setup: MagneticSetup, n: int, m: int) -> NormConstants:
    """Normalization constants N_n, N_{n,m} and C_{n,m} through log-gamma."""
    check_quantum_numbers(n, m)
    log_l = math.log(setup.l_B)
    nu = n - m
    log_N_n = -0.5 * (0.5 * _LOG_PI + n * _LOG_2 + gammaln(n + 1) + log_l)
    k = n - (abs(m) + m) // 2
    log_N_nm = 0.5 * (gammaln(k + 1) - gammaln(k + abs(m) + 1)) - log_l
    log_C_nm = log_l - 0.5 * (0.5 * _LOG_PI + nu * _LOG_2 + gammaln(nu + 1) + log_l)
    return NormConstants(
        N_n=math.exp(log_N_n),
        N_nm=math.exp(log_N_nm),
        C_nm=math.exp(log_C_nm),
    )
