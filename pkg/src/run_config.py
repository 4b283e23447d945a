import os
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, List, Mapping, Optional

from gauge_fields import GaugeChoice, MagneticSetup, parse_gauge


BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(BASE_DIR)
DATA_DIR = os.path.join(PROJECT_ROOT, "data")
ENV_PATH = os.path.join(PROJECT_ROOT, ".env")
DEFAULT_OUT_DIR = os.path.join(DATA_DIR, "reports")
ENV_PREFIX = "LANDAU_"


class ConfigurationError(RuntimeError):
    pass


def load_key_values(path: str) -> Dict[str, str]:
    """Read KEY=VALUE lines; blank lines and # comments are skipped."""
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as file:
        for lineno, line in enumerate(file, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            value = value.strip().strip('"').strip("'")
            values[key] = value
    return values


def load_dotenv(path: str = ENV_PATH) -> None:
    if not os.path.exists(path):
        return
    for key, value in load_key_values(path).items():
        os.environ.setdefault(key, value)


@dataclass
class RunConfig:
    eB: float = 1.0
    m_e: float = 1.0
    n_max: int = 5
    m_min: int = -5
    sigma_list: List[float] = field(default_factory=lambda: [0.2, 1.0, 5.0])
    kx_list: List[float] = field(default_factory=lambda: [-2.0, 0.0, 1.5])
    kernel_kx_list: List[float] = field(default_factory=lambda: [-2.0, -1.0, 0.0, 1.0, 2.0])
    packet_n_max: int = 3
    kernel_n_max: int = 4
    grid_points: int = 160
    grid_half_width: float = 8.0
    fd_step: float = 1e-3
    tol_fock: float = 1e-12
    tol_quadrature: float = 1e-8
    tol_packet: float = 1e-6
    tol_residual: float = 1e-6
    tol_classical: float = 1e-6
    tol_identity: float = 1e-12
    gauge: str = "symmetric"
    chi_draws: int = 20
    chi_degree: int = 4
    seed: int = 20240611
    x0: float = 0.0
    y0: float = 0.0
    vx0: float = 1.0
    vy0: float = 0.0
    periods: int = 100
    steps_per_period: int = 1000
    workers: int = 4
    output_format: str = "json"
    out_dir: str = DEFAULT_OUT_DIR

    @property
    def setup(self) -> MagneticSetup:
        return MagneticSetup(eB=self.eB, m_e=self.m_e)

    @property
    def base_gauge(self) -> GaugeChoice:
        return parse_gauge(self.gauge)

    def validate(self) -> None:
        problems: List[str] = []
        for item in fields(self):
            if item.name.startswith("tol_") and not getattr(self, item.name) > 0:
                problems.append(f"{item.name} must be > 0")
        if not self.eB > 0:
            problems.append("eB must be > 0")
        if not self.m_e > 0:
            problems.append("m_e must be > 0")
        if self.n_max < 0:
            problems.append("n_max must be >= 0")
        if self.m_min > self.n_max:
            problems.append("m_min must be <= n_max")
        if self.packet_n_max < 0 or self.kernel_n_max < 0:
            problems.append("packet_n_max and kernel_n_max must be >= 0")
        if not self.sigma_list or any(not s > 0 for s in self.sigma_list):
            problems.append("sigma_list must hold positive widths")
        if self.grid_points < 8:
            problems.append("grid_points must be >= 8")
        if not self.grid_half_width > 0:
            problems.append("grid_half_width must be > 0")
        if not self.fd_step > 0:
            problems.append("fd_step must be > 0")
        if self.chi_draws < 0 or self.chi_degree < 1:
            problems.append("chi_draws must be >= 0 and chi_degree >= 1")
        if self.periods < 1 or self.steps_per_period < 4:
            problems.append("periods must be >= 1 and steps_per_period >= 4")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if self.output_format not in ("csv", "json"):
            problems.append("output_format must be csv or json")
        try:
            parse_gauge(self.gauge)
        except ValueError as exc:
            problems.append(f"gauge: {exc}")
        if problems:
            raise ConfigurationError("invalid configuration: " + "; ".join(problems))

    def header(self) -> Dict[str, object]:
        return asdict(self)


_FIELD_TYPES = {item.name: item.type for item in fields(RunConfig)}
_FIELD_NAMES = {name.lower(): name for name in _FIELD_TYPES}


def _resolve(key: str) -> Optional[str]:
    return _FIELD_NAMES.get(key.strip().lower())


def _coerce(key: str, raw: str) -> object:
    kind = _FIELD_TYPES[key]
    text = raw.strip()
    try:
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float"):
            return float(text)
        if kind in (List[float], "List[float]"):
            return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {raw!r}") from exc
    return text


def _apply(values: Dict[str, object], source: Mapping[str, str], origin: str) -> None:
    for key, raw in source.items():
        name = _resolve(key)
        if name is None:
            raise ConfigurationError(f"unknown key {key!r} in {origin}")
        values[name] = _coerce(name, raw)


def env_values(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    environ = os.environ if environ is None else environ
    picked: Dict[str, str] = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX) or name == ENV_PREFIX + "CONFIG":
            continue
        key = _resolve(name[len(ENV_PREFIX):])
        if key is not None:
            picked[key] = value
    return picked


def build_config(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, object]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Defaults < LANDAU_* environment < config file < overrides."""
    values: Dict[str, object] = {}
    _apply(values, env_values(environ), "environment")
    if config_path is None:
        config_path = (os.environ if environ is None else environ).get(ENV_PREFIX + "CONFIG")
    if config_path:
        try:
            file_values = load_key_values(config_path)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {config_path}: {exc}") from exc
        _apply(values, file_values, config_path)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"unknown override {key!r}")
        values[key] = _coerce(key, value) if isinstance(value, str) else value
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc
    config.validate()
    return config
