import csv
import json
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence

from classical_dynamics import ConservedReport, Trajectory
from run_config import ConfigurationError


REPORT_COLUMNS = ["suite", "anchor", "re", "im", "expected_re", "expected_im", "deviation", "pass"]
TRAJECTORY_COLUMNS = [
    "t", "x", "y", "vx", "vy",
    "p_cons_x", "p_cons_y", "L_cons_z", "p_mech_x", "p_mech_y", "L_mech_z", "energy",
]


@dataclass(frozen=True)
class ReportRow:
    suite: str
    anchor: str
    value: complex
    expected: complex
    deviation: float
    passed: bool
    expect_equal: bool = True

    @property
    def key(self):
        return self.suite, self.anchor


def equality_row(suite: str, anchor: str, value: complex, expected: complex, tolerance: float) -> ReportRow:
    deviation = abs(complex(value) - complex(expected))
    return ReportRow(suite, anchor, complex(value), complex(expected), deviation, deviation <= tolerance)


def bound_row(suite: str, anchor: str, value: float, bound: float) -> ReportRow:
    """Row for a quantity that must stay at or below a bound (drifts, residuals)."""
    return ReportRow(suite, anchor, complex(value), 0j, abs(value), abs(value) <= bound)


def at_least_row(suite: str, anchor: str, value: float, minimum: float, nominal: float) -> ReportRow:
    return ReportRow(suite, anchor, complex(value), complex(nominal), abs(value - nominal), value >= minimum)


def inequality_row(suite: str, anchor: str, value: complex, expected: complex, margin: float) -> ReportRow:
    deviation = abs(complex(value) - complex(expected))
    return ReportRow(suite, anchor, complex(value), complex(expected), deviation, deviation > margin, expect_equal=False)


def all_required_pass(rows: Iterable[ReportRow]) -> bool:
    return all(row.passed for row in rows if row.expect_equal)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _row_dict(row: ReportRow) -> Dict[str, object]:
    return {
        "suite": row.suite,
        "anchor": row.anchor,
        "re": row.value.real,
        "im": row.value.imag,
        "expected_re": row.expected.real,
        "expected_im": row.expected.imag,
        "deviation": row.deviation,
        "pass": row.passed,
    }


def sort_rows(rows: Iterable[ReportRow]) -> List[ReportRow]:
    return sorted(rows, key=lambda row: row.key)


def ensure_out_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigurationError(f"output directory {path} is not writable")
    return path


def write_csv(path: str, rows: Sequence[ReportRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            record = _row_dict(row)
            for key in ("re", "im", "expected_re", "expected_im", "deviation"):
                record[key] = _fmt(record[key])
            record["pass"] = "true" if row.passed else "false"
            writer.writerow(record)


def write_report(
    out_dir: str,
    suite: str,
    rows: Iterable[ReportRow],
    header: Dict[str, object],
    output_format: str = "json",
) -> str:
    """Write a suite report (rows sorted by key) and return its path."""
    ensure_out_dir(out_dir)
    ordered = sort_rows(rows)
    header = dict(header)
    header["suite"] = suite
    header["rows"] = len(ordered)
    header["failures"] = sum(1 for row in ordered if row.expect_equal and not row.passed)
    if output_format == "csv":
        path = os.path.join(out_dir, f"{suite}.csv")
        write_csv(path, ordered)
        with open(os.path.join(out_dir, f"{suite}_header.json"), "w", encoding="utf-8") as handle:
            json.dump(header, handle, ensure_ascii=False, indent=2)
        return path
    path = os.path.join(out_dir, f"{suite}.json")
    payload = {"header": header, "rows": [_row_dict(row) for row in ordered]}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2)
    return path


def write_trajectory_csv(path: str, trajectory: Trajectory, report: ConservedReport, stride: int = 1) -> int:
    """Write every stride-th sample (and the last one); return the number of rows."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    conserved = report.conserved
    columns = [
        trajectory.t, trajectory.x, trajectory.y, trajectory.vx, trajectory.vy,
        conserved.p_cons_x, conserved.p_cons_y, conserved.l_cons_z,
        report.p_mech_x, report.p_mech_y, report.l_mech_z, report.energy,
    ]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRAJECTORY_COLUMNS)
        indices = list(range(0, len(trajectory), stride))
        if indices[-1] != len(trajectory) - 1:
            indices.append(len(trajectory) - 1)
        for i in indices:
            writer.writerow([_fmt(float(column[i])) for column in columns])
    return len(indices)
