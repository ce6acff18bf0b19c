"""Serialization of greedy traces and validation reports.

Trace CSVs use the fixed header
``iteration,main_point,alpha_point,beta_point,gamma_point,max_estimate,max_true_error,rom_dim``
with sample points rendered one parameter per ``name=<re><+im>i`` token,
semicolon-separated, all floats at 17 significant digits so a write/read
round trip is exact and reruns are byte-identical. A JSON mirror carries
the same rows with points as ``{name: [re, im]}`` pairs.
"""

import csv
import json
import re as _re
from dataclasses import dataclass, field

__all__ = [
    "EffectivityRow",
    "EffectivityReport",
    "TRACE_HEADER",
    "format_point",
    "parse_point",
    "write_trace_csv",
    "write_trace_json",
    "read_trace",
    "write_report",
    "read_report",
]

TRACE_HEADER = [
    "iteration",
    "main_point",
    "alpha_point",
    "beta_point",
    "gamma_point",
    "max_estimate",
    "max_true_error",
    "rom_dim",
]

_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = _re.compile(rf"^({_FLOAT})({_FLOAT})i$")


def _fmt(value):
    return f"{value:.17g}"


def format_point(point):
    """``{"s": 1+2j, "d": 1.5}`` -> ``"d=1.5+0i;s=1+2i"`` (sorted names)."""
    if point is None:
        return ""
    parts = []
    for name in sorted(point):
        value = complex(point[name])
        parts.append(f"{name}={_fmt(value.real)}{value.imag:+.17g}i")
    return ";".join(parts)


def parse_scalar(text):
    """Parse ``1.5`` or ``1.5-2i`` into a complex number."""
    text = text.strip()
    match = _COMPLEX_RE.match(text)
    if match:
        return complex(float(match.group(1)), float(match.group(2)))
    try:
        return complex(float(text))
    except ValueError:
        raise ValueError(f"malformed scalar value {text!r}") from None


def parse_point(text):
    """Inverse of format_point; empty text -> None."""
    if not text:
        return None
    point = {}
    for token in text.split(";"):
        name, _, payload = token.partition("=")
        if not payload:
            raise ValueError(f"malformed point token {token!r}")
        match = _COMPLEX_RE.match(payload)
        if not match:
            raise ValueError(f"malformed complex value {payload!r}")
        point[name] = complex(float(match.group(1)), float(match.group(2)))
    return point


def _trace_rows(trace):
    for record in trace:
        yield {
            "iteration": record.iteration,
            "main_point": format_point(record.main_point),
            "alpha_point": format_point(record.alpha_point),
            "beta_point": format_point(record.beta_point),
            "gamma_point": format_point(record.gamma_point),
            "max_estimate": _fmt(record.max_estimate),
            "max_true_error": "" if record.max_true_error is None else _fmt(record.max_true_error),
            "rom_dim": record.rom_dimension,
        }


def write_trace_csv(path, trace):
    """Trace rows as CSV under the fixed header (header-only when empty)."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=TRACE_HEADER, lineterminator="\n")
        writer.writeheader()
        for row in _trace_rows(trace):
            writer.writerow(row)


def _point_json(point):
    if point is None:
        return None
    return {
        name: [complex(value).real, complex(value).imag]
        for name, value in sorted(point.items())
    }


def write_trace_json(path, trace, extra=None):
    payload = {
        "trace": [
            {
                "iteration": record.iteration,
                "main_point": _point_json(record.main_point),
                "alpha_point": _point_json(record.alpha_point),
                "beta_point": _point_json(record.beta_point),
                "gamma_point": _point_json(record.gamma_point),
                "max_estimate": record.max_estimate,
                "max_true_error": record.max_true_error,
                "rom_dim": record.rom_dimension,
            }
            for record in trace
        ]
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


@dataclass
class TraceRow:
    """One parsed trace row (points as dicts of complex, or None)."""

    iteration: int
    main_point: dict | None
    alpha_point: dict | None
    beta_point: dict | None
    gamma_point: dict | None
    max_estimate: float
    max_true_error: float | None
    rom_dimension: int


def read_trace(path):
    """Read a trace CSV (or the JSON mirror) back into TraceRow objects."""
    path = str(path)
    if path.endswith(".json"):
        with open(path) as handle:
            payload = json.load(handle)
        rows = []
        for row in payload["trace"]:
            def from_json(p):
                if p is None:
                    return None
                return {name: complex(re_im[0], re_im[1]) for name, re_im in p.items()}

            rows.append(
                TraceRow(
                    iteration=int(row["iteration"]),
                    main_point=from_json(row["main_point"]),
                    alpha_point=from_json(row["alpha_point"]),
                    beta_point=from_json(row["beta_point"]),
                    gamma_point=from_json(row["gamma_point"]),
                    max_estimate=float(row["max_estimate"]),
                    max_true_error=None
                    if row["max_true_error"] is None
                    else float(row["max_true_error"]),
                    rom_dimension=int(row["rom_dim"]),
                )
            )
        return rows
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != TRACE_HEADER:
            raise ValueError(
                f"unexpected trace header {reader.fieldnames!r}, expected {TRACE_HEADER!r}"
            )
        rows = []
        for row in reader:
            rows.append(
                TraceRow(
                    iteration=int(row["iteration"]),
                    main_point=parse_point(row["main_point"]),
                    alpha_point=parse_point(row["alpha_point"]),
                    beta_point=parse_point(row["beta_point"]),
                    gamma_point=parse_point(row["gamma_point"]),
                    max_estimate=float(row["max_estimate"]),
                    max_true_error=float(row["max_true_error"]) if row["max_true_error"] else None,
                    rom_dimension=int(row["rom_dim"]),
                )
            )
        return rows


@dataclass
class EffectivityRow:
    sample: dict
    estimate: float
    true_error: float
    effectivity: float | None  # None when true_error is 0 (nothing to divide by)


@dataclass
class EffectivityReport:
    """Per-sample estimate/true-error pairs plus summary statistics.

    Effectivities are reported twice: over all rows, and restricted to
    rows whose true error exceeds ``filter_threshold`` (ratios below it
    measure rounding noise, not estimator quality). When no row passes the
    filter, the filtered fields are None and ``all_below_threshold`` is
    set.
    """

    rows: list = field(default_factory=list)
    min_eff_all: float | None = None
    max_eff_all: float | None = None
    min_eff_filtered: float | None = None
    max_eff_filtered: float | None = None
    filter_threshold: float = 1e-11
    max_true_error: float = 0.0
    skipped_singular: int = 0
    all_below_threshold: bool = False

    @classmethod
    def from_rows(cls, rows, skipped_singular=0, filter_threshold=1e-11):
        effs = [r.effectivity for r in rows if r.effectivity is not None]
        filtered = [
            r.effectivity
            for r in rows
            if r.effectivity is not None and r.true_error >= filter_threshold
        ]
        return cls(
            rows=list(rows),
            min_eff_all=min(effs) if effs else None,
            max_eff_all=max(effs) if effs else None,
            min_eff_filtered=min(filtered) if filtered else None,
            max_eff_filtered=max(filtered) if filtered else None,
            filter_threshold=filter_threshold,
            max_true_error=max((r.true_error for r in rows), default=0.0),
            skipped_singular=skipped_singular,
            all_below_threshold=not filtered,
        )

    def summary(self):
        return {
            "min_eff_all": self.min_eff_all,
            "max_eff_all": self.max_eff_all,
            "min_eff_filtered": self.min_eff_filtered,
            "max_eff_filtered": self.max_eff_filtered,
            "filter_threshold": self.filter_threshold,
            "max_true_error": self.max_true_error,
            "skipped_singular": self.skipped_singular,
            "all_below_threshold": self.all_below_threshold,
        }


def write_report(report, csv_path=None, json_path=None):
    """Write an EffectivityReport as row CSV and/or JSON (rows + summary)."""
    if csv_path is not None:
        with open(csv_path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["sample", "estimate", "true_error", "effectivity"])
            for row in report.rows:
                writer.writerow(
                    [
                        format_point(row.sample),
                        _fmt(row.estimate),
                        _fmt(row.true_error),
                        "" if row.effectivity is None else _fmt(row.effectivity),
                    ]
                )
    if json_path is not None:
        payload = {
            "summary": report.summary(),
            "rows": [
                {
                    "sample": _point_json(row.sample),
                    "estimate": row.estimate,
                    "true_error": row.true_error,
                    "effectivity": row.effectivity,
                }
                for row in report.rows
            ],
        }
        with open(json_path, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")


def read_report(json_path):
    """Load the JSON form written by write_report."""
    with open(json_path) as handle:
        payload = json.load(handle)
    rows = [
        EffectivityRow(
            sample={name: complex(v[0], v[1]) for name, v in row["sample"].items()},
            estimate=row["estimate"],
            true_error=row["true_error"],
            effectivity=row["effectivity"],
        )
        for row in payload["rows"]
    ]
    summary = payload["summary"]
    report = EffectivityReport.from_rows(
        rows,
        skipped_singular=summary["skipped_singular"],
        filter_threshold=summary["filter_threshold"],
    )
    return report
