"""Power-trace ingestion, workload-to-energy regression and scoring.

The measurement side of the pipeline: instantaneous power traces are
integrated into joules with the trapezoidal rule (exact on piecewise
linear power), repeated runs are aggregated with a trimmed mean, and an
ordinary-least-squares line maps transistor-operation workloads to
energy. Closed-form OLS keeps the two-parameter fit deterministic.

File formats:

* canonical power trace: CSV with header ``elapsed_s,power_w``;
* vendor logs: adapted via a column-mapping config (timestamp column
  name plus format, power column name);
* energy samples: CSV with header ``model_id,run_id,joules``;
* fitted model: JSON with keys ``intercept_j``, ``slope_j_per_to``,
  ``r_squared``, ``n_points``.

Independent trace files can be ingested concurrently; fitting,
prediction and scoring are pure functions over immutable values.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

from .model import ParseError


class TraceError(ValueError):
    """A power trace is malformed (too short or non-monotone time)."""


class DegenerateFitError(ValueError):
    """The fit points cannot determine a line."""


@dataclass(frozen=True)
class PowerTrace:
    """Time-stamped instantaneous power samples.

    Times are seconds and strictly increasing; power is watts and
    non-negative; at least two samples are required.
    """

    times: tuple[float, ...]
    watts: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "watts", tuple(float(p) for p in self.watts))
        if len(self.times) != len(self.watts):
            raise TraceError("times and watts differ in length")
        if len(self.times) < 2:
            raise TraceError("a power trace needs at least 2 samples")
        for i in range(1, len(self.times)):
            if self.times[i] <= self.times[i - 1]:
                raise TraceError(f"time must be strictly increasing; "
                                 f"violated at sample index {i}")
        for i, p in enumerate(self.watts):
            if p < 0:
                raise TraceError(f"power must be non-negative; "
                                 f"violated at sample index {i}")


def integrate_power(trace: PowerTrace) -> float:
    """Energy in joules by the trapezoidal rule."""
    t = np.asarray(trace.times, dtype=np.float64)
    p = np.asarray(trace.watts, dtype=np.float64)
    return float(np.sum(np.diff(t) * (p[:-1] + p[1:]) * 0.5))


@dataclass(frozen=True)
class ColumnAdapter:
    """Maps a vendor power-log layout onto the canonical trace.

    ``time_format`` is either ``"seconds"`` for numeric elapsed seconds
    or a strptime pattern; pattern timestamps are converted to seconds
    elapsed since the first row.
    """

    time_column: str
    power_column: str
    time_format: str = "seconds"


def parse_adapter(text: str) -> ColumnAdapter:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("adapter config: expected an object")
    allowed = {"time_column", "power_column", "time_format"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ParseError(f"adapter config: unknown key(s) {', '.join(unknown)}")
    for key in ("time_column", "power_column"):
        if key not in doc or not isinstance(doc[key], str):
            raise ParseError(f"adapter config: {key} must be a string")
    fmt = doc.get("time_format", "seconds")
    if not isinstance(fmt, str):
        raise ParseError("adapter config: time_format must be a string")
    return ColumnAdapter(doc["time_column"], doc["power_column"], fmt)


def load_adapter(path) -> ColumnAdapter:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_adapter(fh.read())


def parse_power_trace(text: str, adapter: ColumnAdapter | None = None) -> PowerTrace:
    """Parse a trace CSV: canonical layout, or a vendor layout through
    ``adapter``."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise TraceError("trace file is empty")
    time_col = adapter.time_column if adapter else "elapsed_s"
    power_col = adapter.power_column if adapter else "power_w"
    for col in (time_col, power_col):
        if col not in reader.fieldnames:
            raise TraceError(f"trace is missing column {col!r} "
                             f"(found: {', '.join(reader.fieldnames)})")
    times: list[float] = []
    watts: list[float] = []
    t0: datetime | None = None
    for row_index, row in enumerate(reader, start=2):
        raw_t, raw_p = row[time_col], row[power_col]
        try:
            if adapter is None or adapter.time_format == "seconds":
                t = float(raw_t)
            else:
                stamp = datetime.strptime(raw_t.strip(), adapter.time_format)
                if t0 is None:
                    t0 = stamp
                t = (stamp - t0).total_seconds()
            p = float(raw_p)
        except (TypeError, ValueError):
            raise TraceError(f"row {row_index}: cannot parse sample "
                             f"({raw_t!r}, {raw_p!r})") from None
        times.append(t)
        watts.append(p)
    return PowerTrace(tuple(times), tuple(watts))


def read_power_trace(path, adapter: ColumnAdapter | None = None) -> PowerTrace:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_power_trace(fh.read(), adapter)


def trimmed_mean(samples: Sequence[float], k: int = 5) -> float:
    """Mean after dropping the k largest and k smallest samples.

    Requires more than 2k samples. Tie handling is immaterial: any
    choice of which duplicates to drop yields the same mean.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    n = len(samples)
    if n <= 2 * k:
        raise ValueError(f"need more than {2 * k} samples to trim "
                         f"{k} from each end, got {n}")
    kept = sorted(float(s) for s in samples)[k:n - k]
    return sum(kept) / len(kept)


@dataclass(frozen=True)
class EnergySample:
    model_id: str
    run_id: str
    joules: float

    def __post_init__(self) -> None:
        if self.joules < 0:
            raise ValueError(f"joules must be non-negative, got {self.joules}")


def write_energy_samples(samples: Iterable[EnergySample]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model_id", "run_id", "joules"])
    for s in samples:
        writer.writerow([s.model_id, s.run_id, repr(float(s.joules))])
    return out.getvalue()


def read_energy_samples(text: str) -> list[EnergySample]:
    reader = csv.DictReader(io.StringIO(text))
    expected = ["model_id", "run_id", "joules"]
    if reader.fieldnames != expected:
        raise ParseError(f"energy sample file must have header "
                         f"{','.join(expected)}")
    samples = []
    for row_index, row in enumerate(reader, start=2):
        try:
            samples.append(EnergySample(row["model_id"], row["run_id"],
                                        float(row["joules"])))
        except (TypeError, ValueError):
            raise ParseError(f"row {row_index}: cannot parse energy sample") from None
    return samples


@dataclass(frozen=True)
class LinearModel:
    """Affine workload-to-energy map with fit diagnostics."""

    intercept: float
    slope: float
    r_squared: float
    n_points: int

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError("a linear model needs at least 2 fit points")
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError(f"r_squared must lie in [0, 1], got {self.r_squared}")

    def predict(self, tos: float) -> float:
        return self.intercept + self.slope * tos


def fit(points: Sequence[tuple[float, float]]) -> LinearModel:
    """Closed-form ordinary least squares over (workload, joules) pairs."""
    if len(points) < 2:
        raise DegenerateFitError(f"need at least 2 points, got {len(points)}")
    x = np.asarray([p[0] for p in points], dtype=np.float64)
    y = np.asarray([p[1] for p in points], dtype=np.float64)
    x_mean = float(x.mean())
    y_mean = float(y.mean())
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise DegenerateFitError("all workload values are equal; "
                                 "the slope is undetermined")
    slope = float(np.sum((x - x_mean) * (y - y_mean)) / sxx)
    intercept = y_mean - slope * x_mean
    sst = float(np.sum((y - y_mean) ** 2))
    if sst == 0.0:
        r_squared = 1.0
    else:
        ssr = float(np.sum((y - (intercept + slope * x)) ** 2))
        r_squared = min(1.0, max(0.0, 1.0 - ssr / sst))
    return LinearModel(intercept=intercept, slope=slope,
                       r_squared=r_squared, n_points=len(points))


def predict(model: LinearModel, tos: float) -> float:
    return model.predict(tos)


def write_linear_model(model: LinearModel) -> str:
    doc = {
        "intercept_j": model.intercept,
        "slope_j_per_to": model.slope,
        "r_squared": model.r_squared,
        "n_points": model.n_points,
    }
    return json.dumps(doc, indent=2) + "\n"


def read_linear_model(text: str) -> LinearModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("fitted model: expected an object")
    keys = {"intercept_j", "slope_j_per_to", "r_squared", "n_points"}
    unknown = sorted(set(doc) - keys)
    if unknown:
        raise ParseError(f"fitted model: unknown key(s) {', '.join(unknown)}")
    missing = sorted(keys - set(doc))
    if missing:
        raise ParseError(f"fitted model: missing key(s) {', '.join(missing)}")
    try:
        return LinearModel(float(doc["intercept_j"]), float(doc["slope_j_per_to"]),
                           float(doc["r_squared"]), int(doc["n_points"]))
    except (TypeError, ValueError) as e:
        raise ParseError(f"fitted model: {e}") from None


@dataclass(frozen=True)
class ErrorReport:
    """Prediction quality: per-model precision percentages, mean absolute
    error, and the signed error of largest magnitude (first occurrence
    wins ties)."""

    precision: tuple[float, ...]
    avg_error: float
    max_error: float


def error_metrics(predicted: Sequence[float], actual: Sequence[float]) -> ErrorReport:
    if len(predicted) != len(actual):
        raise ValueError(f"length mismatch: {len(predicted)} predictions "
                         f"vs {len(actual)} actuals")
    if not predicted:
        raise ValueError("need at least one prediction")
    for i, a in enumerate(actual):
        if a <= 0:
            raise ValueError(f"actual energy must be positive; "
                             f"violated at index {i}")
    errors = [float(p) - float(a) for p, a in zip(predicted, actual)]
    precision = tuple(100.0 * (1.0 - abs(e) / float(a))
                      for e, a in zip(errors, actual))
    avg_error = sum(abs(e) for e in errors) / len(errors)
    max_error = errors[0]
    for e in errors[1:]:
        if abs(e) > abs(max_error):
            max_error = e
    return ErrorReport(precision=precision, avg_error=avg_error, max_error=max_error)


def tradeoff_select(candidates: Sequence[tuple[str, float, float]],
                    alpha: float) -> str:
    """Pick the candidate minimizing alpha * energy + (1 - alpha) * loss.

    Raw, unnormalized values are scored; ties break to the earliest
    candidate.
    """
    if not candidates:
        raise ValueError("candidate list is empty")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    best_id, best_score = None, None
    for model_id, energy, loss in candidates:
        score = alpha * float(energy) + (1.0 - alpha) * float(loss)
        if best_score is None or score < best_score:
            best_id, best_score = model_id, score
    return best_id
