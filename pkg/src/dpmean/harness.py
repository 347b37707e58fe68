"""Monte-Carlo experiment engine: dataset generators, MSE estimation with
standard errors, parameter sweeps, and worst-case exploration over the
ones-over-zeros dataset family.

Determinism contract
--------------------
Trial t of a cell seeded with s draws from stream (s, t); sweep cell i
derives its seed from the experiment seed with a SplitMix64 step (documented
in _derived_seed).  Per-trial squared errors are assembled into an array in
trial order and reduced with numpy's pairwise summation, so results are
bit-identical regardless of worker count.
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mechanisms import (
    BoundedDataset,
    Mechanism,
    PrivacyBudget,
    run_mechanism,
    true_mean,
)
from .noise import Cursor, GeometricParams, RandomStream, two_sided_geometric_sample

CSV_HEADER = "mechanism,epsilon,dataset_kind,n,target_mean,trials,mse,normalized_mse,stderr,seed"

#: Pseudo-mechanism accepted by worst_case_over_family: release the count of
#: upper-bound values directly with two-sided geometric noise of decay
#: exp(-eps) instead of going through a mean estimate.
GEOMETRIC_COUNT = "geometric_count"

_MASK64 = 2**64 - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _derived_seed(seed: int, index: int) -> int:
    """SplitMix64 output number ``index`` for the given base seed."""
    z = (seed + (index + 1) * _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class DatasetKind(str, enum.Enum):
    CONSTANT = "constant"
    TWO_POINT = "two_point"
    LOWER_BOUND_FAMILY = "lower_bound_family"


@dataclass(frozen=True)
class DatasetSpec:
    """Recipe for a synthetic dataset with a prescribed mean.

    For ``lower_bound_family``, ``family_k`` is the member index i: the
    dataset holds i copies of the upper bound over ``size`` copies of the
    lower bound (so ``size + i`` elements in total).
    """

    kind: DatasetKind
    size: int
    target_mean: float
    bounds: tuple[float, float]
    family_k: int | None = None

    def __post_init__(self) -> None:
        lo, hi = self.bounds
        if self.size < 1:
            raise ValueError("dataset size must be at least 1")
        if not (lo < hi):
            raise ValueError(f"bounds must satisfy lower < upper, got {self.bounds}")
        if not (lo <= self.target_mean <= hi):
            raise ValueError(f"target mean {self.target_mean} outside bounds {self.bounds}")
        if self.kind is DatasetKind.LOWER_BOUND_FAMILY:
            if self.family_k is None or self.family_k < 1:
                raise ValueError("lower_bound_family requires family_k >= 1")


def family_member_spec(n: int, i: int, bounds: tuple[float, float] = (0.0, 1.0)) -> DatasetSpec:
    """Member i of the family: i upper-bound values over n lower-bound values."""
    lo, hi = bounds
    mean = (i * hi + n * lo) / (n + i)
    return DatasetSpec(DatasetKind.LOWER_BOUND_FAMILY, n, mean, bounds, family_k=i)


def generate_dataset(spec: DatasetSpec) -> BoundedDataset:
    lo, hi = spec.bounds
    if spec.kind is DatasetKind.CONSTANT:
        values: tuple[float, ...] = (spec.target_mean,) * spec.size
    elif spec.kind is DatasetKind.TWO_POINT:
        k = round(spec.size * (spec.target_mean - lo) / (hi - lo))
        values = (hi,) * k + (lo,) * (spec.size - k)
    else:
        values = (hi,) * spec.family_k + (lo,) * spec.size
    return BoundedDataset(values, lo, hi)


@dataclass(frozen=True)
class ExperimentConfig:
    mechanisms: tuple[Mechanism, ...]
    epsilons: tuple[float, ...]
    dataset_specs: tuple[DatasetSpec, ...]
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not all(e > 0 and math.isfinite(e) for e in self.epsilons):
            raise ValueError("all epsilons must be positive and finite")
        if not (0 <= self.seed <= _MASK64):
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class MseReport:
    mechanism: Mechanism
    epsilon: float
    dataset_spec: DatasetSpec | None
    n: int
    mse: float
    normalized_mse: float
    stderr: float
    trials: int
    seed: int


def _squared_errors(
    d: BoundedDataset,
    mechanism,
    eps: PrivacyBudget,
    mu: float,
    seed: int,
    lo: int,
    hi: int,
    out: np.ndarray,
) -> None:
    estimate = (
        (lambda cur: run_mechanism(d, eps, mechanism, cur).value)
        if isinstance(mechanism, Mechanism)
        else (lambda cur: mechanism(d, eps, cur))
    )
    cursor = Cursor(RandomStream(seed, lo))
    for t in range(lo, hi):
        cursor.jump_to(RandomStream(seed, t))
        err = estimate(cursor) - mu
        out[t] = err * err


def estimate_mse(
    d: BoundedDataset,
    mechanism,
    eps: PrivacyBudget,
    trials: int,
    seed: int,
    workers: int = 1,
    dataset_spec: DatasetSpec | None = None,
) -> MseReport:
    """Monte-Carlo MSE of one mechanism on one dataset.

    Trial t draws its noise from stream (seed, t).  ``stderr`` is the sample
    standard deviation of the squared errors divided by sqrt(trials) (zero
    when trials == 1).  ``mechanism`` is a Mechanism, or -- for testing the
    estimator machinery itself -- any callable (dataset, eps, cursor) -> float.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if isinstance(mechanism, str):
        mechanism = Mechanism(mechanism)
    mu = true_mean(d)
    sq = np.empty(trials, dtype=np.float64)
    if workers <= 1:
        _squared_errors(d, mechanism, eps, mu, seed, 0, trials, sq)
    else:
        step = -(-trials // workers)
        spans = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_squared_errors, d, mechanism, eps, mu, seed, lo, hi, sq)
                for lo, hi in spans
            ]
            for f in futures:
                f.result()
    mse = float(np.sum(sq)) / trials
    stderr = float(np.std(sq, ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    n = len(d)
    return MseReport(
        mechanism=mechanism,
        epsilon=eps.epsilon,
        dataset_spec=dataset_spec,
        n=n,
        mse=mse,
        normalized_mse=mse * float(n * n),
        stderr=stderr,
        trials=trials,
        seed=seed,
    )


def sweep(config: ExperimentConfig, workers: int = 1) -> list[MseReport]:
    """Run the Cartesian product (mechanism, epsilon, dataset_spec) in that
    nesting order; deterministic given the config seed."""
    cells = [
        (mech, e, spec)
        for mech in config.mechanisms
        for e in config.epsilons
        for spec in config.dataset_specs
    ]
    reports = []
    for index, (mech, e, spec) in enumerate(cells):
        try:
            d = generate_dataset(spec)
            reports.append(
                estimate_mse(
                    d,
                    mech,
                    PrivacyBudget(e),
                    config.trials,
                    _derived_seed(config.seed, index),
                    workers=workers,
                    dataset_spec=spec,
                )
            )
        except Exception as exc:
            raise RuntimeError(
                f"sweep cell {index} failed (mechanism={mech}, epsilon={e}, spec={spec})"
            ) from exc
    return reports


def worst_case_over_family(
    mechanism: Mechanism | str,
    eps: PrivacyBudget,
    n: int,
    k: int,
    trials: int,
    seed: int,
) -> float:
    """Largest count-estimation MSE over family members 1..k.

    For mean mechanisms the count estimate for member i is n * estimate and
    the error is measured against i; for GEOMETRIC_COUNT the count itself is
    released with two-sided geometric noise of decay exp(-eps).  Compare the
    result against the 2/eps^2 benchmark.
    """
    if k < 1:
        raise ValueError("family needs k >= 1 members")
    worst = -math.inf
    geometric = mechanism == GEOMETRIC_COUNT
    params = GeometricParams(math.exp(-eps.epsilon)) if geometric else None
    for i in range(1, k + 1):
        member_seed = _derived_seed(seed, i - 1)
        sq = np.empty(trials, dtype=np.float64)
        cursor = Cursor(RandomStream(member_seed, 0))
        if geometric:
            for t in range(trials):
                cursor.jump_to(RandomStream(member_seed, t))
                z = two_sided_geometric_sample(cursor, params)
                sq[t] = float(z) * float(z)
        else:
            d = generate_dataset(family_member_spec(n, i))
            for t in range(trials):
                cursor.jump_to(RandomStream(member_seed, t))
                est = run_mechanism(d, eps, mechanism, cursor).value
                err = n * est - i
                sq[t] = err * err
        worst = max(worst, float(np.sum(sq)) / trials)
    return worst


# --- figure presets -------------------------------------------------------

PRESET_EPSILONS = (0.1, 0.2, 0.5, 1.0, 2.0)
PRESET_MEANS = (0.5, 0.25, 0.1, 0.02, 0.005, 0.002)
PRESET_SIZE = 1000
PRESET_TRIALS = 10_000
PRESET_NAMES = ("fig2a", "fig2b", "fig2c")


def preset_family_k(n: int, eps: float) -> int:
    """Family size for worst-case exploration: ceil((n/eps)^(1/3) / 2),
    small enough that the count-to-mean reduction error stays negligible."""
    return math.ceil((n / eps) ** (1.0 / 3.0) / 2.0)


def _preset_specs() -> tuple[DatasetSpec, ...]:
    return tuple(
        DatasetSpec(DatasetKind.TWO_POINT, PRESET_SIZE, mu, (0.0, 1.0)) for mu in PRESET_MEANS
    )


def preset_config(name: str, seed: int, trials: int | None = None) -> ExperimentConfig:
    """Sweep configuration for one of the bundled figure presets.

    fig2a: transformed mechanism over the full epsilon x mean grid.
    fig2b: transformed mechanism, epsilon fixed at 0.5, mean sweep.
    fig2c: shifted and transformed mechanisms over the full grid.
    """
    trials = PRESET_TRIALS if trials is None else trials
    specs = _preset_specs()
    if name == "fig2a":
        return ExperimentConfig((Mechanism.TRANSFORMED,), PRESET_EPSILONS, specs, trials, seed)
    if name == "fig2b":
        return ExperimentConfig((Mechanism.TRANSFORMED,), (0.5,), specs, trials, seed)
    if name == "fig2c":
        return ExperimentConfig(
            (Mechanism.SHIFTED, Mechanism.TRANSFORMED), PRESET_EPSILONS, specs, trials, seed
        )
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


# --- serialization --------------------------------------------------------


def csv_cell(x) -> str:
    """Full-precision cell text: floats use repr, which round-trips exactly."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_row(report: MseReport) -> list[str]:
    spec = report.dataset_spec
    if spec is None:
        raise ValueError("CSV rows need the dataset spec; pass dataset_spec to estimate_mse")
    return [
        report.mechanism.value,
        csv_cell(report.epsilon),
        spec.kind.value,
        str(report.n),
        csv_cell(spec.target_mean),
        str(report.trials),
        csv_cell(report.mse),
        csv_cell(report.normalized_mse),
        csv_cell(report.stderr),
        str(report.seed),
    ]


def reports_to_csv(reports: list[MseReport], extra_columns: dict[str, list[float]] | None = None) -> str:
    """Render reports in the sweep CSV schema, optionally with appended
    columns (one value per report)."""
    header = CSV_HEADER
    extras = extra_columns or {}
    for name, values in extras.items():
        if len(values) != len(reports):
            raise ValueError(f"extra column {name!r} has {len(values)} values for {len(reports)} rows")
        header += f",{name}"
    lines = [header]
    for idx, report in enumerate(reports):
        row = report_row(report)
        row.extend(csv_cell(values[idx]) for values in extras.values())
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _spec_to_json(spec: DatasetSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "size": spec.size,
        "target_mean": spec.target_mean,
        "bounds": list(spec.bounds),
        "family_k": spec.family_k,
    }


def config_metadata(config: ExperimentConfig, preset: str | None = None) -> dict:
    from . import __version__

    return {
        "version": __version__,
        "preset": preset,
        "csv_schema": CSV_HEADER,
        "mechanisms": [m.value for m in config.mechanisms],
        "epsilons": list(config.epsilons),
        "dataset_specs": [_spec_to_json(s) for s in config.dataset_specs],
        "trials": config.trials,
        "seed": config.seed,
    }


def write_metadata(path: str | Path, config: ExperimentConfig, preset: str | None = None) -> None:
    Path(path).write_text(json.dumps(config_metadata(config, preset), indent=2) + "\n")


def config_from_json(data: dict) -> ExperimentConfig:
    """Parse an explicit sweep configuration (the metadata sidecar format)."""
    specs = tuple(
        DatasetSpec(
            DatasetKind(s["kind"]),
            s["size"],
            s["target_mean"],
            tuple(s["bounds"]),
            s.get("family_k"),
        )
        for s in data["dataset_specs"]
    )
    return ExperimentConfig(
        tuple(Mechanism(m) for m in data["mechanisms"]),
        tuple(data["epsilons"]),
        specs,
        data["trials"],
        data["seed"],
    )
