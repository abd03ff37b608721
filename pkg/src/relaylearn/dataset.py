"""Link-dataset labeling, splitting, normalization, and CSV persistence."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .channelsim import LinkSample

CSV_COLUMNS = (
    "link_id",
    "distance_m",
    "freq_ghz",
    "tx_power_dbm",
    "rx_power_dbm",
    "rms_delay_ns",
    "num_paths",
    "aoa_spread_deg",
    "aod_spread_deg",
    "path_loss_db",
    "label",
)

# Default learning features. path_loss_db determines the label and is
# deliberately excluded; rx_power_dbm carries the same information shifted
# by the transmit power.
DEFAULT_FEATURE_NAMES = (
    "distance_m",
    "rx_power_dbm",
    "rms_delay_ns",
    "num_paths",
    "aoa_spread_deg",
    "aod_spread_deg",
)


class CsvFormatError(ValueError):
    """A dataset CSV violates the column or value contract."""


class SchemaError(ValueError):
    """Data does not match what a model or downstream consumer expects."""


@dataclass(frozen=True)
class LabelRule:
    """Class 1 ("strong link") iff path loss is strictly below the threshold."""

    threshold_db: float = 120.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.threshold_db):
            raise ValueError(f"threshold must be finite, got {self.threshold_db}")


def label(path_loss_db: float, rule: LabelRule | None = None) -> int:
    """1 if path_loss_db < threshold, else 0. NaN input is a domain error."""
    if rule is None:
        rule = LabelRule()
    if math.isnan(path_loss_db):
        raise ValueError("path loss is NaN")
    return 1 if path_loss_db < rule.threshold_db else 0


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of link samples plus the feature
    columns used for learning."""

    samples: tuple[LinkSample, ...]
    feature_names: tuple[str, ...] = DEFAULT_FEATURE_NAMES

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if not self.feature_names:
            raise ValueError("feature_names must be nonempty")
        for s in self.samples:
            if s.label not in (0, 1):
                raise ValueError(f"label must be 0 or 1, got {s.label!r}")

    def __len__(self) -> int:
        return len(self.samples)


def as_samples(data) -> tuple[LinkSample, ...]:
    """Accept a Dataset or any sequence of LinkSample."""
    if isinstance(data, Dataset):
        return data.samples
    return tuple(data)


def extract_features(samples: Iterable[LinkSample], feature_names: Sequence[str]) -> np.ndarray:
    """Feature matrix (n, d) in feature_names order.

    Raises SchemaError if a name is not a LinkSample field.
    """
    names = tuple(feature_names)
    for name in names:
        if name not in LinkSample.__dataclass_fields__:
            raise SchemaError(f"unknown feature {name!r}")
    rows = [[float(getattr(s, n)) for n in names] for s in samples]
    if not rows:
        return np.empty((0, len(names)), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def labels_array(data) -> np.ndarray:
    return np.asarray([s.label for s in as_samples(data)], dtype=np.int64)


def split(ds: Dataset, train_fraction: float = 0.75, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffled split: train gets round(n * fraction) samples
    (ties to even), test gets the remainder.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(ds.samples)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_train = round(n * train_fraction)
    if n_train == 0 or n_train == n:
        raise ValueError(f"split of {n} samples at fraction {train_fraction} leaves one side empty")
    perm = np.random.default_rng(seed).permutation(n)
    train = Dataset(tuple(ds.samples[i] for i in perm[:n_train]), ds.feature_names)
    test = Dataset(tuple(ds.samples[i] for i in perm[n_train:]), ds.feature_names)
    return train, test


@dataclass(frozen=True)
class Normalizer:
    """Per-feature standardization statistics, fit on the training split only."""

    feature_names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.means) / self.stds

    def inverse(self, Xn: np.ndarray) -> np.ndarray:
        return self.means + self.stds * np.asarray(Xn, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        return cls(
            feature_names=tuple(d["feature_names"]),
            means=np.asarray(d["means"], dtype=np.float64),
            stds=np.asarray(d["stds"], dtype=np.float64),
        )


def fit_normalizer(train: Dataset) -> Normalizer:
    """Fit per-feature mean/std on the training split.

    Zero-variance features get std 1 so their normalized column is exactly
    zero instead of dividing by zero.
    """
    X = extract_features(train.samples, train.feature_names)
    if X.shape[0] == 0:
        raise ValueError("cannot fit a normalizer on an empty dataset")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds > 0.0, stds, 1.0)
    return Normalizer(tuple(train.feature_names), means, stds)


def apply_normalizer(nz: Normalizer, ds: Dataset) -> Dataset:
    """Return a copy of ds with each feature column standardized using the
    normalizer's (training-split) statistics. Non-feature fields are kept."""
    if tuple(ds.feature_names) != tuple(nz.feature_names):
        raise SchemaError(
            f"normalizer features {nz.feature_names} != dataset features {ds.feature_names}"
        )
    Xn = nz.transform(extract_features(ds.samples, ds.feature_names))
    out = []
    for s, row in zip(ds.samples, Xn):
        out.append(replace(s, **{name: float(v) for name, v in zip(nz.feature_names, row)}))
    return Dataset(tuple(out), ds.feature_names)


def _fmt(value: float) -> str:
    # 12 significant digits is the documented round-trip precision.
    return format(float(value), ".12g")


def write_csv(ds: Dataset, path) -> None:
    """Write the canonical link CSV: fixed column order, '.' decimals,
    12 significant digits, LF line endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in ds.samples:
            writer.writerow(
                [
                    int(s.link_id),
                    _fmt(s.distance_m),
                    _fmt(s.freq_ghz),
                    _fmt(s.tx_power_dbm),
                    _fmt(s.rx_power_dbm),
                    _fmt(s.rms_delay_ns),
                    _fmt(s.num_paths),
                    _fmt(s.aoa_spread_deg),
                    _fmt(s.aod_spread_deg),
                    _fmt(s.path_loss_db),
                    int(s.label),
                ]
            )


def read_csv(path, feature_names: Sequence[str] = DEFAULT_FEATURE_NAMES) -> Dataset:
    """Parse a canonical link CSV. Errors carry 1-based file line numbers."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        if tuple(header) != CSV_COLUMNS:
            missing = [c for c in CSV_COLUMNS if c not in header]
            if missing:
                raise CsvFormatError(f"{path}: missing columns {missing}")
            raise CsvFormatError(f"{path}: columns must be exactly {','.join(CSV_COLUMNS)}")
        samples = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise CsvFormatError(
                    f"{path}: line {line_no}: expected {len(CSV_COLUMNS)} fields, got {len(row)}"
                )
            try:
                link_id = int(row[0])
                floats = [float(v) for v in row[1:10]]
                num_paths = int(row[6])
                lbl = int(row[10])
            except ValueError as exc:
                raise CsvFormatError(f"{path}: line {line_no}: {exc}") from None
            if lbl not in (0, 1):
                raise CsvFormatError(f"{path}: line {line_no}: label must be 0 or 1, got {lbl}")
            if num_paths < 1:
                raise CsvFormatError(f"{path}: line {line_no}: num_paths must be >= 1, got {num_paths}")
            if not all(math.isfinite(v) for v in floats):
                raise CsvFormatError(f"{path}: line {line_no}: non-finite value")
            samples.append(
                LinkSample(
                    link_id=link_id,
                    distance_m=floats[0],
                    freq_ghz=floats[1],
                    tx_power_dbm=floats[2],
                    rx_power_dbm=floats[3],
                    rms_delay_ns=floats[4],
                    num_paths=num_paths,
                    aoa_spread_deg=floats[6],
                    aod_spread_deg=floats[7],
                    path_loss_db=floats[8],
                    label=lbl,
                )
            )
        if not samples:
            raise CsvFormatError(f"{path}: no data rows")
    return Dataset(tuple(samples), tuple(feature_names))
