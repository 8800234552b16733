"""Dataset ingestion, splitting, bound extraction, and synthetic generators.

Split shuffling and all synthetic data use numpy's default PCG64 generator
seeded explicitly, so results are reproducible across machines.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class DataError(Exception):
    """Unusable input data or inconsistent split/bound requests."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus target vector; immutable after construction."""

    feature_names: tuple
    features: np.ndarray
    target: np.ndarray
    target_name: str
    dropped_rows: int = 0

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        targ = np.asarray(self.target, dtype=float)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if feats.shape[0] != targ.shape[0]:
            raise DataError(f"row mismatch: {feats.shape[0]} features vs {targ.shape[0]} targets")
        if feats.shape[0] < 1 or feats.shape[1] < 1:
            raise DataError("dataset must have at least one row and one feature")
        if len(self.feature_names) != feats.shape[1]:
            raise DataError("feature_names length must match feature count")
        if not (np.isfinite(feats).all() and np.isfinite(targ).all()):
            raise DataError("non-finite values present after ingestion")
        feats.setflags(write=False)
        targ.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", targ)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        return Dataset(self.feature_names, self.features[rows],
                       self.target[rows], self.target_name)


@dataclass(frozen=True)
class BoxBounds:
    """Componentwise interval for feature vectors; feeds big-M computation."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape:
            raise DataError("lower/upper length mismatch")
        if np.any(lo > hi):
            raise DataError("lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def __len__(self) -> int:
        return self.lower.shape[0]

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.lower).all() and np.isfinite(self.upper).all())


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    validation_fraction: float = 0.15
    test_fraction: float = 0.15
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if any(f <= 0 for f in fracs):
            raise DataError("split fractions must be positive")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise DataError(f"split fractions must sum to 1, got {sum(fracs)}")


def load_csv(path, target_name: str) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    The target column is removed from the features. Rows containing missing
    or non-finite cells are dropped and counted in ``dropped_rows``.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if target_name not in header:
            raise DataError(f"{path}: target column {target_name!r} not in header {header}")
        t_col = header.index(target_name)
        feature_names = [h for i, h in enumerate(header) if i != t_col]
        rows = []
        dropped = 0
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not cell.strip() for cell in rec):
                continue
            if len(rec) != len(header):
                raise DataError(f"{path}: row {lineno} has {len(rec)} cells, expected {len(header)}")
            vals = []
            ok = True
            for col, cell in enumerate(rec):
                cell = cell.strip()
                if cell == "":
                    ok = False
                    break
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: unparseable cell at row {lineno}, column {col + 1} "
                        f"({header[col]!r}): {cell!r}") from None
                if not math.isfinite(v):
                    ok = False
                    break
                vals.append(v)
            if not ok:
                dropped += 1
                continue
            rows.append(vals)
        if not rows:
            raise DataError(f"{path}: no usable data rows")
    arr = np.array(rows, dtype=float)
    target = arr[:, t_col]
    features = np.delete(arr, t_col, axis=1)
    return Dataset(tuple(feature_names), features, target, target_name,
                   dropped_rows=dropped)


def split(ds: Dataset, spec: SplitSpec):
    """Disjoint (train, validation, test) row partition, seeded and deterministic.

    Part sizes are the banker's-rounded fractions of N; the remainder goes
    to the training part.
    """
    n = ds.n_samples
    if n < 3:
        raise DataError(f"need at least 3 rows to split, got {n}")
    n_val = round(n * spec.validation_fraction)
    n_test = round(n * spec.test_fraction)
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise DataError(
            f"split of N={n} with fractions ({spec.train_fraction}, "
            f"{spec.validation_fraction}, {spec.test_fraction}) leaves an empty part")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    train_rows = np.sort(perm[:n_train])
    val_rows = np.sort(perm[n_train:n_train + n_val])
    test_rows = np.sort(perm[n_train + n_val:])
    return ds.subset(train_rows), ds.subset(val_rows), ds.subset(test_rows)


def feature_bounds(ds: Dataset, margin: float = 0.0) -> BoxBounds:
    """Componentwise [min, max] of the features, widened by margin*range.

    A constant column uses max(1, |value|) in place of its zero range.
    """
    if margin < 0:
        raise DataError(f"margin must be >= 0, got {margin}")
    lo = ds.features.min(axis=0)
    hi = ds.features.max(axis=0)
    rng = hi - lo
    const = rng == 0.0
    rng = np.where(const, np.maximum(1.0, np.abs(lo)), rng)
    return BoxBounds(lo - margin * rng, hi + margin * rng)


# ---------------------------------------------------------------------------
# Synthetic generators. The palatability generator reproduces only the
# interface of the original food-basket data (25 commodity-gram features,
# a [0,1] score, heteroscedastic noise); the concrete generator is a
# documented stand-in with the same schema as the published dataset.
# ---------------------------------------------------------------------------

COMMODITIES = (
    "beans", "bulgur", "cheese", "chickpeas", "corn", "csb", "dates",
    "dried_fruits", "fish", "lentils", "maize", "maize_meal", "meat",
    "milk", "oil", "pasta", "rice", "salt", "sorghum", "soya",
    "sugar", "bitter_greens", "wheat", "wheat_flour", "wsb",
)
BITTER_FEATURE = COMMODITIES.index("bitter_greens")

# staples that drive the score up when present in balanced amounts
_STAPLE_IDX = tuple(COMMODITIES.index(k) for k in
                    ("wheat", "maize", "rice", "lentils", "beans", "wsb", "oil", "milk"))


def _palatability_mean(grams: np.ndarray) -> np.ndarray:
    """Smooth score in (0,1): logistic of a sparse quadratic in ration shares.

    Monotone nonincreasing in the bitter feature (negative linear term only).
    """
    g = np.atleast_2d(grams)
    total = g.sum(axis=1) + 1.0
    share = g / total[:, None]
    s = -1.0
    for k in _STAPLE_IDX:
        s = s + 6.0 * share[:, k]
    oil, milk = COMMODITIES.index("oil"), COMMODITIES.index("milk")
    wheat, maize = COMMODITIES.index("wheat"), COMMODITIES.index("maize")
    s = s + 30.0 * share[:, oil] * share[:, wheat]
    s = s + 20.0 * share[:, milk] * share[:, maize]
    s = s - 8.0 * share[:, wheat] * share[:, wheat]
    s = s - 0.02 * g[:, BITTER_FEATURE]
    return 1.0 / (1.0 + np.exp(-s))


def synth_palatability(n: int, seed: int = 0) -> Dataset:
    """Synthetic food-basket ratings: 25 commodity-gram features, score in [0,1]."""
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    d = len(COMMODITIES)
    grams = np.zeros((n, d))
    active = rng.random((n, d)) < 0.45
    active[:, [COMMODITIES.index("salt"), COMMODITIES.index("sugar")]] = True
    scale = rng.gamma(shape=2.0, scale=40.0, size=(n, d))
    grams = np.where(active, scale, 0.0)
    grams[:, COMMODITIES.index("salt")] = rng.uniform(0.0, 12.0, n)
    grams[:, COMMODITIES.index("sugar")] = rng.uniform(0.0, 45.0, n)
    mean = _palatability_mean(grams)
    sd = 0.02 + 0.25 * mean * (1.0 - mean)
    score = np.clip(mean + sd * rng.standard_normal(n), 0.0, 1.0)
    return Dataset(COMMODITIES, grams, score, "palatability")


CONCRETE_COLUMNS = (
    "cement", "blast_furnace_slag", "fly_ash", "water",
    "superplasticizer", "coarse_aggregate", "fine_aggregate", "age",
)


def synth_concrete(n: int = 1030, seed: int = 0) -> Dataset:
    """Stand-in for the published compressive-strength data (same schema).

    Component columns are kg per cubic meter with totals near 2200-2500 kg,
    age in days, and strength in MPa driven by the binder/water ratio and
    log-age with heteroscedastic noise.
    """
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    cement = rng.uniform(100.0, 540.0, n)
    slag = rng.uniform(0.0, 350.0, n) * (rng.random(n) < 0.55)
    fly_ash = rng.uniform(0.0, 200.0, n) * (rng.random(n) < 0.45)
    water = rng.uniform(120.0, 250.0, n)
    superp = rng.uniform(0.0, 32.0, n) * (rng.random(n) < 0.6)
    coarse = rng.uniform(800.0, 1150.0, n)
    fine = rng.uniform(590.0, 1000.0, n)
    comp = np.column_stack([cement, slag, fly_ash, water, superp, coarse, fine])
    target_total = rng.uniform(2200.0, 2500.0, n)
    comp *= (target_total / comp.sum(axis=1))[:, None]
    age = np.exp(rng.uniform(np.log(1.0), np.log(365.0), n))
    features = np.column_stack([comp, age])
    strength = _concrete_strength_mean(features)
    sd = 2.5 + 0.09 * strength
    strength = np.maximum(1.0, strength + sd * rng.standard_normal(n))
    return Dataset(CONCRETE_COLUMNS, features, strength, "strength")


def _concrete_strength_mean(features: np.ndarray) -> np.ndarray:
    f = np.atleast_2d(features)
    cement, slag, fly_ash, water = f[:, 0], f[:, 1], f[:, 2], f[:, 3]
    superp, age = f[:, 4], f[:, 7]
    binder = cement + 0.85 * slag + 0.55 * fly_ash
    wb = water / np.maximum(binder, 40.0)
    mean = (9.0 + 0.052 * binder - 42.0 * (wb - 0.35)
            + 7.5 * np.log(age / 28.0 + 0.45) + 0.35 * superp)
    return np.clip(mean, 2.0, 90.0)


def write_csv(ds: Dataset, path) -> None:
    """Write the dataset back out in the load_csv format (target last)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [ds.target_name])
        for row, y in zip(ds.features, ds.target):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])
