"""Synthetic market generation: per-company random walks with drift,
volatility assignment, threshold classification, and CSV persistence.

Conventions: days are 1-based, ``prices[0]`` is day 1 and equals the start
price without consuming a random draw, so a zero-volatility series follows
the closed form ``p0 + mu * (t - 1)`` exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    ConfigError,
    DatasetParseError,
    DatasetValidationError,
    InvalidParameterError,
)
from .numkit import RngStream, rng_new

CSV_HEADER = ("company_id", "day", "price", "sigma", "mu", "class")
_FORMAT_NAME = "volmoe.dataset"
_FORMAT_VERSION = 1


class VolatilityClass(str, Enum):
    STABLE = "stable"
    VOLATILE = "volatile"


def classify(sigma: float, threshold: float) -> VolatilityClass:
    """Volatile iff sigma is strictly greater than the threshold."""
    if sigma < 0.0 or threshold < 0.0:
        raise InvalidParameterError(
            f"sigma and threshold must be >= 0, got {sigma} and {threshold}"
        )
    return VolatilityClass.VOLATILE if sigma > threshold else VolatilityClass.STABLE


@dataclass(frozen=True)
class CompanyProfile:
    company_id: int
    mu: float
    sigma: float
    vol_class: VolatilityClass


@dataclass(frozen=True)
class PriceSeries:
    company_id: int
    prices: np.ndarray  # float64, prices[t-1] is day t

    @property
    def days(self) -> int:
        return len(self.prices)

    def window_before(self, day: int, length: int) -> np.ndarray:
        """The ``length`` prices for days [day - length, day - 1]."""
        if day - length < 1:
            raise InvalidParameterError(
                f"window of {length} days before day {day} starts before day 1"
            )
        return self.prices[day - 1 - length : day - 1]


@dataclass(frozen=True)
class DatasetConfig:
    n_companies: int = 100
    days: int = 100
    mu: float = 0.05
    sigma_min: float = 0.01
    sigma_max: float = 0.15
    sigma_threshold: float = 0.05
    p0: float = 100.0

    def validate(self) -> None:
        if self.n_companies < 2:
            raise ConfigError("dataset.n_companies", f"must be >= 2, got {self.n_companies}")
        if self.days < 2:
            raise ConfigError("dataset.days", f"must be >= 2, got {self.days}")
        if not np.isfinite(self.mu):
            raise ConfigError("dataset.mu", "must be finite")
        if not 0.0 < self.sigma_min <= self.sigma_max:
            raise ConfigError(
                "dataset.sigma_min",
                f"need 0 < sigma_min <= sigma_max, got [{self.sigma_min}, {self.sigma_max}]",
            )
        if self.sigma_threshold < 0.0:
            raise ConfigError("dataset.sigma_threshold", "must be >= 0")
        if not np.isfinite(self.p0):
            raise ConfigError("dataset.p0", "must be finite")


@dataclass
class Dataset:
    companies: list[CompanyProfile]
    series: list[PriceSeries]
    master_seed: int
    config: DatasetConfig

    @property
    def n_companies(self) -> int:
        return len(self.companies)

    @property
    def days(self) -> int:
        return self.series[0].days if self.series else 0

    def by_class(self, vol_class: VolatilityClass) -> list[int]:
        """Indices of companies in the given class."""
        return [i for i, c in enumerate(self.companies) if c.vol_class is vol_class]

    def validate(self) -> None:
        if len(self.companies) != len(self.series):
            raise DatasetValidationError(
                f"{len(self.companies)} profiles vs {len(self.series)} series"
            )
        ids = [c.company_id for c in self.companies]
        if len(set(ids)) != len(ids):
            raise DatasetValidationError("duplicate company ids")
        for profile, series in zip(self.companies, self.series):
            if profile.company_id != series.company_id:
                raise DatasetValidationError(
                    f"profile id {profile.company_id} misaligned with "
                    f"series id {series.company_id}"
                )
            if series.days != self.days or series.days < 2:
                raise DatasetValidationError(
                    f"company {series.company_id}: series length {series.days}"
                )
            if not np.all(np.isfinite(series.prices)):
                raise DatasetValidationError(
                    f"company {series.company_id}: non-finite price"
                )
            if classify(profile.sigma, self.config.sigma_threshold) is not profile.vol_class:
                raise DatasetValidationError(
                    f"company {profile.company_id}: class {profile.vol_class.value} "
                    f"inconsistent with sigma {profile.sigma!r} and threshold "
                    f"{self.config.sigma_threshold!r}"
                )


def generate_series(
    profile: CompanyProfile, days: int, p0: float, rng: RngStream
) -> PriceSeries:
    """Random walk with drift: prices[t] = prices[t-1] + mu + N(0, sigma)."""
    if days < 2:
        raise InvalidParameterError(f"need at least 2 days, got {days}")
    if not np.isfinite(p0):
        raise InvalidParameterError("start price must be finite")
    prices = np.empty(days, dtype=np.float64)
    prices[0] = p0
    for t in range(1, days):
        prices[t] = prices[t - 1] + profile.mu + rng.normal(0.0, profile.sigma)
    return PriceSeries(company_id=profile.company_id, prices=prices)


def generate_dataset(cfg: DatasetConfig, master_seed: int) -> Dataset:
    """Generate the full market.

    Company i draws its volatility from stream i and its price path from
    stream n + i, so any company's series is independent of the others'.
    """
    cfg.validate()
    n = cfg.n_companies
    companies = []
    series = []
    for i in range(n):
        sigma = rng_new(master_seed, i).uniform(cfg.sigma_min, cfg.sigma_max)
        profile = CompanyProfile(
            company_id=i,
            mu=cfg.mu,
            sigma=sigma,
            vol_class=classify(sigma, cfg.sigma_threshold),
        )
        companies.append(profile)
        series.append(
            generate_series(profile, cfg.days, cfg.p0, rng_new(master_seed, n + i))
        )
    ds = Dataset(companies=companies, series=series, master_seed=master_seed, config=cfg)
    ds.validate()
    return ds


def _format_float(x: float) -> str:
    # repr of a Python float is the shortest digit string that round-trips
    # exactly, which is stronger than the required 17 significant digits.
    return repr(float(x))


def export_csv(ds: Dataset, path) -> None:
    """Write the dataset in long format with a metadata comment line."""
    meta = {
        "format": _FORMAT_NAME,
        "version": _FORMAT_VERSION,
        "master_seed": ds.master_seed,
        "config": {
            "n_companies": ds.config.n_companies,
            "days": ds.config.days,
            "mu": ds.config.mu,
            "sigma_min": ds.config.sigma_min,
            "sigma_max": ds.config.sigma_max,
            "sigma_threshold": ds.config.sigma_threshold,
            "p0": ds.config.p0,
        },
    }
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    lines.append(",".join(CSV_HEADER))
    for profile, series in zip(ds.companies, ds.series):
        sigma = _format_float(profile.sigma)
        mu = _format_float(profile.mu)
        cls = profile.vol_class.value
        for day in range(1, series.days + 1):
            lines.append(
                f"{profile.company_id},{day},{_format_float(series.prices[day - 1])},"
                f"{sigma},{mu},{cls}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def import_csv(path) -> Dataset:
    """Read a dataset written by export_csv, re-validating every invariant."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise DatasetParseError(1, "missing metadata comment line")
    try:
        meta = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise DatasetParseError(1, f"bad metadata JSON: {exc}") from exc
    if meta.get("format") != _FORMAT_NAME or meta.get("version") != _FORMAT_VERSION:
        raise DatasetParseError(1, f"unsupported format {meta.get('format')!r}")
    try:
        cfg = DatasetConfig(**meta["config"])
        master_seed = int(meta["master_seed"])
    except (KeyError, TypeError) as exc:
        raise DatasetParseError(1, f"incomplete metadata: {exc}") from exc

    if len(lines) < 2 or lines[1] != ",".join(CSV_HEADER):
        raise DatasetParseError(2, f"expected header {','.join(CSV_HEADER)!r}")

    rows: dict[int, dict] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_HEADER):
            raise DatasetParseError(
                lineno, f"expected {len(CSV_HEADER)} columns, got {len(parts)}"
            )
        try:
            cid = int(parts[0])
            day = int(parts[1])
            price = float(parts[2])
            sigma = float(parts[3])
            mu = float(parts[4])
            cls = VolatilityClass(parts[5])
        except ValueError as exc:
            raise DatasetParseError(lineno, str(exc)) from exc
        entry = rows.setdefault(
            cid, {"sigma": sigma, "mu": mu, "cls": cls, "prices": {}}
        )
        if entry["sigma"] != sigma or entry["mu"] != mu or entry["cls"] is not cls:
            raise DatasetParseError(lineno, f"company {cid}: inconsistent profile fields")
        if day in entry["prices"]:
            raise DatasetParseError(lineno, f"company {cid}: duplicate day {day}")
        entry["prices"][day] = price

    companies = []
    series = []
    for cid in sorted(rows):
        entry = rows[cid]
        days = sorted(entry["prices"])
        if days != list(range(1, len(days) + 1)):
            raise DatasetValidationError(f"company {cid}: days are not contiguous from 1")
        companies.append(
            CompanyProfile(
                company_id=cid, mu=entry["mu"], sigma=entry["sigma"], vol_class=entry["cls"]
            )
        )
        series.append(
            PriceSeries(
                company_id=cid,
                prices=np.array([entry["prices"][d] for d in days], dtype=np.float64),
            )
        )
    ds = Dataset(companies=companies, series=series, master_seed=master_seed, config=cfg)
    ds.validate()
    return ds
