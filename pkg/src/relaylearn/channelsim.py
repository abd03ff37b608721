"""Synthetic mmWave link generation from a Floating-Intercept path-loss model.

Path loss follows PL(d) = alpha + 10*beta*log10(d) + X_sigma, with X_sigma a
zero-mean Gaussian shadow-fading term. Every sample draws its randomness from
its own substream, so generation order (or parallelism) never changes the
output dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import TYPE_CHECKING

import numpy as np

from .rng import substream

if TYPE_CHECKING:
    from .dataset import LabelRule

# Representative published 28 GHz urban-microcell Floating-Intercept fit.
# All three constants are configurable through FIParams.
DEFAULT_ALPHA_DB = 72.0
DEFAULT_BETA = 2.92
DEFAULT_SIGMA_DB = 8.7

_STD_NORMAL = NormalDist()
_TINY_UNIFORM = 2.0**-53


@dataclass(frozen=True)
class FIParams:
    """Floating-Intercept constants: intercept (dB), slope, shadow stddev (dB)."""

    alpha: float = DEFAULT_ALPHA_DB
    beta: float = DEFAULT_BETA
    sigma: float = DEFAULT_SIGMA_DB

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")
        if not self.sigma >= 0.0:
            raise ValueError(f"sigma must be >= 0 dB, got {self.sigma}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, d: dict) -> "FIParams":
        return cls(**d)


@dataclass(frozen=True)
class ScenarioConfig:
    """Generation scenario; defaults follow a 28 GHz urban microcell:
    1-40 m link distances, 800 MHz bandwidth, 30 dBm transmit power.
    """

    d_min: float = 1.0
    d_max: float = 40.0
    freq_ghz: float = 28.0
    bandwidth_mhz: float = 800.0
    tx_power_dbm: float = 30.0
    n_samples: int = 10000
    n_candidates: int = 4
    seed: int = 42
    fi: FIParams = field(default_factory=FIParams)

    def __post_init__(self) -> None:
        if not 0.0 < self.d_min <= self.d_max:
            raise ValueError(
                f"need 0 < d_min <= d_max, got d_min={self.d_min}, d_max={self.d_max}"
            )
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_candidates < 1:
            raise ValueError(f"n_candidates must be >= 1, got {self.n_candidates}")

    def to_dict(self) -> dict:
        return {
            "d_min": self.d_min,
            "d_max": self.d_max,
            "freq_ghz": self.freq_ghz,
            "bandwidth_mhz": self.bandwidth_mhz,
            "tx_power_dbm": self.tx_power_dbm,
            "n_samples": self.n_samples,
            "n_candidates": self.n_candidates,
            "seed": self.seed,
            "fi": self.fi.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        fi = d.pop("fi", None)
        if fi is not None and not isinstance(fi, FIParams):
            fi = FIParams.from_dict(fi)
        return cls(**d, fi=fi) if fi is not None else cls(**d)


@dataclass(frozen=True)
class LinkSample:
    """One candidate link: channel-state features, true path loss, and label.

    rx_power_dbm is always tx_power_dbm - path_loss_db for generated samples.
    label is 1 for a strong link (path loss below the labeling threshold),
    0 for a weak one.
    """

    link_id: int
    distance_m: float
    freq_ghz: float
    tx_power_dbm: float
    rx_power_dbm: float
    rms_delay_ns: float
    num_paths: int
    aoa_spread_deg: float
    aod_spread_deg: float
    path_loss_db: float
    label: int


def fi_path_loss(fi: FIParams, d: float, shadow_db: float = 0.0) -> float:
    """Floating-Intercept path loss in dB at distance d meters."""
    if not d > 0.0:
        raise ValueError(f"distance must be positive, got {d}")
    return fi.alpha + 10.0 * fi.beta * math.log10(d) + shadow_db


def sample_shadow(rng: np.random.Generator, sigma: float) -> float:
    """One zero-mean Gaussian shadow-fading draw with stddev ``sigma`` dB.

    Consumes exactly one uniform variate from ``rng`` (inverse-CDF transform),
    so substream alignment does not depend on sigma or on the generator's
    internal normal-sampling algorithm.
    """
    if not sigma >= 0.0:
        raise ValueError(f"sigma must be >= 0 dB, got {sigma}")
    u = rng.random()
    if u <= 0.0:  # rng.random() is [0, 1); keep inv_cdf's domain open
        u = _TINY_UNIFORM
    return sigma * _STD_NORMAL.inv_cdf(u)


def _poisson(rng: np.random.Generator, mean: float) -> int:
    # Knuth's product-of-uniforms method: exact, and independent of numpy's
    # own (version-dependent) Poisson sampler.
    limit = math.exp(-mean)
    k = 0
    p = rng.random()
    while p > limit:
        k += 1
        p *= rng.random()
    return k


def gen_link(
    rng: np.random.Generator,
    cfg: ScenarioConfig,
    link_id: int,
    rule: "LabelRule | None" = None,
) -> LinkSample:
    """Draw one link record from ``rng``.

    Fixed draw order: distance, shadow fading, path count, delay spread,
    AoA spread, AoD spread. Auxiliary features are distance-correlated:
    num_paths ~ 1 + Poisson(4), rms_delay_ns ~ Exp(mean 20 + 0.5*d),
    angle spreads ~ Uniform(5, 60) degrees.
    """
    from .dataset import LabelRule, label  # deferred: dataset imports this module

    if rule is None:
        rule = LabelRule()
    fi = cfg.fi
    d = cfg.d_min + rng.random() * (cfg.d_max - cfg.d_min)
    shadow = sample_shadow(rng, fi.sigma)
    pl = fi_path_loss(fi, d, shadow)
    num_paths = 1 + _poisson(rng, 4.0)
    delay_mean = 20.0 + 0.5 * d
    rms_delay = -delay_mean * math.log1p(-rng.random())
    aoa = 5.0 + 55.0 * rng.random()
    aod = 5.0 + 55.0 * rng.random()
    return LinkSample(
        link_id=link_id,
        distance_m=d,
        freq_ghz=cfg.freq_ghz,
        tx_power_dbm=cfg.tx_power_dbm,
        rx_power_dbm=cfg.tx_power_dbm - pl,
        rms_delay_ns=rms_delay,
        num_paths=num_paths,
        aoa_spread_deg=aoa,
        aod_spread_deg=aod,
        path_loss_db=pl,
        label=label(pl, rule),
    )


def gen_dataset(cfg: ScenarioConfig, rule: "LabelRule | None" = None) -> list[LinkSample]:
    """Generate ``cfg.n_samples`` links; sample i uses ``substream(cfg.seed, i)``.

    Consecutive runs of ``cfg.n_candidates`` records form one selection
    instance: instance id = index // n_candidates. The result is a pure
    function of cfg, and identical whether samples are generated in order,
    out of order, or in parallel.
    """
    return [gen_link(substream(cfg.seed, i), cfg, i, rule) for i in range(cfg.n_samples)]
