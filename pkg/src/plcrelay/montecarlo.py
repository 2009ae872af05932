"""Monte Carlo outage estimates using the exact mixture-capacity criterion.

Only the fading is sampled. The Bernoulli impulse state is averaged inside
the criterion itself: a link is in outage when

    (1 - p) log2(1 + gamma) + p log2(1 + gamma / beta) < xi

so no high-SNR approximation enters the estimate, which keeps it an
independent check on the closed forms in :mod:`plcrelay.outage`.

Trials are grouped into fixed-size blocks. Block ``b`` draws from a Philox
stream keyed by the seed with its counter offset by ``b``, so the sample
sequence depends only on ``(seed, trials)`` and not on how many workers
process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .channel import AttenuationParams, NoiseParams, attenuation
from .outage import Topology, check_idf_topology

BLOCK_SIZE = 1 << 16
Z99 = float(special.ndtri(0.995))
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SimConfig:
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SimEstimate:
    p_hat: float
    ci99_half_width: float
    trials: int
    outages: int


def ci99_half_width(p: float, trials: int) -> float:
    """Half-width of the 99% normal-approximation binomial interval."""
    return Z99 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 128))


def exact_link_outage(gamma: np.ndarray, noise: NoiseParams, xi: float) -> np.ndarray:
    """Boolean outage indicator of the noise-averaged mixture capacity."""
    p = noise.p
    capacity = ((1.0 - p) * np.log1p(gamma) + p * np.log1p(gamma / noise.beta)) / _LN2
    return capacity < xi


def _simulate(cfg: SimConfig, links, noise: NoiseParams, att: AttenuationParams,
              P: float, xi: float, rule) -> SimEstimate:
    """Run ``cfg.trials`` trials over ``links``; ``rule`` maps per-link outage rows to events."""
    if not P > 0:
        raise ValueError(f"transmit power must be > 0, got {P!r}")
    if not xi > 0:
        raise ValueError(f"spectral efficiency xi must be > 0, got {xi!r}")
    scale = np.array([P * attenuation(att, link.distance) / noise.background_variance
                      for link in links])[:, None]
    mu = np.array([link.fading.mu for link in links])[:, None]
    sigma = np.array([link.fading.sigma for link in links])[:, None]
    n_blocks = -(-cfg.trials // BLOCK_SIZE)

    def run_block(b: int) -> int:
        n = min(BLOCK_SIZE, cfg.trials - b * BLOCK_SIZE)
        z = block_rng(cfg.seed, b).standard_normal((len(links), n))
        h2 = 10.0 ** ((mu + sigma * z) / 5.0)
        failed = exact_link_outage(scale * h2, noise, xi)
        return int(np.count_nonzero(rule(failed)))

    if cfg.workers == 1 or n_blocks == 1:
        count = sum(run_block(b) for b in range(n_blocks))
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            count = sum(pool.map(run_block, range(n_blocks)))
    p_hat = count / cfg.trials
    return SimEstimate(p_hat, ci99_half_width(p_hat, cfg.trials), cfg.trials, count)


def simulate_link_outage(P, link, noise, att, xi, cfg: SimConfig = SimConfig()) -> SimEstimate:
    return _simulate(cfg, [link], noise, att, P, xi, lambda f: f[0])


def simulate_multihop_outage(P, topology: Topology, noise, att, xi,
                             cfg: SimConfig = SimConfig()) -> SimEstimate:
    """DF chain: the packet is lost if any hop fails (fading i.i.d. per hop)."""
    return _simulate(cfg, list(topology.links), noise, att, P, xi,
                     lambda f: np.any(f, axis=0))


def simulate_idf_outage(P, topology: Topology, noise, att, xi,
                        cfg: SimConfig = SimConfig()) -> SimEstimate:
    """Outage iff the direct link fails and the relay path also fails."""
    check_idf_topology(topology)
    links = [topology.direct, *topology.links]
    return _simulate(cfg, links, noise, att, P, xi,
                     lambda f: f[0] & (f[1] | f[2]))


def simulate_scheme(scheme: str, P, topology: Topology, noise, att, xi,
                    cfg: SimConfig = SimConfig()) -> SimEstimate:
    if scheme == "idf":
        return simulate_idf_outage(P, topology, noise, att, xi, cfg)
    if scheme == "sh":
        return simulate_link_outage(P, topology.links[0], noise, att, xi, cfg)
    return simulate_multihop_outage(P, topology, noise, att, xi, cfg)
