"""Closed-form outage probabilities under the high-SNR threshold.

A link is in outage when its SNR ``P A(f, d) h^2 / sigma_w^2`` falls below
``beta^p 2^xi``. Chains of decode-and-forward hops and the incremental DF
scheme are composed from those per-link probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from scipy import special

from .channel import (
    SQRT8,
    ZETA,
    AttenuationParams,
    FadingParams,
    LinkSpec,
    NoiseParams,
    attenuation,
    noise_threshold,
)

# clamping a composed probability may move it at most this far
_CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class Topology:
    """Ordered hops from source to destination, plus an optional direct path.

    The direct link is only used by incremental DF, where its length must
    equal the summed hop distances.
    """

    links: tuple
    direct: Optional[LinkSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        if len(self.links) < 1:
            raise ValueError("a topology needs at least one hop")
        if self.direct is not None:
            total = sum(link.distance for link in self.links)
            if abs(self.direct.distance - total) > 1e-9 * self.direct.distance:
                raise ValueError(
                    f"direct link length {self.direct.distance} differs from "
                    f"summed hop length {total}")

    @property
    def hops(self) -> int:
        return len(self.links)

    @property
    def total_distance(self) -> float:
        return sum(link.distance for link in self.links)

    @classmethod
    def equal_spacing(cls, distance: float, hops: int,
                      fading: FadingParams = FadingParams(),
                      with_direct: bool = False) -> "Topology":
        """``hops`` links of length ``distance / hops`` with identical fading."""
        if hops < 1:
            raise ValueError(f"hops must be >= 1, got {hops}")
        links = [LinkSpec(distance / hops, fading) for _ in range(hops)]
        direct = LinkSpec(distance, fading) if with_direct else None
        return cls(tuple(links), direct)

    @classmethod
    def idf(cls, distance: float, fading: FadingParams = FadingParams()) -> "Topology":
        """Direct link plus one relay at the midpoint."""
        return cls.equal_spacing(distance, 2, fading, with_direct=True)


@dataclass(frozen=True)
class OutageBreakdown:
    end_to_end: float
    per_link: tuple = field(default_factory=tuple)
    direct_link: Optional[float] = None


def clamp_probability(value: float) -> float:
    clamped = min(1.0, max(0.0, value))
    assert abs(clamped - value) <= _CLAMP_SLACK, f"probability {value!r} far outside [0, 1]"
    return clamped


def erf_argument(P: float, link: LinkSpec, noise: NoiseParams,
                 att: AttenuationParams, xi: float) -> float:
    """Argument of erf in ``O = 1/2 + 1/2 erf(arg)`` for one link at power ``P``.

    ``arg = (zeta ln(beta^p 2^xi) - 2 mu - zeta ln(P A / sigma_w^2)) / (sqrt(8) sigma)``.
    """
    if not P > 0:
        raise ValueError(f"transmit power must be > 0, got {P!r}")
    snr_scale = P * attenuation(att, link.distance) / noise.background_variance
    if snr_scale == 0.0:
        return math.inf
    fad = link.fading
    return (ZETA * math.log(noise_threshold(noise, xi)) - 2.0 * fad.mu
            - ZETA * math.log(snr_scale)) / (SQRT8 * fad.sigma)


def _half_erfc(arg: float) -> float:
    # 1/2 + 1/2 erf(arg), without cancellation for very negative arg
    return 0.5 * float(special.erfc(-arg))


def link_outage(P: float, link: LinkSpec, noise: NoiseParams,
                att: AttenuationParams, xi: float) -> float:
    """Outage probability of a single hop driven with power ``P`` (W)."""
    return _half_erfc(erf_argument(P, link, noise, att, xi))


def chain_outage(per_link: Sequence[float]) -> float:
    """End-to-end outage of a decode-and-forward chain.

    Sums the probability that hop ``n`` is the first one to fail::

        O1 + O1^c [ sum_m O_{m+1} prod_{i<m+1} O_i^c ]

    which equals ``1 - prod(1 - O_n)`` but stays accurate when every term
    is tiny.
    """
    if len(per_link) == 0:
        raise ValueError("chain needs at least one link")
    total = 0.0
    survive = 1.0
    for o in per_link:
        total += survive * o
        survive *= 1.0 - o
    return clamp_probability(total)


def single_hop_outage(P: float, topology: Topology, noise: NoiseParams,
                      att: AttenuationParams, xi: float) -> OutageBreakdown:
    if topology.hops != 1:
        raise ValueError(f"single-hop outage needs exactly one link, got {topology.hops}")
    o = link_outage(P, topology.links[0], noise, att, xi)
    return OutageBreakdown(o, (o,))


def multihop_outage(P: float, topology: Topology, noise: NoiseParams,
                    att: AttenuationParams, xi: float) -> OutageBreakdown:
    """DF chain outage with the same power ``P`` at every transmitter."""
    if topology.hops < 2:
        raise ValueError(f"multi-hop outage needs at least two links, got {topology.hops}")
    per_link = tuple(link_outage(P, link, noise, att, xi) for link in topology.links)
    return OutageBreakdown(chain_outage(per_link), per_link)


def check_idf_topology(topology: Topology) -> None:
    if topology.direct is None:
        raise ValueError("incremental DF needs a direct source-destination link")
    if topology.hops != 2:
        raise ValueError(f"incremental DF uses exactly one relay (two hops), got {topology.hops}")
    d1, d2 = (link.distance for link in topology.links)
    if abs(d1 - d2) > 1e-9 * max(d1, d2):
        raise ValueError(f"incremental DF relay must sit at the midpoint, got hops {d1} and {d2}")


def idf_outage(P: float, topology: Topology, noise: NoiseParams,
               att: AttenuationParams, xi: float) -> OutageBreakdown:
    """Incremental DF: the relay only helps when the direct link fails.

    ``O = O_SD (O_SR + (1 - O_SR) O_RD)``; the destination selects, it does
    not combine the two copies.
    """
    check_idf_topology(topology)
    o_sd = link_outage(P, topology.direct, noise, att, xi)
    per_link = tuple(link_outage(P, link, noise, att, xi) for link in topology.links)
    o_sr, o_rd = per_link
    e2e = clamp_probability(o_sd * (o_sr + (1.0 - o_sr) * o_rd))
    return OutageBreakdown(e2e, per_link, o_sd)


def idf_polynomial_terms(P: float, topology: Topology, noise: NoiseParams,
                         att: AttenuationParams, xi: float) -> tuple:
    """``(X, Y, Z)``: erf values of the S-R, R-D and direct links.

    With these, ``8 O_IDF = 3 + X + Y + 3Z + XZ + YZ - XY - XYZ``.
    """
    check_idf_topology(topology)
    sr, rd = topology.links
    return (
        float(special.erf(erf_argument(P, sr, noise, att, xi))),
        float(special.erf(erf_argument(P, rd, noise, att, xi))),
        float(special.erf(erf_argument(P, topology.direct, noise, att, xi))),
    )


def idf_polynomial(x: float, y: float, z: float) -> float:
    """Left-hand side ``X + Y + 3Z + XZ + YZ - XY - XYZ``; equals ``8 O - 3``."""
    return x + y + 3.0 * z + x * z + y * z - x * y - x * y * z


def parse_scheme(name: str) -> int:
    """Number of hops for a scheme name: ``sh`` (1), ``mhN`` (N >= 2), ``idf`` (2)."""
    if name == "sh":
        return 1
    if name == "idf":
        return 2
    if name.startswith("mh") and name[2:].isdigit() and int(name[2:]) >= 2:
        return int(name[2:])
    raise ValueError(f"unknown scheme {name!r}; expected 'sh', 'idf' or 'mhN' with N >= 2")


def scheme_topology(name: str, distance: float,
                    fading: FadingParams = FadingParams()) -> Topology:
    """Equal-spacing topology for a scheme over total distance ``distance``."""
    hops = parse_scheme(name)
    if name == "idf":
        return Topology.idf(distance, fading)
    return Topology.equal_spacing(distance, hops, fading)


def scheme_outage(scheme: str, P: float, topology: Topology, noise: NoiseParams,
                  att: AttenuationParams, xi: float) -> OutageBreakdown:
    """Dispatch on ``"sh"``, ``"mhN"`` or ``"idf"``."""
    parse_scheme(scheme)
    if scheme == "sh":
        return single_hop_outage(P, topology, noise, att, xi)
    if scheme == "idf":
        return idf_outage(P, topology, noise, att, xi)
    return multihop_outage(P, topology, noise, att, xi)
