"""Energy per bit for the single-hop, DF multi-hop and incremental DF schemes.

Each report keeps the branch decomposition (probability weight and the
energy spent on that branch) so the total can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass

from .outage import OutageBreakdown


@dataclass(frozen=True)
class ModemPowerProfile:
    """Static power draw of every modem plus the link rate.

    Attributes:
        p_static_tx: Static circuit power of a transmitting modem (W).
        p_static_rx: Static circuit power of a receiving modem (W).
        bandwidth: System bandwidth (Hz).
        xi: Spectral efficiency (bits/s/Hz).
    """

    p_static_tx: float = 0.5
    p_static_rx: float = 0.5
    bandwidth: float = 30e6
    xi: float = 1.0

    def __post_init__(self):
        for name in ("p_static_tx", "p_static_rx", "bandwidth", "xi"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")

    @property
    def bit_rate(self) -> float:
        return self.xi * self.bandwidth


@dataclass(frozen=True)
class EnergyReport:
    energy_per_bit: float
    terms: tuple
    scheme: str


def _check_power(power: float) -> None:
    if power < 0:
        raise ValueError(f"transmit power must be >= 0, got {power!r}")


def _report(terms, scheme: str) -> EnergyReport:
    terms = tuple((float(w), float(e)) for w, e in terms)
    return EnergyReport(sum(w * e for w, e in terms), terms, scheme)


def transmission_energy(power: float, profile: ModemPowerProfile) -> float:
    """Energy per bit of one hop: transmit power plus both modems' static draw."""
    _check_power(power)
    return (power + profile.p_static_tx + profile.p_static_rx) / profile.bit_rate


def energy_single_hop(power: float, profile: ModemPowerProfile) -> EnergyReport:
    return _report([(1.0, transmission_energy(power, profile))], "sh")


def energy_multihop(power: float, outage: OutageBreakdown, hops: int,
                    profile: ModemPowerProfile) -> EnergyReport:
    """Expected energy of an ``hops``-hop DF chain.

    A packet that dies on hop ``n < hops`` has cost ``n`` transmissions;
    once the last relay has decoded, all ``hops`` transmissions are charged
    whether or not the destination decodes.
    """
    _check_power(power)
    if hops < 2:
        raise ValueError(f"multi-hop energy needs at least two hops, got {hops}")
    if len(outage.per_link) != hops:
        raise ValueError(f"outage has {len(outage.per_link)} links, expected {hops}")
    gamma = transmission_energy(power, profile)
    terms = []
    reach = 1.0
    for n, o in enumerate(outage.per_link[:-1], start=1):
        terms.append((reach * o, n * gamma))
        reach *= 1.0 - o
    terms.append((reach, hops * gamma))
    return _report(terms, f"mh{hops}")


def energy_idf(power: float, outage: OutageBreakdown,
               profile: ModemPowerProfile) -> EnergyReport:
    """Incremental DF: direct success, relay-assisted, and relay-failed branches."""
    _check_power(power)
    if outage.direct_link is None:
        raise ValueError("incremental DF energy needs the direct-link outage")
    if len(outage.per_link) != 2:
        raise ValueError(f"incremental DF expects two hop outages, got {len(outage.per_link)}")
    o_sd = outage.direct_link
    o_sr = outage.per_link[0]
    tx, rx, rate = profile.p_static_tx, profile.p_static_rx, profile.bit_rate
    # the relay always listens to the first broadcast, hence 2 receivers
    one_shot = (power + tx + 2.0 * rx) / rate
    relayed = (2.0 * power + 2.0 * tx + 3.0 * rx) / rate
    terms = [
        (1.0 - o_sd, one_shot),
        (o_sd * (1.0 - o_sr), relayed),
        (o_sd * o_sr, one_shot),
    ]
    return _report(terms, "idf")


def scheme_energy(scheme: str, power: float, outage: OutageBreakdown,
                  profile: ModemPowerProfile) -> EnergyReport:
    if scheme == "sh":
        return energy_single_hop(power, profile)
    if scheme == "idf":
        return energy_idf(power, outage, profile)
    return energy_multihop(power, outage, len(outage.per_link), profile)
