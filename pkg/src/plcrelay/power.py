"""Minimum transmit power that meets a target outage probability."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

from .channel import (
    SQRT8,
    ZETA,
    AttenuationParams,
    LinkSpec,
    NoiseParams,
    attenuation,
    erfinv,
    noise_threshold,
)
from .outage import (
    Topology,
    chain_outage,
    check_idf_topology,
    idf_outage,
    idf_polynomial,
    idf_polynomial_terms,
    link_outage,
    parse_scheme,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MAX_EXPANSIONS = 200
MAX_ITERATIONS = 400
# initial guess sits this far below the single-link closed form
GUESS_FACTOR = 1e-6
IDF_POLY_TOL = 1e-9


class SolverError(RuntimeError):
    """Bracketing or bisection could not produce a valid power."""


@dataclass(frozen=True)
class PowerSolution:
    power: float
    residual: float
    iterations: int
    bracket: tuple
    method: str


def _check_target(target: float) -> None:
    if not 0.0 < target < 1.0:
        raise ValueError(f"target outage must lie in (0, 1), got {target!r}")


def closed_form_power(target: float, link: LinkSpec, noise: NoiseParams,
                      att: AttenuationParams, xi: float) -> float:
    """Power at which a single link reaches outage ``target``."""
    _check_target(target)
    fad = link.fading
    gain = attenuation(att, link.distance)
    if gain == 0.0:
        raise SolverError(f"attenuation underflows at d={link.distance} m")
    exponent = -(SQRT8 * fad.sigma * float(erfinv(2.0 * target - 1.0)) + 2.0 * fad.mu) / ZETA
    power = noise_threshold(noise, xi) * noise.background_variance / gain * math.exp(exponent)
    if not (math.isfinite(power) and power > 0):
        raise SolverError(f"closed-form power is not a positive finite number: {power!r}")
    return power


def solve_single_hop(target: float, link: LinkSpec, noise: NoiseParams,
                     att: AttenuationParams, xi: float) -> PowerSolution:
    power = closed_form_power(target, link, noise, att, xi)
    residual = abs(link_outage(power, link, noise, att, xi) - target)
    return PowerSolution(power, residual, 0, (power, power), "closed-form")


def bisect_power(outage: Callable[[float], float], target: float, guess: float,
                 tol: float = DEFAULT_TOL, max_expansions: int = MAX_EXPANSIONS,
                 max_iterations: int = MAX_ITERATIONS) -> PowerSolution:
    """Find ``P`` with ``outage(P) == target`` for a strictly decreasing ``outage``.

    The bracket is grown geometrically (doubling / halving from ``guess``)
    until it straddles the target, then bisected at the geometric midpoint.
    Bisection stops once the outage residual is within ``tol`` or the
    bracket is narrower than ``1e-12`` of the power.
    """
    _check_target(target)
    if not tol > 0:
        raise ValueError(f"tolerance must be > 0, got {tol!r}")
    if not (math.isfinite(guess) and guess > 0):
        raise SolverError(f"initial guess must be positive and finite, got {guess!r}")

    def evaluate(p: float) -> float:
        value = outage(p)
        if not math.isfinite(value):
            raise SolverError(f"non-finite outage {value!r} at P={p!r}")
        return value

    iterations = 0
    point = lo = hi = guess
    value = evaluate(point)
    while value > target:
        if iterations >= max_expansions:
            raise SolverError(
                f"no power up to {point:.3e} W reaches outage {target:g} "
                f"after {max_expansions} doublings")
        lo, point = point, point * 2.0
        hi = point
        value = evaluate(point)
        iterations += 1
    while value < target:
        if iterations >= max_expansions:
            raise SolverError(
                f"outage stays below {target:g} down to {point:.3e} W "
                f"after {max_expansions} halvings")
        hi, point = point, point / 2.0
        lo = point
        value = evaluate(point)
        iterations += 1
    if value == target:
        return PowerSolution(point, 0.0, iterations, (lo, hi), "bisection")
    logger.debug("bracket [%g, %g] after %d expansions", lo, hi, iterations)

    while True:
        mid = math.sqrt(lo * hi)
        value = evaluate(mid)
        iterations += 1
        residual = abs(value - target)
        if residual <= tol or hi - lo < 1e-12 * mid:
            return PowerSolution(mid, residual, iterations, (lo, hi), "bisection")
        if iterations >= max_iterations:
            raise SolverError(f"bisection did not converge in {max_iterations} iterations")
        if value > target:
            lo = mid
        else:
            hi = mid


def _initial_guess(links, target, noise, att, xi) -> float:
    # the worst link alone already needs this much power
    return max(closed_form_power(target, link, noise, att, xi) for link in links) * GUESS_FACTOR


def solve_multihop(target: float, topology: Topology, noise: NoiseParams,
                   att: AttenuationParams, xi: float,
                   tol: float = DEFAULT_TOL) -> PowerSolution:
    """Common transmit power for a DF chain to reach end-to-end outage ``target``.

    A one-link topology is accepted and goes through the same bisection,
    which makes it directly comparable with :func:`solve_single_hop`.
    """
    _check_target(target)
    links = topology.links

    def outage(p):
        return chain_outage([link_outage(p, link, noise, att, xi) for link in links])

    guess = _initial_guess(links, target, noise, att, xi)
    return bisect_power(outage, target, guess, tol)


def solve_idf(target: float, topology: Topology, noise: NoiseParams,
              att: AttenuationParams, xi: float,
              tol: float = DEFAULT_TOL) -> PowerSolution:
    """Power for incremental DF to reach outage ``target``.

    Bisects the composed IDF outage, then confirms that the root also
    satisfies the erf polynomial ``X + Y + 3Z + XZ + YZ - XY - XYZ = 8 O* - 3``.
    """
    _check_target(target)
    check_idf_topology(topology)

    def outage(p):
        return idf_outage(p, topology, noise, att, xi).end_to_end

    guess = _initial_guess(topology.links + (topology.direct,), target, noise, att, xi)
    solution = bisect_power(outage, target, guess, tol)
    x, y, z = idf_polynomial_terms(solution.power, topology, noise, att, xi)
    poly_residual = abs(idf_polynomial(x, y, z) - (8.0 * target - 3.0))
    if poly_residual > max(IDF_POLY_TOL, 8.0 * tol + 1e-12):
        raise SolverError(f"IDF polynomial residual {poly_residual:.3e} exceeds tolerance")
    return solution


def solve_scheme(scheme: str, target: float, topology: Topology, noise: NoiseParams,
                 att: AttenuationParams, xi: float,
                 tol: float = DEFAULT_TOL) -> PowerSolution:
    """Dispatch on ``"sh"``, ``"mhN"`` or ``"idf"``."""
    parse_scheme(scheme)
    if scheme == "sh":
        if topology.hops != 1:
            raise ValueError("single-hop scheme needs a one-link topology")
        return solve_single_hop(target, topology.links[0], noise, att, xi)
    if scheme == "idf":
        return solve_idf(target, topology, noise, att, xi, tol)
    return solve_multihop(target, topology, noise, att, xi, tol)
