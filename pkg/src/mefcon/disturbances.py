"""Disturbance signal synthesis for simulation runs.

Three kinds:

``zero``
    All signals identically zero.
``sinusoid``
    Bounded continuous signals ``amp * sin(2 pi f t + phase)`` with one
    deterministic phase per signal drawn from the seed.  Satisfies the
    bounded-and-continuous hypothesis of the ISS envelope.
``white``
    Piecewise-constant Gaussian draws per integration step with standard
    deviation ``sigma / sqrt(h)`` (so the discrete process approximates
    unit-intensity continuous white noise at sigma = 1).  Values are
    frozen across the stages of one RK4 step.

Three independent streams are spawned from the seed: one for the input
disturbances delta, one for the self-measurement errors, one for the
neighbor-measurement errors.  Sharing a seed between two runs therefore
shares the delta realization even if one run never consumes the
measurement streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_KINDS = ("zero", "sinusoid", "white")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Declarative description of the disturbance signals of one run.

    Fields
    ------
    kind : str
        ``zero``, ``sinusoid`` or ``white``.
    delta_max, eps_max : float
        Amplitude bounds of the sinusoid signals (input and measurement).
    sigma : float
        White-noise intensity; per-step std is sigma / sqrt(h).
    frequency : float
        Sinusoid frequency in cycles per time unit.
    seed : int or None
        Stream seed; None defers to the scenario seed.
    """

    kind: str = "zero"
    delta_max: float = 0.0
    eps_max: float = 0.0
    sigma: float = 1.0
    frequency: float = 1.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ConfigError(f"disturbance kind {self.kind!r} not in {_KINDS}")
        if self.delta_max < 0 or self.eps_max < 0:
            raise ConfigError("disturbance bounds must be nonnegative")
        if self.kind == "white" and self.sigma < 0:
            raise ConfigError("white-noise sigma must be nonnegative")
        if self.kind == "sinusoid" and self.frequency <= 0:
            raise ConfigError("sinusoid frequency must be positive")


class DisturbanceRealization:
    """Concrete signal source for one run.

    ``at(t, step)`` returns ``(delta, eps_self, eps_edge)`` arrays of
    shapes (N,), (N,), (E,).  Sinusoids are evaluated at the exact time
    ``t`` (RK4 stages included); white draws depend only on ``step``.
    """

    def __init__(self, profile: DisturbanceProfile, n_nodes: int, n_edges: int,
                 steps: int, h: float, seed: int,
                 need_edge_noise: bool = True) -> None:
        self.profile = profile
        self.n = n_nodes
        self.m = n_edges
        self.steps = steps
        self._zero_n = np.zeros(n_nodes)
        self._zero_m = np.zeros(n_edges)
        kind = profile.kind
        use_seed = profile.seed if profile.seed is not None else seed
        if kind == "sinusoid":
            kids = np.random.SeedSequence(use_seed).spawn(3)
            self._ph_delta = np.random.default_rng(kids[0]).uniform(0, 2 * math.pi, n_nodes)
            self._ph_self = np.random.default_rng(kids[1]).uniform(0, 2 * math.pi, n_nodes)
            self._ph_edge = np.random.default_rng(kids[2]).uniform(0, 2 * math.pi, n_edges)
            self._omega = 2 * math.pi * profile.frequency
        elif kind == "white":
            std = profile.sigma / math.sqrt(h)
            kids = np.random.SeedSequence(use_seed).spawn(3)
            self._delta = np.random.default_rng(kids[0]).normal(0.0, std, (steps, n_nodes))
            self._eps_self = np.random.default_rng(kids[1]).normal(0.0, std, (steps, n_nodes))
            # the edge stream is skipped when no edge measurement uses it;
            # stream independence keeps the other draws unchanged either way
            if need_edge_noise and n_edges:
                self._eps_edge = np.random.default_rng(kids[2]).normal(0.0, std, (steps, n_edges))
            else:
                self._eps_edge = None

    def at(self, t: float, step: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        kind = self.profile.kind
        if kind == "zero":
            return self._zero_n, self._zero_n, self._zero_m
        if kind == "sinusoid":
            p = self.profile
            arg = self._omega * t
            return (p.delta_max * np.sin(arg + self._ph_delta),
                    p.eps_max * np.sin(arg + self._ph_self),
                    p.eps_max * np.sin(arg + self._ph_edge))
        k = min(max(step, 0), self.steps - 1)
        edge = self._eps_edge[k] if self._eps_edge is not None else self._zero_m
        return self._delta[k], self._eps_self[k], edge


def sample_disturbances(profile: DisturbanceProfile, n_nodes: int, n_edges: int,
                        steps: int, h: float, seed: int = 0,
                        need_edge_noise: bool = True) -> DisturbanceRealization:
    """Materialize a profile into a reproducible signal source."""
    if steps < 1:
        raise ConfigError("need at least one integration step")
    if h <= 0:
        raise ConfigError("step size h must be positive")
    return DisturbanceRealization(profile, n_nodes, n_edges, steps, h, seed,
                                  need_edge_noise=need_edge_noise)
