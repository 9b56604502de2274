"""Scenario configuration files: schema, defaults, validation.

Configs are YAML (JSON is a YAML subset and parses too).  Node indices in
edge triples are 1-based in files and converted on load.  ``build_scenario``
returns both the runnable ``ScenarioConfig`` and a fully resolved echo
dict with every default filled in, which the CLI embeds into manifests so
a run can be reproduced from its manifest alone.

Schema (defaults in parentheses):

    graph:
      family: complete | directed_cycle | undirected_ring | path | custom
      n: <int, required>
      weight: <float> (1.0)
      edges: [[i, j, w], ...]        # custom only, 1-based
    params:
      B: <float or list of N floats> (1.0)
      R: <float> (1.0)
      S: <float> (1.0)
      G: <float> (1.0)
      Xi: <float, list, or null>     (null: 1/Q* per node)
    initial:
      x0: <list of N floats> or {random_uniform: {low: <float>, high: <float>}}
          (random_uniform with low=-1, high=1)
      prior: "same" or <list of N floats> ("same")
    disturbance:
      kind: zero | sinusoid | white  (zero)
      delta_max: <float> (0.0)
      eps_max: <float> (0.0)
      sigma: <float> (1.0)
      frequency: <float> (1.0)
      seed: <int or null>            (null: scenario seed)
    integration:
      h: <float> (0.01)
      T: <float> (50.0)
    seed: <int> (0)
    riccati: steady | dynamic (steady)
    algorithm: filter | baseline (filter)   # simulate verb only
    compare_seeds: <list of ints or int count> ([seed])
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .disturbances import DisturbanceProfile
from .errors import ConfigError
from .filtering import uniform_params
from .graphs import make_graph
from .simulate import ScenarioConfig

_TOP_KEYS = {"graph", "params", "initial", "disturbance", "integration",
             "seed", "riccati", "algorithm", "compare_seeds"}


def load_config(path: str | Path) -> dict:
    """Parse a config file into a raw dict, with structural validation."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error in {p}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a mapping, got {type(raw).__name__}")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return sec


def _positive(value, field: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{field}' must be a number, got {value!r}") from None
    if v <= 0:
        raise ConfigError(f"field '{field}' must be positive, got {v}")
    return v


def build_scenario(raw: dict, seed_override: int | None = None,
                   riccati_override: str | None = None
                   ) -> tuple[ScenarioConfig, dict]:
    """Turn a raw config dict into a ScenarioConfig plus a resolved echo."""
    g = _section(raw, "graph")
    if "n" not in g:
        raise ConfigError("field 'graph.n' is required")
    n = int(g["n"])
    family = str(g.get("family", "complete")).replace("-", "_").lower()
    weight = float(g.get("weight", 1.0))
    edges_1b = g.get("edges")
    edges = None
    if edges_1b is not None:
        try:
            edges = [(int(i) - 1, int(j) - 1, float(w)) for i, j, w in edges_1b]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'graph.edges' must be [i, j, w] triples: {exc}") from exc
    topology = make_graph(family, n, weight, edges)

    p = _section(raw, "params")
    B = p.get("B", 1.0)
    R = _positive(p.get("R", 1.0), "params.R")
    S = _positive(p.get("S", 1.0), "params.S")
    G = _positive(p.get("G", 1.0), "params.G")
    Xi = p.get("Xi")
    params = uniform_params(topology, B=B, R=R, S=S, G=G, Xi=Xi)

    seed = int(raw.get("seed", 0)) if seed_override is None else int(seed_override)

    d = _section(raw, "disturbance")
    profile = DisturbanceProfile(
        kind=str(d.get("kind", "zero")),
        delta_max=float(d.get("delta_max", 0.0)),
        eps_max=float(d.get("eps_max", 0.0)),
        sigma=float(d.get("sigma", 1.0)),
        frequency=float(d.get("frequency", 1.0)),
        seed=None if d.get("seed") is None else int(d["seed"]),
    )

    it = _section(raw, "integration")
    h = _positive(it.get("h", 0.01), "integration.h")
    T = _positive(it.get("T", 50.0), "integration.T")

    ini = _section(raw, "initial")
    x0_spec = ini.get("x0", {"random_uniform": {"low": -1.0, "high": 1.0}})
    if isinstance(x0_spec, dict):
        ru = x0_spec.get("random_uniform")
        if ru is None:
            raise ConfigError("field 'initial.x0' must be a list or {random_uniform: ...}")
        lo, hi = float(ru.get("low", -1.0)), float(ru.get("high", 1.0))
        if hi <= lo:
            raise ConfigError("initial.x0 random_uniform needs high > low")
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(4)[3])
        x0 = rng.uniform(lo, hi, n)
    else:
        x0 = np.asarray([float(v) for v in x0_spec])
        if x0.shape != (n,):
            raise ConfigError(f"field 'initial.x0' must list {n} values")
    prior_spec = ini.get("prior", "same")
    if isinstance(prior_spec, str):
        if prior_spec != "same":
            raise ConfigError("field 'initial.prior' must be 'same' or a list")
        prior = None
    else:
        prior = np.asarray([float(v) for v in prior_spec])
        if prior.shape != (n,):
            raise ConfigError(f"field 'initial.prior' must list {n} values")

    riccati = str(raw.get("riccati", "steady")) if riccati_override is None \
        else str(riccati_override)
    algorithm = str(raw.get("algorithm", "filter"))
    if algorithm not in ("filter", "baseline"):
        raise ConfigError("field 'algorithm' must be 'filter' or 'baseline'")

    cs = raw.get("compare_seeds", [seed])
    if isinstance(cs, int):
        compare_seeds = list(range(seed, seed + cs))
    else:
        compare_seeds = [int(s) for s in cs]

    config = ScenarioConfig(topology, params, x0, prior, profile, h, T,
                            seed, riccati)

    resolved = {
        "graph": {"family": family, "n": n, "weight": weight,
                  **({"edges": [[i + 1, j + 1, w] for i, j, w in edges]}
                     if edges is not None else {})},
        "params": {"B": params.B.tolist(), "R": R, "S": S, "G": G,
                   "Xi": params.Xi.tolist()},
        "initial": {"x0": config.x0.tolist(), "prior": config.prior.tolist()},
        "disturbance": {"kind": profile.kind, "delta_max": profile.delta_max,
                        "eps_max": profile.eps_max, "sigma": profile.sigma,
                        "frequency": profile.frequency,
                        "seed": profile.seed if profile.seed is not None else seed},
        "integration": {"h": h, "T": T, "steps": config.steps},
        "seed": seed,
        "riccati": riccati,
        "algorithm": algorithm,
        "compare_seeds": compare_seeds,
    }
    return config, resolved
