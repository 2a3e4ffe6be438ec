"""Run configuration: JSON schema, validation, and object builders.

A config file is a JSON object with sections ``problem``, ``graph``,
``schedules``, ``run`` and optional ``privacy`` and ``sweep``. The problem
and graph sections accept either the named preset "ieee14" or explicit
data. Parsing is strict: unknown keys and ill-typed values raise with the
offending field named, and parse(serialize(config)) round-trips losslessly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph import CommGraph, build_uniform_weights
from .presets import comparison_schedules, ieee14_graph, ieee14_problem, ieee14_schedules
from .problem import AllocationProblem, QuadraticBoxCost
from .schedules import GeometricSchedule, ScheduleSet

__all__ = [
    "RunConfig",
    "ProblemSection",
    "GraphSection",
    "ScheduleSection",
    "RunSection",
    "PrivacySection",
    "SweepSection",
    "parse_config",
    "serialize_config",
    "build_problem",
    "build_graph",
    "build_schedules",
    "default_config",
]

_PRESETS = ("ieee14",)
_SCHEDULE_PRESETS = {"ieee14": ieee14_schedules, "comparison": comparison_schedules}


def _require(cond: bool, fieldname: str, msg: str):
    if not cond:
        raise ValueError(f"config field '{fieldname}': {msg}")


def _take(d: dict, section: str, allowed: dict) -> dict:
    """Validate a section dict against {key: (type(s), required, default)}."""
    _require(isinstance(d, dict), section, "must be a JSON object")
    unknown = set(d) - set(allowed)
    _require(not unknown, section, f"unknown keys {sorted(unknown)}")
    out = {}
    for key, (types, required, default) in allowed.items():
        if key not in d:
            _require(not required, f"{section}.{key}", "is required")
            out[key] = default
            continue
        val = d[key]
        if types is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        _require(isinstance(val, types) and not (types is int and isinstance(val, bool)),
                 f"{section}.{key}", f"expected {getattr(types, '__name__', types)}")
        out[key] = val
    return out


@dataclass(frozen=True)
class ProblemSection:
    preset: str | None = None
    agents: tuple = ()  # tuples (a, b, lo, hi, c, d)
    m: int = 1


@dataclass(frozen=True)
class GraphSection:
    preset: str | None = None
    n_agents: int = 0
    edges_r: tuple = ()
    edges_c: tuple = ()


@dataclass(frozen=True)
class ScheduleSection:
    alpha0: float = 0.015
    q: float = 0.991
    theta_xi0: float = 0.01
    q_xi: float = 0.995
    theta_zeta0: float = 0.01
    q_zeta: float = 0.995
    gamma: float = 0.8
    phi: float = 0.7
    seed: int | None = None  # legacy location; run.seed wins when both given


@dataclass(frozen=True)
class RunSection:
    algorithm: str = "dpdgt"
    n_iters: int = 5000
    n_seeds: int = 200
    seed: int = 0
    audit: bool = False
    iota: float = 0.034
    out_dir: str = "out"


@dataclass(frozen=True)
class PrivacySection:
    delta: float = 1.0
    k_max: int = 100_000


@dataclass(frozen=True)
class SweepSection:
    parameter: str = "theta0"
    grid: tuple = (0.0, 0.02, 0.05, 0.1)
    n_seeds: int | None = None  # falls back to run.n_seeds


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSection = field(default_factory=ProblemSection)
    graph: GraphSection = field(default_factory=GraphSection)
    schedules: ScheduleSection = field(default_factory=ScheduleSection)
    run: RunSection = field(default_factory=RunSection)
    privacy: PrivacySection = field(default_factory=PrivacySection)
    sweep: SweepSection = field(default_factory=SweepSection)

    @property
    def seed(self) -> int:
        return self.run.seed


def default_config() -> RunConfig:
    """The benchmark preset: ieee14 problem and graph, convergence schedules."""
    return RunConfig(
        problem=ProblemSection(preset="ieee14"),
        graph=GraphSection(preset="ieee14"),
    )


def parse_config(data) -> RunConfig:
    """Build a RunConfig from a JSON string or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    _require(isinstance(data, dict), "<root>", "must be a JSON object")
    unknown = set(data) - {"problem", "graph", "schedules", "run", "privacy", "sweep"}
    _require(not unknown, "<root>", f"unknown sections {sorted(unknown)}")

    p = _take(data.get("problem", {}), "problem", {
        "preset": (str, False, None),
        "agents": (list, False, []),
        "m": (int, False, 1),
    })
    if p["preset"] is not None:
        _require(p["preset"] in _PRESETS, "problem.preset", f"unknown preset {p['preset']!r}")
    agents = []
    for i, spec in enumerate(p["agents"]):
        a = _take(spec, f"problem.agents[{i}]", {
            "a": (float, True, None),
            "b": (float, True, None),
            "lo": (float, True, None),
            "hi": (float, True, None),
            "c": (float, False, 0.0),
            "d": (float, True, None),
        })
        agents.append((a["a"], a["b"], a["lo"], a["hi"], a["c"], a["d"]))
    _require(p["preset"] is not None or agents, "problem", "needs a preset or explicit agents")
    problem = ProblemSection(preset=p["preset"], agents=tuple(agents), m=p["m"])

    g = _take(data.get("graph", {}), "graph", {
        "preset": (str, False, None),
        "n_agents": (int, False, 0),
        "edges_r": (list, False, []),
        "edges_c": (list, False, []),
    })
    if g["preset"] is not None:
        _require(g["preset"] in _PRESETS, "graph.preset", f"unknown preset {g['preset']!r}")
    else:
        _require(g["n_agents"] >= 1, "graph.n_agents", "must be >= 1 without a preset")
    graph = GraphSection(
        preset=g["preset"],
        n_agents=g["n_agents"],
        edges_r=tuple(tuple(e) for e in g["edges_r"]),
        edges_c=tuple(tuple(e) for e in g["edges_c"]),
    )

    s = _take(data.get("schedules", {}), "schedules", {
        "alpha0": (float, False, 0.015),
        "q": (float, False, 0.991),
        "theta_xi0": (float, False, 0.01),
        "q_xi": (float, False, 0.995),
        "theta_zeta0": (float, False, 0.01),
        "q_zeta": (float, False, 0.995),
        "gamma": (float, False, 0.8),
        "phi": (float, False, 0.7),
        "seed": (int, False, None),
    })
    schedules = ScheduleSection(**s)

    r = _take(data.get("run", {}), "run", {
        "algorithm": (str, False, "dpdgt"),
        "n_iters": (int, False, 5000),
        "n_seeds": (int, False, 200),
        "seed": (int, False, 0),
        "audit": (bool, False, False),
        "iota": (float, False, 0.034),
        "out_dir": (str, False, "out"),
    })
    _require(r["algorithm"] in ("dpdgt", "ddgt"), "run.algorithm", "must be 'dpdgt' or 'ddgt'")
    _require(r["n_iters"] >= 1, "run.n_iters", "must be >= 1")
    _require(r["n_seeds"] >= 1, "run.n_seeds", "must be >= 1")
    # the seed may also live in the schedules section; an explicit run.seed wins
    if "seed" not in data.get("run", {}) and schedules.seed is not None:
        r["seed"] = schedules.seed
    run = RunSection(**r)

    pv = _take(data.get("privacy", {}), "privacy", {
        "delta": (float, False, 1.0),
        "k_max": (int, False, 100_000),
    })
    privacy = PrivacySection(**pv)

    sw = _take(data.get("sweep", {}), "sweep", {
        "parameter": (str, False, "theta0"),
        "grid": (list, False, [0.0, 0.02, 0.05, 0.1]),
        "n_seeds": (int, False, None),
    })
    _require(sw["parameter"] in ("theta0", "alpha0", "q"), "sweep.parameter",
             "must be one of 'theta0', 'alpha0', 'q'")
    sweep = SweepSection(parameter=sw["parameter"],
                         grid=tuple(float(x) for x in sw["grid"]),
                         n_seeds=sw["n_seeds"])

    return RunConfig(problem=problem, graph=graph, schedules=schedules,
                     run=run, privacy=privacy, sweep=sweep)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON for a RunConfig; parse(serialize(cfg)) == cfg."""
    data = {
        "problem": {"m": cfg.problem.m},
        "graph": {},
        "schedules": {
            "alpha0": cfg.schedules.alpha0,
            "q": cfg.schedules.q,
            "theta_xi0": cfg.schedules.theta_xi0,
            "q_xi": cfg.schedules.q_xi,
            "theta_zeta0": cfg.schedules.theta_zeta0,
            "q_zeta": cfg.schedules.q_zeta,
            "gamma": cfg.schedules.gamma,
            "phi": cfg.schedules.phi,
        },
        "run": {
            "algorithm": cfg.run.algorithm,
            "n_iters": cfg.run.n_iters,
            "n_seeds": cfg.run.n_seeds,
            "seed": cfg.run.seed,
            "audit": cfg.run.audit,
            "iota": cfg.run.iota,
            "out_dir": cfg.run.out_dir,
        },
        "privacy": {"delta": cfg.privacy.delta, "k_max": cfg.privacy.k_max},
        "sweep": {"parameter": cfg.sweep.parameter, "grid": list(cfg.sweep.grid)},
    }
    if cfg.schedules.seed is not None:
        data["schedules"]["seed"] = cfg.schedules.seed
    if cfg.sweep.n_seeds is not None:
        data["sweep"]["n_seeds"] = cfg.sweep.n_seeds
    if cfg.problem.preset is not None:
        data["problem"]["preset"] = cfg.problem.preset
    if cfg.problem.agents:
        data["problem"]["agents"] = [
            {"a": a, "b": b, "lo": lo, "hi": hi, "c": c, "d": d}
            for (a, b, lo, hi, c, d) in cfg.problem.agents
        ]
    if cfg.graph.preset is not None:
        data["graph"]["preset"] = cfg.graph.preset
    else:
        data["graph"] = {
            "n_agents": cfg.graph.n_agents,
            "edges_r": [list(e) for e in cfg.graph.edges_r],
            "edges_c": [list(e) for e in cfg.graph.edges_c],
        }
    return json.dumps(data, indent=2, sort_keys=True)


def build_problem(cfg: RunConfig) -> AllocationProblem:
    if cfg.problem.preset == "ieee14":
        return ieee14_problem()
    agents = tuple(
        (QuadraticBoxCost(a=a, b=b, lo=lo, hi=hi, c=c), d)
        for (a, b, lo, hi, c, d) in cfg.problem.agents
    )
    return AllocationProblem(agents=agents, m=cfg.problem.m)


def build_graph(cfg: RunConfig) -> CommGraph:
    if cfg.graph.preset == "ieee14":
        return ieee14_graph()
    return build_uniform_weights(cfg.graph.n_agents, cfg.graph.edges_r, cfg.graph.edges_c)


def build_schedules(cfg: RunConfig) -> ScheduleSet:
    s = cfg.schedules
    return ScheduleSet(
        alpha=GeometricSchedule(s.alpha0, s.q),
        theta_xi=GeometricSchedule(s.theta_xi0, s.q_xi),
        theta_zeta=GeometricSchedule(s.theta_zeta0, s.q_zeta),
        gamma=s.gamma,
        phi=s.phi,
    )
