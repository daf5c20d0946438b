"""Experiment protocols.

Work is split into tasks (one replicate, one row of a phase grid, one
point of a commons sweep).  Each task is a pure function of the resolved
config and its index, returns named :class:`Table` fragments, and draws
randomness only from ``substream(seed, replicate, stream)``.  Fragments
are joined in task order, so outputs do not depend on how many workers
ran the tasks.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import DynamicsConfig, InitSpec, run
from ..equilibrium import graphical_nc, toc_numeric_equilibrium
from ..games import (
    AE_1,
    AE_2,
    BE,
    NE,
    FixedPayoffs,
    PrisonersDilemma,
    cg_pd_threshold,
    make_resource,
    pd2_classify,
    selfish_survivor_interval,
    toc_qc,
    toc_two_group,
)
from ..games.commons import NoRetreat
from ..graph import read_edgelist
from ..netgen import STREAM_GRAPH, STREAM_INIT, STREAM_WEALTH, make_complete, make_er, substream
from .config import DYNAMIC_KINDS, with_value
from .output import Table


@dataclass
class TaskResult:
    tables: dict
    failures: list = field(default_factory=list)


# -- building blocks ------------------------------------------------------------


def build_graph(cfg: dict, replicate: int):
    kind = cfg["graph.kind"]
    if kind == "file":
        return read_edgelist(cfg["graph.file"])
    if kind == "complete":
        return make_complete(cfg["graph.n"])
    return make_er(cfg["graph.n"], cfg["graph.mean_degree"], substream(cfg["experiment.seed"], replicate, STREAM_GRAPH))


def build_wealth(cfg: dict, n: int, replicate: int):
    kind = cfg.get("wealth.kind", "none")
    if kind == "none":
        return None
    if kind == "explicit":
        w = np.array(cfg["wealth.values"], dtype=float)
        if w.shape != (n,):
            raise ValueError(f"wealth.values needs {n} entries, got {w.size}")
        return w
    rng = substream(cfg["experiment.seed"], replicate, STREAM_WEALTH)
    return rng.uniform(cfg["wealth.low"], cfg["wealth.high"], size=n)


def build_game(cfg: dict, wealth):
    if cfg["game.kind"] == "wealth":
        return FixedPayoffs(wealth)
    return PrisonersDilemma(cfg["game.c"], wealth)


def build_init(cfg: dict) -> InitSpec:
    values = tuple(cfg["init.values"]) if cfg["init.values"] is not None else ()
    return InitSpec(cfg["init.kind"], cfg["init.value"], cfg["init.low"], cfg["init.high"], cfg["init.node"], values)


def build_dynamics(cfg: dict) -> DynamicsConfig:
    return DynamicsConfig(
        lam=cfg["dynamics.lam"],
        q_max=cfg["dynamics.q_max"],
        max_steps=cfg["dynamics.max_steps"],
        tol=cfg["dynamics.tol"],
        window=cfg["dynamics.window"],
        mode=cfg["dynamics.mode"],
        rule=cfg["dynamics.rule"],
        seed=cfg["experiment.seed"],
    )


def _recorded_steps(T: int, stride: int) -> np.ndarray:
    idx = np.arange(0, T + 1, stride)
    return idx if idx[-1] == T else np.r_[idx, T]


# -- dynamics on graphs ---------------------------------------------------------

TRAJ_COLS = (["replicate", "t", "node", "q", "s", "pi", "u"], ["-", "step", "-", "-", "-", "payoff", "payoff"])
SUMMARY_COLS = (
    ["replicate", "t", "mean_s", "mean_pi", "std_pi", "mean_q"],
    ["-", "step", "-", "payoff", "payoff", "-"],
)
RUN_COLS = [
    "replicate", "status", "steps", "n", "edges", "isolated",
    "mean_s", "mean_pi", "std_pi", "mean_q", "graphical_nc", "selfish", "survivor_in_interval",
]
RUN_UNITS = ["-", "-", "step", "-", "-", "-", "-", "payoff", "payoff", "-", "-", "-", "-"]
NODE_COLS = (
    ["replicate", "node", "degree", "wealth", "q0", "q_final", "s0", "s_final", "u_final", "graphical_member"],
    ["-", "-", "-", "payoff", "-", "-", "-", "-", "payoff", "-"],
)
THRESHOLD_COLS = (["replicate", "n_c", "q_c", "q_sorted0"], ["-", "-", "-", "-"])


def dynamics_task(cfg: dict, replicate: int) -> TaskResult:
    graph = build_graph(cfg, replicate)
    n = graph.n
    wealth = build_wealth(cfg, n, replicate)
    game = build_game(cfg, wealth)
    dcfg = build_dynamics(cfg)
    traj = run(graph, game, build_init(cfg), dcfg, substream(cfg["experiment.seed"], replicate, STREAM_INIT))
    summ = traj.summary()
    kind = cfg["experiment.kind"]

    tables = {}
    keep = _recorded_steps(traj.q.shape[0] - 1, cfg["output.stride"])
    if cfg["output.trajectory"]:
        t = Table(*TRAJ_COLS)
        for step in keep:
            for i in range(n):
                t.rows.append([replicate, int(step), i, traj.q[step, i], traj.s[step, i], traj.pi[step, i], traj.u[step, i]])
        tables["trajectory"] = t
    s = Table(*SUMMARY_COLS)
    for step in keep:
        s.rows.append([replicate, int(step), summ.mean_s[step], summ.mean_pi[step], summ.std_pi[step], summ.mean_q[step]])
    tables["summary"] = s

    q0, qf = traj.q[0], traj.q[-1]
    member = np.zeros(n, dtype=bool)
    nc = ""
    if kind == "cg_pd":
        nc = graphical_nc(q0, n, cfg["game.c"], dcfg.q_max)
        member[np.argsort(-q0, kind="stable")[:nc]] = True
        thr = Table(*THRESHOLD_COLS)
        q_sorted = np.sort(q0)[::-1]
        for k in range(1, n + 1):
            thr.rows.append([replicate, k, cg_pd_threshold(n, k, cfg["game.c"]), q_sorted[k - 1]])
        tables["threshold"] = thr

    selfish = qf < dcfg.q_max / 2
    in_interval = ""
    if wealth is not None:
        lo, hi = selfish_survivor_interval(wealth, cfg["game.c"] if cfg["game.kind"] == "pd" else 0.0)
        in_interval = bool(selfish.sum() == 1 and lo <= wealth[selfish][0] <= hi)

    nodes = Table(*NODE_COLS)
    for i in range(n):
        nodes.rows.append([
            replicate, i, int(graph.degrees[i]), "" if wealth is None else wealth[i],
            q0[i], qf[i], traj.s[0, i], traj.s[-1, i], traj.u[-1, i], bool(member[i]) if kind == "cg_pd" else "",
        ])
    tables["nodes"] = nodes

    runs = Table(RUN_COLS, RUN_UNITS)
    runs.rows.append([
        replicate, traj.status, traj.steps, n, graph.num_edges, int(graph.isolated.size),
        summ.mean_s[-1], summ.mean_pi[-1], summ.std_pi[-1], summ.mean_q[-1], nc, int(selfish.sum()), in_interval,
    ])
    tables["runs"] = runs

    failures = []
    if traj.status == "equilibrium_failed":
        failures.append(f"replicate {replicate}: strategy equilibrium did not converge")
    elif not traj.converged and cfg["experiment.require_convergence"]:
        failures.append(f"replicate {replicate}: dynamics did not converge in {traj.steps} steps")
    return TaskResult(tables, failures)


# -- two-player phase diagram ---------------------------------------------------

LABEL_OF_PROFILE = {(0, 0): NE, (1, 1): BE, (1, 0): AE_1, (0, 1): AE_2}
PHASE_COLS = (
    ["q1", "c", "analytic", "simulated", "boundary_distance", "boundary", "steps", "status"],
    ["-", "payoff", "-", "-", "-", "-", "step", "-"],
)


def grid_centers(points: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Cell centres of ``points`` equal cells on ``[lo, hi]``; avoids the open endpoints."""
    return lo + (hi - lo) * (np.arange(points) + 0.5) / points


def pd2_boundary_distance(q1: float, q2: float, c: float, samples: int = 20001) -> float:
    """Euclidean distance in the ``(q1, c)`` plane to the nearest threshold curve (``q2`` fixed)."""
    x = np.linspace(0.0, 1.0, samples)[:-1]
    upper = q2 * (1 - x) / (1 - q2)
    lower = x * (1 - q2) / (1 - x)
    d = np.minimum(np.hypot(x - q1, upper - c), np.hypot(x - q1, lower - c))
    return float(d.min())


def phase_task(cfg: dict, row: int) -> TaskResult:
    q2 = cfg["phase.q2"]
    q1 = float(grid_centers(cfg["phase.q1_points"])[row])
    graph = make_complete(2)
    dcfg = build_dynamics(cfg) if cfg["phase.simulate"] else None
    table = Table(*PHASE_COLS)
    failures = []
    for c in grid_centers(cfg["phase.c_points"]):
        c = float(c)
        analytic = pd2_classify(q1, q2, c).label
        dist = pd2_boundary_distance(q1, q2, c)
        sim, steps, status = "", "", ""
        if dcfg is not None:
            traj = run(graph, PrisonersDilemma(c), [q1, q2], dcfg)
            sim = LABEL_OF_PROFILE[tuple(int(v) for v in traj.s[-1])]
            steps, status = traj.steps, traj.status
            if traj.status == "equilibrium_failed" or (not traj.converged and cfg["experiment.require_convergence"]):
                failures.append(f"q1={q1:.4g}, c={c:.4g}: {traj.status}")
        table.rows.append([q1, c, analytic, sim, dist, dist < cfg["phase.boundary"], steps, status])
    return TaskResult({"phase": table}, failures)


def phase_summary(table: Table) -> Table:
    out = Table(
        ["points", "non_boundary", "agree_non_boundary", "agreement"], ["-", "-", "-", "-"]
    )
    rows = [r for r in table.rows if r[3] != ""]
    inner = [r for r in rows if not r[5]]
    agree = sum(r[2] == r[3] for r in inner)
    out.rows.append([len(table.rows), len(inner), agree, agree / len(inner) if inner else float("nan")])
    return out


# -- commons --------------------------------------------------------------------

TOC_COLS = (
    ["q", "sigma", "S_star", "s_c", "s_d", "pi_c", "pi_d", "u_c", "u_d", "grad_c", "grad_d",
     "effort_unit", "happiness_unit", "s_c_numeric", "s_d_numeric", "numeric_rel_err"],
    ["-", "-", "effort", "V/|V'|", "V/|V'|", "V^2/|V'|", "V^2/|V'|", "V^2/|V'|", "V^2/|V'|", "V^2/|V'|",
     "V^2/|V'|", "effort", "payoff", "V/|V'|", "V/|V'|", "-"],
)


def toc_task(cfg: dict, point: int) -> TaskResult:
    n, n_c = cfg["toc.n"], cfg["toc.n_c"]
    qs = np.linspace(cfg["toc.q_low"], cfg["toc.q_high"], cfg["toc.q_points"])
    q = float(qs[point])
    vspec = make_resource(cfg["toc.resource"], cfg["toc.S0"], cfg["toc.alpha"])
    r = toc_two_group(n, n_c, q, vspec, cfg["toc.form"])
    row = [q, r.sigma, r.S_star, r.s_c, r.s_d, r.pi_c, r.pi_d, r.u_c, r.u_d, r.grad_c, r.grad_d,
           r.effort_unit, r.happiness_unit, "", "", ""]
    failures = []
    if cfg["toc.numeric"]:
        eq = toc_numeric_equilibrium(make_complete(n), np.r_[np.full(n_c, q), np.zeros(n - n_c)], vspec)
        closed = r.efforts()
        row[13] = float(eq.profile[:n_c].mean() / r.effort_unit)
        row[14] = float(eq.profile[n_c:].mean() / r.effort_unit)
        row[15] = float(np.max(np.abs(eq.profile - closed)) / np.max(closed))
        if not eq.converged:
            failures.append(f"q={q:.4g}: effort equilibrium did not converge")
    table = Table(*TOC_COLS)
    table.rows.append(row)
    return TaskResult({"toc": table}, failures)


def toc_summary(cfg: dict) -> Table:
    out = Table(["n", "n_c", "form", "q_c"], ["-", "-", "-", "-"])
    try:
        qc = toc_qc(cfg["toc.n"], cfg["toc.n_c"], cfg["toc.form"])
    except NoRetreat:
        qc = float("nan")
    out.rows.append([cfg["toc.n"], cfg["toc.n_c"], cfg["toc.form"], qc])
    return out


# -- scheduling -----------------------------------------------------------------


def plan(cfg: dict) -> list:
    """``(function, cfg, index)`` triples in output order."""
    kind = cfg["experiment.kind"]
    if "sweep.key" in cfg:
        tasks = []
        for v in cfg["sweep.values"]:
            tasks += plan(with_value(cfg, cfg["sweep.key"], v))
        return tasks
    if kind in DYNAMIC_KINDS:
        return [(dynamics_task, cfg, r) for r in range(cfg["experiment.replicates"])]
    if kind == "phase2p":
        return [(phase_task, cfg, r) for r in range(cfg["phase.q1_points"])]
    return [(toc_task, cfg, p) for p in range(cfg["toc.q_points"])]


def _call(task):
    fn, cfg, idx = task
    return fn(cfg, idx)


class WorkerCountError(ValueError):
    """FELIX_THREADS is set to something other than a positive integer."""


def worker_count(n_tasks: int) -> int:
    env = os.environ.get("FELIX_THREADS")
    cap = os.cpu_count() or 1
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise WorkerCountError(f"FELIX_THREADS must be a positive integer, got {env!r}") from None
        if cap < 1:
            raise WorkerCountError(f"FELIX_THREADS must be a positive integer, got {env!r}")
    return max(1, min(cap, n_tasks))


def execute(cfg: dict, workers: int | None = None) -> TaskResult:
    """Run every task and join the fragments in plan order."""
    tasks = plan(cfg)
    workers = worker_count(len(tasks)) if workers is None else workers
    if workers == 1:
        results = [_call(t) for t in tasks]
    else:
        import multiprocessing as mp

        with ProcessPoolExecutor(max_workers=workers, mp_context=mp.get_context("spawn")) as pool:
            results = list(pool.map(_call, tasks, chunksize=max(1, len(tasks) // (4 * workers))))

    sweep_key = cfg.get("sweep.key")
    tables: dict = {}
    failures = []
    for (_, tcfg, _), res in zip(tasks, results):
        failures += res.failures
        for name, frag in res.tables.items():
            if sweep_key is not None:
                frag = Table(["sweep_value", *frag.columns], [sweep_key, *frag.units],
                             [[tcfg[sweep_key], *row] for row in frag.rows])
            if name in tables:
                tables[name].extend(frag)
            else:
                tables[name] = Table(list(frag.columns), list(frag.units), list(frag.rows))

    kind = cfg["experiment.kind"]
    if kind == "phase2p" and cfg["phase.simulate"] and sweep_key is None:
        tables["phase_summary"] = phase_summary(tables["phase"])
    if kind == "toc_sweep" and sweep_key is None:
        tables["toc_summary"] = toc_summary(cfg)
    return TaskResult(tables, failures)
