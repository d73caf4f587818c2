"""Optimizers expressed as oracle-query schedules.

A Schedule's parameter choices are functions of (step index, RNG stream)
only; it sees oracle answers exclusively through the `ask` callback, whose
return values feed the iterate arithmetic but never the parameter choices.
That is what "oblivious" means here, and `audit_oblivious` re-runs a
schedule against a zeroed oracle to confirm the query stream is unchanged.

L-BFGS is the one deliberate exception (declared non-oblivious): its
two-loop direction and exact line search read the answers.

`run` records suboptimality per oracle call (call 0 = initialization), which
is the x-axis the lower-bound envelopes are stated in.  For stochastic
schedules, `expected_error_curve` averages over seeds with a batched fast
path that reproduces the per-seed scalar runs exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .instances import Block2Diag, QuadraticInstance, RlmInstance
from .oracles import (CallLog, DualExactCD, DualGradStep, DualNumericEngine,
                      FirstOrder, NumericEngine, SteepestCD, answer)

OPTIMIZER_NAMES = ("gd", "agd", "hb", "sgd", "sag", "saga", "svrg", "sdca",
                   "sdca_primal", "cd_cyclic", "cd_random", "lbfgs")
DUAL_NAMES = ("sdca",)
DETERMINISTIC_NAMES = ("gd", "agd", "hb", "cd_cyclic", "lbfgs")


@dataclass
class Schedule:
    name: str
    oblivious: bool
    p: int  # tracked points
    params: dict
    _init: object
    _step: object
    stochastic: bool = True

    def init_state(self, engine, rng):
        return self._init(engine, rng, self.params)

    def step(self, state, k, rng, ask, engine):
        """Advance one schedule step; mutates state, returns nothing."""
        self._step(state, k, rng, ask, engine, self.params)


@dataclass
class RunRecord:
    name: str
    seed: int
    errors: np.ndarray  # errors[c] = suboptimality after c oracle calls
    log: CallLog
    wall_clock: float

    @property
    def calls(self) -> int:
        return len(self.errors) - 1


def _full_grad_combine(w, a, b, n, ask):
    """n first-order calls realizing w_new = b*w + a*mean gradient."""
    acc = None
    for j in range(n):
        ans = ask(w, FirstOrder(a / n, b / n, j))
        acc = ans if acc is None else acc + ans
    return acc


def _mean_raw_grad(w, n, ask):
    acc = None
    for j in range(n):
        ans = ask(w, FirstOrder(1.0 / n, 0.0, j))
        acc = ans if acc is None else acc + ans
    return acc


def make_optimizer(name: str, L=None, mu=None, n=1, d=None, step=None,
                   epoch=None, memory=100) -> Schedule:
    """Build a named Schedule.

    Steps default to the standard constants: gd/agd 1/L, hb Polyak's
    4/(sqrt L + sqrt mu)^2, sag 1/(16L), saga 1/(3L), svrg 1/(10L) with
    epoch length 2n, sgd 1/(2L).
    """
    if name not in OPTIMIZER_NAMES:
        raise ValueError(f"unknown optimizer {name!r}")
    if name not in ("sdca", "cd_cyclic", "cd_random") and L is None:
        raise ValueError(f"{name} requires L")
    kappa = (L / mu) if (L is not None and mu is not None) else None
    params = {"L": L, "mu": mu, "n": n, "d": d}

    if name == "gd":
        gamma = step if step is not None else 1.0 / L
        def init(engine, rng, p):
            return {"w": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            state["w"] = _full_grad_combine(state["w"], -gamma, 1.0, engine.n, ask)
        return Schedule(name, True, 1, params, init, stp, stochastic=False)

    if name == "agd":
        if kappa is None:
            raise ValueError("agd requires L and mu")
        gamma = step if step is not None else 1.0 / L
        beta = (math.sqrt(kappa) - 1) / (math.sqrt(kappa) + 1)
        def init(engine, rng, p):
            z = engine.zero()
            return {"w": z, "w_prev": z}
        def stp(state, k, rng, ask, engine, p):
            w, wp = state["w"], state["w_prev"]
            y = w * (1 + beta) - wp * beta
            state["w_prev"] = w
            state["w"] = _full_grad_combine(y, -gamma, 1.0, engine.n, ask)
        return Schedule(name, True, 2, params, init, stp, stochastic=False)

    if name == "hb":
        if kappa is None:
            raise ValueError("hb requires L and mu")
        alpha = step if step is not None else 4.0 / (math.sqrt(L) + math.sqrt(mu)) ** 2
        beta = ((math.sqrt(kappa) - 1) / (math.sqrt(kappa) + 1)) ** 2
        def init(engine, rng, p):
            z = engine.zero()
            return {"w": z, "w_prev": z}
        def stp(state, k, rng, ask, engine, p):
            w, wp = state["w"], state["w_prev"]
            state["w_prev"] = w
            state["w"] = _full_grad_combine(w, -alpha, 1.0 + beta, engine.n, ask) - wp * beta
        return Schedule(name, True, 2, params, init, stp, stochastic=False)

    if name == "sgd":
        gamma = step if step is not None else 1.0 / (2 * L)
        def init(engine, rng, p):
            return {"w": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            j = int(rng.integers(engine.n))
            state["w"] = ask(state["w"], FirstOrder(-gamma, 1.0, j))
        return Schedule(name, True, 1, params, init, stp)

    if name == "sag":
        gamma = step if step is not None else 1.0 / (16 * L)
        def init(engine, rng, p):
            return {"w": engine.zero(),
                    "table": [engine.zero() for _ in range(engine.n)],
                    "gsum": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            j = int(rng.integers(engine.n))
            g = ask(state["w"], FirstOrder(1.0, 0.0, j))
            state["gsum"] = state["gsum"] + g - state["table"][j]
            state["table"][j] = g
            state["w"] = state["w"] - state["gsum"] * (gamma / engine.n)
        return Schedule(name, True, 1, params, init, stp)

    if name == "saga":
        gamma = step if step is not None else 1.0 / (3 * L)
        def init(engine, rng, p):
            return {"w": engine.zero(),
                    "table": [engine.zero() for _ in range(engine.n)],
                    "gsum": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            j = int(rng.integers(engine.n))
            g = ask(state["w"], FirstOrder(1.0, 0.0, j))
            upd = g - state["table"][j] + state["gsum"] * (1.0 / engine.n)
            state["gsum"] = state["gsum"] + g - state["table"][j]
            state["table"][j] = g
            state["w"] = state["w"] - upd * gamma
        return Schedule(name, True, 1, params, init, stp)

    if name == "svrg":
        gamma = step if step is not None else 1.0 / (10 * L)
        def init(engine, rng, p):
            z = engine.zero()
            st = {"w": z, "snapshot": z, "snap_grad": z, "inner": 0,
                  "m": epoch if epoch is not None else 2 * engine.n}
            st["need_snapshot"] = True
            return st
        def stp(state, k, rng, ask, engine, p):
            if state["need_snapshot"]:
                state["snapshot"] = state["w"]
                state["snap_grad"] = _mean_raw_grad(state["snapshot"], engine.n, ask)
                state["inner"] = 0
                state["need_snapshot"] = False
                return
            j = int(rng.integers(engine.n))
            g = ask(state["w"], FirstOrder(1.0, 0.0, j))
            gt = ask(state["snapshot"], FirstOrder(1.0, 0.0, j))
            state["w"] = state["w"] - (g - gt + state["snap_grad"]) * gamma
            state["inner"] += 1
            if state["inner"] >= state["m"]:
                state["need_snapshot"] = True
        return Schedule(name, True, 2, params, init, stp)

    if name == "sdca":
        def init(engine, rng, p):
            return {"w": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            j = int(rng.integers(engine.n))
            state["w"] = ask(state["w"], DualExactCD(j))
        return Schedule(name, True, 1, params, init, stp)

    if name == "sdca_primal":
        # dual-free SDCA: pseudo-dual vectors a_j with w = sum a_j/(mu n)
        if mu is None or L is None:
            raise ValueError("sdca_primal requires L and mu")
        eta = step if step is not None else min(1.0 / (4 * L), 1.0 / (mu * max(n, 1)))
        def init(engine, rng, p):
            return {"w": engine.zero(),
                    "table": [engine.zero() for _ in range(engine.n)]}
        def stp(state, k, rng, ask, engine, p):
            j = int(rng.integers(engine.n))
            g = ask(state["w"], FirstOrder(1.0, 0.0, j))
            v = g + state["table"][j]
            state["table"][j] = state["table"][j] - v * (eta * mu * engine.n)
            state["w"] = state["w"] - v * eta
        return Schedule(name, True, 1, params, init, stp)

    if name in ("cd_cyclic", "cd_random"):
        if d is None:
            raise ValueError(f"{name} requires d")
        cyclic = name == "cd_cyclic"
        def init(engine, rng, p):
            return {"w": engine.zero()}
        def stp(state, k, rng, ask, engine, p):
            if cyclic:
                i = (k // engine.n) % d
                j = k % engine.n
            else:
                i = int(rng.integers(d))
                j = int(rng.integers(engine.n))
            state["w"] = ask(state["w"], SteepestCD(i, j))
        return Schedule(name, True, 1, params, init, stp, stochastic=not cyclic)

    if name == "lbfgs":
        def init(engine, rng, p):
            return {"w": engine.zero(), "g": None, "S": [], "Y": []}
        def stp(state, k, rng, ask, engine, p):
            w = state["w"]
            if state["g"] is None:
                state["g"] = _mean_raw_grad(w, engine.n, ask)
                return
            g = state["g"]
            q = g.copy()
            alphas = []
            for s, y in zip(reversed(state["S"]), reversed(state["Y"])):
                a = float(s @ q) / float(s @ y)
                alphas.append(a)
                q = q - a * y
            if state["S"]:
                s, y = state["S"][-1], state["Y"][-1]
                q = q * (float(s @ y) / float(y @ y))
            for (s, y), a in zip(zip(state["S"], state["Y"]), reversed(alphas)):
                b = float(y @ q) / float(s @ y)
                q = q + (a - b) * s
            pdir = -q
            gp = _mean_raw_grad(w + pdir, engine.n, ask)
            qd = gp - g  # = (mean Hessian) @ pdir, exact for quadratics
            curv = float(pdir @ qd)
            if curv <= 0:
                return
            t = -float(g @ pdir) / curv
            state["w"] = w + t * pdir
            state["g"] = g + t * qd
            state["S"].append(t * pdir)
            state["Y"].append(t * qd)
            if len(state["S"]) > memory:
                state["S"].pop(0)
                state["Y"].pop(0)
        return Schedule(name, False, 1, {**params, "memory": memory}, init, stp,
                        stochastic=False)

    raise AssertionError("unreachable")


def _make_engine(instance):
    if isinstance(instance, RlmInstance):
        return DualNumericEngine(instance)
    return NumericEngine(instance)


def _suboptimality(instance, w) -> float:
    return instance.suboptimality(w)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based stream: independent across (run, seed) pairs."""
    return np.random.Generator(np.random.Philox(key=seed))


def run(schedule: Schedule, instance, iterations: int, seed: int = 0,
        record_queries: bool = False) -> RunRecord:
    """Execute `iterations` oracle calls and record suboptimality per call.

    Multi-call steps (full gradients, snapshots) update the tracked point
    only when the step completes; intermediate call indices repeat the
    previous error.
    """
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    if isinstance(instance, RlmInstance) != (schedule.name in DUAL_NAMES):
        raise ValueError(f"{schedule.name} is incompatible with this instance's oracle family")
    engine = _make_engine(instance)
    log = CallLog()
    log.record_queries = record_queries
    rng = make_rng(seed)

    def ask(point, query):
        return answer(engine, point, query, log)

    t0 = time.perf_counter()
    state = schedule.init_state(engine, rng)
    errors = np.empty(iterations + 1)
    err = _suboptimality(instance, state["w"])
    errors[0] = err
    filled = 0
    k = 0
    stalls = 0
    while filled < iterations:
        before = log.total
        schedule.step(state, k, rng, ask, engine)
        k += 1
        after = log.total
        if after == before:
            # e.g. L-BFGS at an exact stationary point; flat-fill and stop
            stalls += 1
            if stalls > 50:
                errors[filled + 1:] = err
                filled = iterations
            continue
        stalls = 0
        new_err = _suboptimality(instance, state["w"])
        hi = min(after, iterations)
        errors[filled + 1:hi] = err  # point unchanged until the step completed
        if hi > filled:
            errors[hi] = new_err if after <= iterations else err
        err = new_err
        filled = hi
    return RunRecord(schedule.name, seed, errors, log, time.perf_counter() - t0)


def audit_oblivious(schedule: Schedule, instance, iterations: int, seed: int = 0) -> bool:
    """Re-run with a zeroed oracle and compare query streams.

    An oblivious schedule emits the same queries whatever the answers are;
    a schedule whose parameters read the answers will diverge (or fail).
    """
    real = run(schedule, instance, iterations, seed, record_queries=True)
    engine = _make_engine(instance)
    log = CallLog()
    log.record_queries = True
    rng = make_rng(seed)

    def spoofed(point, query):
        answer(engine, point, query, CallLog())  # keep shapes honest
        log.note(query, getattr(query, "j", 0))
        return engine.zero()

    try:
        state = schedule.init_state(engine, rng)
        k = 0
        stalls = 0
        while log.total < iterations and stalls <= 50:
            before = log.total
            schedule.step(state, k, rng, spoofed, engine)
            stalls = stalls + 1 if log.total == before else 0
            k += 1
    except Exception:
        return False
    return log.queries[:iterations] == real.log.queries[:iterations]


# ---------------------------------------------------------------------------
# Batched Monte-Carlo execution (matches the scalar path seed for seed)


def _draws_per_step(name: str):
    # svrg draws one component index per inner step (none at snapshots);
    # generating `iterations` draws up front over-provisions harmlessly
    if name in ("sag", "saga", "sgd", "sdca", "sdca_primal", "svrg"):
        return ("n",)
    if name == "cd_random":
        return ("d", "n")
    return ()


class _BatchedFsm:
    """Vectorized component gradients over a seed batch for QuadraticInstance."""

    def __init__(self, instance: QuadraticInstance):
        self.inst = instance
        comps = instance.components
        if all(isinstance(Q, Block2Diag) for Q, _ in comps):
            self.kind = "block"
            self.h = comps[0][0].h
            self.tail = comps[0][0].tail
            self.e = np.array([Q.e for Q, _ in comps])
            self.q = comps[0][1]
        else:
            self.kind = "dense"
            self.Qs = np.stack([Q.dense() for Q, _ in comps])
            self.qs = np.stack([q for _, q in comps])
        self.A = instance.mean_matrix()
        self.qbar = instance.mean_q()

    def comp_grad(self, jv: np.ndarray, W: np.ndarray) -> np.ndarray:
        if self.kind == "block":
            out = self.tail * W
            e = self.e[jv]
            out[:, 0] = self.h * W[:, 0] + e * W[:, 1]
            out[:, 1] = e * W[:, 0] + self.h * W[:, 1]
            return out - self.q
        return np.einsum("sij,sj->si", self.Qs[jv], W) - self.qs[jv]

    def values(self, W: np.ndarray) -> np.ndarray:
        return 0.5 * np.einsum("si,ij,sj->s", W, self.A, W) - W @ self.qbar


def _batched_quadratic(name: str, schedule: Schedule, instance: QuadraticInstance,
                       iterations: int, seeds: int) -> np.ndarray:
    """Per-call suboptimality curves, shape (seeds, iterations+1)."""
    p = schedule.params
    n, d = instance.n, instance.d
    L, mu = p["L"], p["mu"]
    bf = _BatchedFsm(instance)
    idx = _index_streams(name, n, d, iterations, seeds)
    W = np.zeros((seeds, d))
    errs = np.empty((seeds, iterations + 1))
    opt = instance.optimal_value
    errs[:, 0] = bf.values(W) - opt
    srange = np.arange(seeds)

    if name == "sag":
        gamma = 1.0 / (16 * L)
        table = np.zeros((seeds, n, d))
        gsum = np.zeros((seeds, d))
        for c in range(iterations):
            jv = idx[0][:, c]
            g = bf.comp_grad(jv, W)
            gsum += g - table[srange, jv]
            table[srange, jv] = g
            W = W - (gamma / n) * gsum
            errs[:, c + 1] = bf.values(W) - opt
    elif name == "saga":
        gamma = 1.0 / (3 * L)
        table = np.zeros((seeds, n, d))
        gsum = np.zeros((seeds, d))
        for c in range(iterations):
            jv = idx[0][:, c]
            g = bf.comp_grad(jv, W)
            old = table[srange, jv]
            W = W - gamma * (g - old + gsum / n)
            gsum += g - old
            table[srange, jv] = g
            errs[:, c + 1] = bf.values(W) - opt
    elif name == "sgd":
        gamma = 1.0 / (2 * L)
        for c in range(iterations):
            g = bf.comp_grad(idx[0][:, c], W)
            W = W - gamma * g
            errs[:, c + 1] = bf.values(W) - opt
    elif name == "sdca_primal":
        eta = min(1.0 / (4 * L), 1.0 / (mu * max(n, 1)))
        table = np.zeros((seeds, n, d))
        for c in range(iterations):
            jv = idx[0][:, c]
            g = bf.comp_grad(jv, W)
            v = g + table[srange, jv]
            table[srange, jv] -= eta * mu * n * v
            W = W - eta * v
            errs[:, c + 1] = bf.values(W) - opt
    elif name == "svrg":
        gamma = 1.0 / (10 * L)
        m = 2 * n
        # epoch pattern: 1 snapshot step (n calls), then m inner steps (2 calls each)
        snap = np.zeros((seeds, d))
        snap_grad = np.zeros((seeds, d))
        jdraw = idx[0]
        draw_ptr = 0
        c = 0
        prev = errs[:, 0].copy()
        while c < iterations:
            # snapshot
            snap = W.copy()
            snap_grad = (snap @ bf.A.T) - bf.qbar
            hi = min(c + n, iterations)
            errs[:, c + 1:hi + 1] = prev[:, None]
            c = hi
            if c >= iterations:
                break
            for _ in range(m):
                jv = jdraw[:, draw_ptr]
                draw_ptr += 1
                g = bf.comp_grad(jv, W)
                gt = bf.comp_grad(jv, snap)
                W = W - gamma * (g - gt + snap_grad)
                cur = bf.values(W) - opt
                hi = min(c + 2, iterations)
                if hi - c == 2:
                    errs[:, c + 1] = prev
                    errs[:, c + 2] = cur
                    prev = cur
                else:  # run out of call budget mid-step: point not yet updated
                    errs[:, c + 1] = prev
                c = hi
                if c >= iterations:
                    break
    elif name == "cd_random":
        for c in range(iterations):
            iv, jv = idx[0][:, c], idx[1][:, c]
            g = bf.comp_grad(jv, W)
            diag = np.where(iv < 2, bf.h, bf.tail) if bf.kind == "block" else \
                np.array([bf.Qs[j, i, i] for i, j in zip(iv, jv)])
            W = W.copy()
            W[srange, iv] -= g[srange, iv] / diag
            errs[:, c + 1] = bf.values(W) - opt
    else:
        raise ValueError(f"no batched path for {name}")
    return errs


def _index_streams(name: str, n: int, d: int, iterations: int, seeds: int):
    """Replays each seed's scalar RNG consumption pattern up front."""
    spec = _draws_per_step(name)
    ndraws = iterations  # at most one index tuple consumed per call
    streams = [np.empty((seeds, ndraws), dtype=np.int64) for _ in spec]
    for s in range(seeds):
        rng = make_rng(s)
        if len(spec) == 1:
            hi = n if spec[0] == "n" else d
            streams[0][s] = rng.integers(hi, size=ndraws)
        else:
            # interleaved draws with different bounds must replay one by one
            for c in range(ndraws):
                for t, kind in enumerate(spec):
                    hi = n if kind == "n" else d
                    streams[t][s, c] = rng.integers(hi)
    return streams


def _batched_rlm(schedule: Schedule, instance: RlmInstance, iterations: int,
                 seeds: int) -> np.ndarray:
    n = instance.n
    diag, off = instance.blocks
    diag_full = np.repeat(diag, 2)
    idx = _index_streams("sdca", n, n, iterations, seeds)[0]
    A = np.zeros((seeds, n))
    errs = np.empty((seeds, iterations + 1))
    opt = instance.optimal_value()
    srange = np.arange(seeds)

    def values(Al):
        G = instance.q_matvec(Al)
        return 0.5 * np.einsum("si,si->s", Al, G) - Al.sum(axis=1) / n

    errs[:, 0] = values(A) - opt
    for c in range(iterations):
        jv = idx[:, c]
        pair = jv // 2
        other = 2 * pair + 1 - (jv % 2)
        gj = diag_full[jv] * A[srange, jv] + off[pair] * A[srange, other] - 1.0 / n
        A = A.copy()
        A[srange, jv] -= gj / diag_full[jv]
        errs[:, c + 1] = values(A) - opt
    return errs


def batched_curves(schedule: Schedule, instance, iterations: int, seeds: int) -> np.ndarray:
    """(seeds, iterations+1) suboptimality curves, equal to per-seed `run`s."""
    if isinstance(instance, RlmInstance):
        if schedule.name != "sdca":
            raise ValueError("only sdca runs on the dual family")
        return _batched_rlm(schedule, instance, iterations, seeds)
    return _batched_quadratic(schedule.name, schedule, instance, iterations, seeds)


@dataclass
class WorstCaseCurve:
    name: str
    k: np.ndarray
    worst_mean: np.ndarray
    stderr: np.ndarray
    worst_param: np.ndarray
    seeds: int

    def lower_confidence(self, nsigma: float = 3.0) -> np.ndarray:
        return self.worst_mean - nsigma * self.stderr


def expected_error_curve(schedule: Schedule, instance_factory, grid, iterations: int,
                         seeds: int = 100) -> WorstCaseCurve:
    """Monte-Carlo mean suboptimality per oracle call for each grid parameter,
    then the max over the grid per call index.

    instance_factory maps a grid parameter to an instance.  Deterministic
    schedules collapse to a single seed.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty parameter grid")
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    eff_seeds = 1 if not schedule.stochastic else seeds
    means = np.empty((len(grid), iterations + 1))
    errs = np.empty((len(grid), iterations + 1))
    for gi, param in enumerate(grid):
        inst = instance_factory(param)
        if not schedule.stochastic:
            curves = run(schedule, inst, iterations, seed=0).errors[None, :]
        else:
            curves = batched_curves(schedule, inst, iterations, eff_seeds)
        means[gi] = curves.mean(axis=0)
        errs[gi] = curves.std(axis=0, ddof=1) / math.sqrt(eff_seeds) if eff_seeds > 1 else 0.0
    worst_idx = np.argmax(means, axis=0)
    cols = np.arange(iterations + 1)
    return WorstCaseCurve(
        name=schedule.name,
        k=cols,
        worst_mean=means[worst_idx, cols],
        stderr=errs[worst_idx, cols],
        worst_param=np.asarray(grid, dtype=object)[worst_idx],
        seeds=eff_seeds,
    )
