"""Experiment configuration, CSV/SVG emission, and the command bodies behind
the CLI subcommands.

Conventions: CSV is the canonical artifact and always begins with a comment
line carrying the config hash; SVG plots are a dependency-free convenience.
Exit codes: 0 all checks pass, 2 envelope violation, 3 config error.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import bestapprox, bounds, instances, optimizers, polynomials, trace

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    family: str = "fsm"
    optimizers: tuple = ("sag", "saga", "svrg", "sdca_primal", "cd_random")
    L: float = 100.0
    mu: float = 1.0
    n: int = 8
    d: int = 4
    R: float = 1.0
    lam: float = 0.01
    grid_points: int = 33
    iterations: int = 200
    seeds: int = 100
    outdir: str = "out"
    approx_grid: int = 4097
    lbfgs_memory: int = 100
    envelope_prefactor: str = "appendix"  # (mu/2)(nRmu/(sqrt2(L-mu)))^2

    @property
    def kappa(self) -> float:
        return self.L / self.mu

    def hash(self) -> str:
        text = ",".join(f"{k}={v}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def load_config(path=None, **overrides) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        for section in parser.sections():
            for key, val in parser.items(section):
                _apply(cfg, key, val, where=f"{path}[{section}]")
    for key, val in overrides.items():
        if val is not None:
            _apply(cfg, key, val, where="command line")
    return cfg


def _apply(cfg, key, val, where=""):
    if not hasattr(cfg, key):
        raise ConfigError(f"unknown config key {key!r} ({where})")
    cur = getattr(cfg, key)
    try:
        if isinstance(cur, tuple):
            val = tuple(v.strip() for v in str(val).split(",")) if isinstance(val, str) else tuple(val)
        elif isinstance(cur, bool):
            val = str(val).lower() in ("1", "true", "yes")
        elif isinstance(cur, int):
            val = int(val)
        elif isinstance(cur, float):
            val = float(val)
    except ValueError as e:
        raise ConfigError(f"bad value for {key!r}: {val!r} ({where})") from e
    setattr(cfg, key, val)


def worker_count() -> int:
    env = os.environ.get("LBLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LBLAB_THREADS must be an integer, got {env!r}")
    return min(8, os.cpu_count() or 1)


def write_csv(path, header_cols, rows, cfg_hash, units=""):
    buf = io.StringIO()
    buf.write(f"# config_hash={cfg_hash} units={units}\n")
    buf.write(",".join(header_cols) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    data = buf.getvalue()
    if path is not None:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(data)
    return data


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_svg(path, curves, title="", logy=True, width=640, height=420):
    """Minimal polyline plot; curves is {label: (x, y)}."""
    pad = 50
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in curves.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in curves.values()])
    if logy:
        ys = ys[ys > 0]
    ymin, ymax = float(ys.min()), float(ys.max())
    xmin, xmax = float(xs.min()), float(xs.max())
    if logy:
        ymin, ymax = math.log10(ymin), math.log10(ymax)
    span_x = (xmax - xmin) or 1.0
    span_y = (ymax - ymin) or 1.0
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{width//2}" y="20" text-anchor="middle">{title}</text>',
             f'<rect x="{pad}" y="{pad}" width="{width-2*pad}" height="{height-2*pad}" '
             'fill="none" stroke="#000"/>']
    for ci, (label, (x, y)) in enumerate(sorted(curves.items())):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if logy:
            keep = y > 0
            x, y = x[keep], np.log10(y[keep])
        px = pad + (x - xmin) / span_x * (width - 2 * pad)
        py = height - pad - (y - ymin) / span_y * (height - 2 * pad)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        col = colors[ci % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{col}" points="{pts}"/>')
        parts.append(f'<text x="{width-pad+4}" y="{pad+16*ci+12}" fill="{col}" '
                     f'font-size="11">{label}</text>')
    parts.append("</svg>")
    data = "\n".join(parts)
    if path is not None:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(data)
    return data


# ---------------------------------------------------------------------------
# command bodies


def bounds_table(formula: str, cfg: ExperimentConfig, kmax: int):
    rows = []
    for k in range(kmax + 1):
        if formula == "chebyshev_inf":
            v = bounds.chebyshev_lb_inf(2.0, k)
        elif formula == "maxnorm":
            v = bounds.maxnorm_lb(cfg.mu, cfg.L, 0.0, k)
        elif formula == "l1":
            v = bounds.l1_lb(cfg.L, cfg.mu, (cfg.L + cfg.mu) / 2, k)
        elif formula == "l2":
            v = bounds.l2_weighted_lb(-0.5, k)
        elif formula == "fsm_envelope":
            v = bounds.fsm_rate_envelope(cfg.kappa, cfg.n, k, envelope_prefactor(cfg))
        else:
            raise ConfigError(f"unknown formula {formula!r}")
        rows.append([k, float(v)])
    return rows


def envelope_prefactor(cfg: ExperimentConfig) -> float:
    return (cfg.mu / 2) * (cfg.n * cfg.R * cfg.mu / (math.sqrt(2) * (cfg.L - cfg.mu))) ** 2


def approx_check_rows(kmax: int = 8, grid: int = 4097):
    """norm,k,analytic_lb,bruteforce,ratio rows for the three norms."""
    rows = []
    mu, L = 1.0, 4.0
    c = (L + mu) / 2
    half = (L - mu) / 2
    for k in range(kmax + 1):
        lb = bounds.maxnorm_lb(mu, L, 0.0, k)
        bf, _ = bestapprox.best_uniform(lambda e: 1.0 / e, (mu, L), k, grid)
        rows.append(["inf", k, lb, bf, bf / lb])
    for k in range(kmax + 1):
        lb = bounds.l1_lb(L, mu, c, k)
        bf, _ = bestapprox.best_l1(lambda e: 1.0 / (e + c), (-half, half), k - 1,
                                   max(grid, 8193))
        rows.append(["l1", k, lb, bf, bf / lb])
    for alpha in (-0.9, -0.5, -0.1):
        for k in range(kmax + 1):
            lb = bounds.l2_weighted_lb(alpha, k)
            bf, _ = bestapprox.best_weighted_l2(alpha, k)
            rows.append([f"l2[{alpha}]", k, lb, bf, bf / lb])
    return rows


def fsm_scalar_grid(cfg: ExperimentConfig) -> np.ndarray:
    half = (cfg.L - cfg.mu) / 2
    return np.linspace(-half, half, cfg.grid_points)


def envelope_curves(cfg: ExperimentConfig):
    """Worst-case Monte-Carlo curves and the analytic envelope per optimizer."""
    if cfg.family == "fsm":
        grid = fsm_scalar_grid(cfg)
        def factory(eta):
            return instances.fsm_instance(np.full(cfg.n, eta), cfg.L, cfg.mu, cfg.R, cfg.d)
        env = bounds.fsm_rate_envelope(cfg.kappa, cfg.n, np.arange(cfg.iterations + 1),
                                       envelope_prefactor(cfg))
    elif cfg.family == "rlm":
        grid = np.linspace(-math.pi / 2, math.pi / 2, cfg.grid_points)
        def factory(psi):
            return instances.rlm_instance(np.full(cfg.n // 2, psi), cfg.lam, cfg.n)
        ratio = (math.sqrt(2 / (cfg.lam * cfg.n) + 1) - 1) / (math.sqrt(2 / (cfg.lam * cfg.n) + 1) + 1)
        env = 0.5 * (cfg.n * cfg.lam / 2) ** 2 * ratio ** (2 * np.arange(cfg.iterations + 1) / cfg.n)
    else:
        raise ConfigError(f"no envelope family {cfg.family!r}")

    def one(name):
        sched = optimizers.make_optimizer(name, L=cfg.L, mu=cfg.mu, n=cfg.n, d=cfg.d)
        return name, optimizers.expected_error_curve(sched, factory, grid,
                                                     cfg.iterations, cfg.seeds)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = dict(pool.map(one, cfg.optimizers))
    return results, env


def cmd_envelope(cfg: ExperimentConfig, out=None):
    """Returns (exit_code, csv_text).  Violation = (mean - 3 stderr) < envelope."""
    results, env = envelope_curves(cfg)
    rows = []
    violated = False
    for name in sorted(results):
        curve = results[name]
        lo = curve.lower_confidence(3.0)
        for k in range(cfg.iterations + 1):
            margin = lo[k] - env[k]
            if margin < 0:
                violated = True
            rows.append([name, k, curve.worst_mean[k], float(env[k]), float(margin)])
    csv = write_csv(out, ["optimizer", "k", "empirical_worst", "envelope", "margin"],
                    rows, cfg.hash(), units="suboptimality per oracle call")
    return (EXIT_VIOLATION if violated else EXIT_OK), csv


def fig1_curves(cfg: ExperimentConfig):
    inst = instances.nesterov_chain(cfg.d, cfg.L, cfg.mu)
    names = ("gd", "agd", "hb", "lbfgs")
    out = {}
    for name in names:
        sched = optimizers.make_optimizer(name, L=cfg.L, mu=cfg.mu, n=1,
                                          memory=cfg.lbfgs_memory)
        calls = cfg.iterations if name != "lbfgs" else 2 * cfg.iterations + 1
        rec = optimizers.run(sched, inst, calls, seed=0)
        if name == "lbfgs":
            # one init call + two mean-gradient evaluations per iteration
            errs = rec.errors[1::2]
            errs = np.concatenate([[rec.errors[0]], errs])[: cfg.iterations + 1]
        else:
            errs = rec.errors
        out[name] = errs
    return out


def log_slope_fit(errs: np.ndarray, lo: int, hi: int, floor_rel: float = 1e-13):
    """Least-squares slope of ln(err) on iterations [lo, hi], truncated where
    the error has hit the numerical floor relative to err[0].

    Returns (slope, r_squared, actual_hi)."""
    floor = errs[0] * floor_rel
    usable = np.where(errs > floor)[0]
    hi = min(hi, usable.max()) if usable.size else lo
    ks = np.arange(lo, hi + 1)
    if len(ks) < 3:
        return 0.0, 0.0, hi
    ys = np.log(errs[lo:hi + 1])
    A = np.vstack([ks, np.ones_like(ks)]).T
    coef, res, *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2, hi


def cmd_fig1(cfg: ExperimentConfig, out_csv=None, out_svg=None):
    curves = fig1_curves(cfg)
    ks = np.arange(cfg.iterations + 1)
    rows = [[int(k)] + [float(curves[n][k]) for n in ("gd", "agd", "hb", "lbfgs")]
            for k in ks]
    csv = write_csv(out_csv, ["k", "gd", "agd", "hb", "lbfgs"], rows, cfg.hash(),
                    units="suboptimality per iteration")
    if out_svg is not None:
        write_svg(out_svg, {n: (ks, v) for n, v in curves.items()},
                  title=f"chain quadratic d={cfg.d} kappa={cfg.kappa:g}")
    return csv


def cmd_fig2(cfg: ExperimentConfig, out_csv=None, out_svg=None):
    header, rows = trace.fig2_data(cfg.L, cfg.mu)
    csv = write_csv(out_csv, header, rows, cfg.hash(), units="iterate value")
    if out_svg is not None:
        etas = [r[0] for r in rows]
        curves = {name: (etas, [abs(r[i] - r[-1]) for r in rows])
                  for i, name in enumerate(header[1:-1], start=1)}
        write_svg(out_svg, curves, title="iterate error vs target", logy=False)
    return csv


def cmd_run(cfg: ExperimentConfig, opt: str, out=None):
    if cfg.family == "fsm":
        grid = fsm_scalar_grid(cfg)
        def factory(eta):
            return instances.fsm_instance(np.full(cfg.n, eta), cfg.L, cfg.mu, cfg.R, cfg.d)
    elif cfg.family == "toy":
        grid = np.linspace(cfg.mu, cfg.L, cfg.grid_points)
        def factory(eta):
            return instances.toy_instance(eta, cfg.mu, cfg.L)
    elif cfg.family == "rlm":
        grid = np.linspace(-math.pi / 2, math.pi / 2, cfg.grid_points)
        def factory(psi):
            return instances.rlm_instance(np.full(cfg.n // 2, psi), cfg.lam, cfg.n)
    else:
        raise ConfigError(f"cmd_run does not support family {cfg.family!r}")
    sched = optimizers.make_optimizer(opt, L=cfg.L, mu=cfg.mu, n=cfg.n, d=cfg.d)
    curve = optimizers.expected_error_curve(sched, factory, grid, cfg.iterations, cfg.seeds)
    rows = [[int(k), float(curve.worst_mean[k]), float(curve.stderr[k]),
             float(curve.worst_param[k])] for k in curve.k]
    return write_csv(out, ["k", "err_mean", "err_stderr", "worst_eta"], rows,
                     cfg.hash(), units="suboptimality per oracle call")


def cmd_trace(cfg: ExperimentConfig, opt: str, k: int, seed: int = 0, out=None):
    sched = optimizers.make_optimizer(opt, L=cfg.L, mu=cfg.mu, n=cfg.n, d=cfg.d)
    fam = cfg.family
    kwargs = dict(n=cfg.n, d=cfg.d, L=cfg.L, mu=cfg.mu, R=cfg.R, lam=cfg.lam)
    if fam == "toy":
        kwargs.update(n=1, d=1)
    vec = trace.trace_oblivious(sched, fam, k, seed=seed, **kwargs)
    lines = [polynomials.poly_to_json(e) for e in vec.entries]
    text = "\n".join(lines) + "\n"
    if out is not None:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text)
    return text


def cmd_sampling_compare(cfg: ExperimentConfig, out=None):
    """With- vs without-replacement component sampling for SAG on the fsm
    family; reported, not asserted."""
    eta = (cfg.L - cfg.mu) / 2
    inst = instances.fsm_instance(np.full(cfg.n, -eta), cfg.L, cfg.mu, cfg.R, cfg.d)
    sched = optimizers.make_optimizer("sag", L=cfg.L, mu=cfg.mu, n=cfg.n, d=cfg.d)
    with_rep = optimizers.batched_curves(sched, inst, cfg.iterations, cfg.seeds).mean(axis=0)
    without = _sag_without_replacement(inst, cfg).mean(axis=0)
    rows = [[k, float(with_rep[k]), float(without[k])] for k in range(cfg.iterations + 1)]
    return write_csv(out, ["k", "with_replacement", "without_replacement"], rows,
                     cfg.hash(), units="suboptimality per oracle call")


def _sag_without_replacement(inst, cfg):
    n, d = inst.n, inst.d
    gamma = 1.0 / (16 * cfg.L)
    bf = optimizers._BatchedFsm(inst)
    errs = np.empty((cfg.seeds, cfg.iterations + 1))
    perms = np.empty((cfg.seeds, cfg.iterations), dtype=np.int64)
    for s in range(cfg.seeds):
        rng = optimizers.make_rng(s)
        order = []
        while len(order) < cfg.iterations:
            order.extend(rng.permutation(n))
        perms[s] = order[: cfg.iterations]
    W = np.zeros((cfg.seeds, d))
    table = np.zeros((cfg.seeds, n, d))
    gsum = np.zeros((cfg.seeds, d))
    srange = np.arange(cfg.seeds)
    errs[:, 0] = bf.values(W) - inst.optimal_value
    for c in range(cfg.iterations):
        jv = perms[:, c]
        g = bf.comp_grad(jv, W)
        gsum += g - table[srange, jv]
        table[srange, jv] = g
        W = W - (gamma / n) * gsum
        errs[:, c + 1] = bf.values(W) - inst.optimal_value
    return errs


# ---------------------------------------------------------------------------
# verify-all


def verify_all(corrupt=None, quick=True):
    """Run the cross-module invariant suite; returns a list of
    (module, check name, ok, detail) plus per-module counts.

    `corrupt` deliberately perturbs one formula so the suite's sensitivity
    can be exercised ("maxnorm_prefactor" inflates the uniform-norm bound)."""
    import time as _time
    checks = []

    def add(module, name, fn):
        t0 = _time.perf_counter()
        try:
            fn()
            ok, detail = True, ""
        except Exception as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        checks.append((module, name, ok, detail, _time.perf_counter() - t0))

    def ring_axioms():
        rng = np.random.default_rng(0)
        from fractions import Fraction
        for _ in range(10):
            ps = [polynomials.MultiPoly(2, {tuple(rng.integers(0, 3, 2)): Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
                                            for _ in range(3)}) for _ in range(3)]
            a, b, c = ps
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def cheb_matches_sine():
        for k in range(13):
            p = polynomials.chebyshev_U(k)
            for eta in np.linspace(-0.99, 0.99, 50):
                ref = math.sin((k + 1) * math.acos(eta)) / math.sqrt(1 - eta * eta)
                assert abs(float(p(eta)) - ref) <= 1e-10

    def sgn_orthogonality():
        for k in range(1, 11):
            for j in range(k):
                assert abs(polynomials.sgn_chebyshev_moment(j, k)) <= 1e-10

    def identities():
        for u in (1.1, 1.25, 2.0, 10.0, 1e6):
            rep = bounds.identity_checks(u, ks=(1, 2, 3))
            assert rep["algebraic"] <= 1e-12
        for u in (1.5, 2.0, 5.0):
            rep = bounds.identity_checks(u, ks=(1, 2, 3, 4, 5, 6))
            assert max(rep["sgn_integral"].values()) <= 1e-6

    def inf_sandwich():
        kmax = 4 if quick else 8
        for k in range(kmax + 1):
            lb = bounds.maxnorm_lb(1.0, 4.0, 0.0, k)
            if corrupt == "maxnorm_prefactor":
                lb *= 1.5
            bf, _ = bestapprox.best_uniform(lambda e: 1.0 / e, (1.0, 4.0), k, 2049)
            assert bf >= lb * (1 - 1e-9), f"k={k}: brute force {bf} < bound {lb}"

    def l2_exact_matches():
        for alpha in (-0.9, -0.5, -0.1):
            for k in range(9):
                closed = bounds.l2_weighted_exact(alpha, k)
                solved, _ = bestapprox.best_weighted_l2(alpha, k)
                assert abs(closed - solved) <= 1e-9 * max(1.0, closed)

    def spectral_sandwich():
        for eta in np.linspace(-49.5, 49.5, 7):
            inst = instances.fsm_instance(np.full(4, eta), 100.0, 1.0, 1.0, 4)
            for Q, _ in inst.components:
                ev = Q.eigvals()
                assert ev[0] >= 1.0 - 1e-9 and ev[-1] <= 100.0 + 1e-9

    def minimizer_formulas():
        rng = np.random.default_rng(1)
        for _ in range(20):
            etas = rng.uniform(-49.5, 49.5, 4)
            inst = instances.fsm_instance(etas, 100.0, 1.0, 1.0, 4)
            closed = instances.fsm_minimizer(etas, 100.0, 1.0, 1.0, 4)
            assert np.linalg.norm(inst.minimizer - closed) <= 1e-8
        sep = instances.fsm_minimizer_separation(8, 100.0, 1.0)
        assert sep >= 0.2

    def degree_lemma():
        for name in ("gd", "sgd", "cd_cyclic"):
            sched = optimizers.make_optimizer(name, L=100.0, mu=1.0, n=3, d=4)
            trace.trace_oblivious(sched, "fsm", 8, seed=0, n=3, d=4,
                                  L=100.0, mu=1.0, R=1.0)

    def gd_guarantee():
        mu, L = 1.0, 4.0
        kappa = L / mu
        for eta in np.linspace(mu, L, 9):
            w = 0.0
            for k in range(1, 51):
                w = (1 - eta / L) * w + 1 / L
                assert abs(w - 1 / eta) <= (1 - 2 / (1 + kappa)) ** (k / 2) / eta + 1e-12

    add("polynomials", "ring axioms", ring_axioms)
    add("polynomials", "chebyshev recurrence vs sine form", cheb_matches_sine)
    add("polynomials", "sgn(U_k) orthogonality", sgn_orthogonality)
    add("bounds", "technical identities", identities)
    add("bounds+bestapprox", "uniform-norm sandwich", inf_sandwich)
    add("bounds+bestapprox", "weighted-L2 closed form", l2_exact_matches)
    add("instances", "per-component spectral sandwich", spectral_sandwich)
    add("instances", "minimizer formulas and separation", minimizer_formulas)
    add("trace", "degree budget", degree_lemma)
    add("optimizers", "scalar GD guarantee", gd_guarantee)
    return checks


def verify_report(checks) -> str:
    lines = []
    counts = {}
    for module, name, ok, detail, secs in checks:
        counts.setdefault(module, [0, 0])
        counts[module][0 if ok else 1] += 1
        status = "PASS" if ok else "FAIL"
        lines.append(f"{status}  {module:22s} {name:38s} {secs:6.2f}s  {detail}")
    lines.append("")
    for module in sorted(counts):
        p, f = counts[module]
        lines.append(f"{module}: {p} passed, {f} failed")
    return "\n".join(lines) + "\n"
