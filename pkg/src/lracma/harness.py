"""Trial execution and aggregate metrics (success rate, SP1, ECDF, sweeps).

A trial is fully determined by (master seed, trial index): sampling, noise,
and rotation randomness come from separate child streams of one seed
sequence, so noiseless metric replay and parallel execution cannot perturb
the optimizer's draws.
"""

import csv
import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cma, lra, objectives
from .errors import InvalidConfig, LracmaError

SIGMA_UNDERFLOW = 1e-300
# The search distribution is numerically a point once its standard deviation
# drops below double-precision resolution relative to the mean: no further
# representable progress of m is possible.  Treated as the same breakdown as
# a step-size underflow.
POINT_MASS_REL = 1e-16

_STREAM_SAMPLING = 0
_STREAM_NOISE = 1
_STREAM_ROTATION = 2


@dataclass(frozen=True)
class RunConfig:
    objective: str
    dim: int
    noise_variance: float = 0.0
    algorithm: str = "lra"  # "lra" | "fixed"
    eta_m: float = 1.0  # fixed-eta factors, ignored for "lra"
    eta_sigma: float = 1.0
    lam: int = None  # population size; None -> 4 + floor(3 ln d)
    alpha: float = 1.4
    beta_m: float = 0.1
    beta_sigma: float = 0.03
    gamma: float = 0.1
    budget: int = None  # None -> 1e7 noiseless / 1e8 noisy
    target: float = 1e-8
    seed: int = 1
    trials: int = None  # None -> 30 noiseless / 20 noisy
    history_stride: int = 10
    rotated: bool = False
    n_targets: int = 30  # ECDF target grid size

    def resolved(self):
        """Fill in the noise-dependent defaults."""
        noisy = self.noise_variance > 0.0
        updates = {}
        if self.budget is None:
            updates["budget"] = int(1e8) if noisy else int(1e7)
        if self.trials is None:
            updates["trials"] = 20 if noisy else 30
        if self.algorithm not in ("lra", "fixed"):
            raise InvalidConfig(f"unknown algorithm {self.algorithm!r}")
        return dataclasses.replace(self, **updates) if updates else self


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    success: bool
    evaluations_to_target: int  # None when the target was never reached
    termination: str  # "target" | "budget" | "numerical"
    f_m_final: float
    history: list
    first_hits: np.ndarray  # per-ECDF-target first-hit eval counts, -1 = never


def _rng(seed, trial_index, stream):
    ss = np.random.SeedSequence(seed, spawn_key=(trial_index, stream))
    return np.random.Generator(np.random.PCG64(ss))


def run_trial(cfg, trial_index):
    """Run one trial to target, budget exhaustion, or numerical breakdown."""
    cfg = cfg.resolved()
    d = cfg.dim
    sampling_rng = _rng(cfg.seed, trial_index, _STREAM_SAMPLING)
    noise_rng = _rng(cfg.seed, trial_index, _STREAM_NOISE)

    rotation = None
    if cfg.rotated:
        rotation_rng = _rng(cfg.seed, trial_index, _STREAM_ROTATION)
        rotation = objectives.random_rotation(d, rotation_rng)

    obj = objectives.Objective(
        name=cfg.objective,
        dim=d,
        noise_variance=cfg.noise_variance,
        rotation=rotation,
    )
    spec = objectives.init_spec(cfg.objective, d)
    m0 = spec.m0 if rotation is None else rotation.T @ spec.m0
    dist = cma.SearchDistribution(m=m0.copy(), sigma=spec.sigma0, C=np.eye(d))

    params = cma.default_params(d, cfg.lam)
    state = cma.CmaState.initial(d)
    hp = lra.LraHyperParams(
        alpha=cfg.alpha, beta_m=cfg.beta_m, beta_sigma=cfg.beta_sigma, gamma=cfg.gamma
    )
    lstate = lra.LraState.initial(d)
    adapt = cfg.algorithm == "lra"
    if not adapt:
        lstate.eta_m = cfg.eta_m
        lstate.eta_sigma = cfg.eta_sigma

    targets = ecdf_targets(cfg.n_targets)
    first_hits = np.full(cfg.n_targets, -1, dtype=np.int64)

    def evaluate(x):
        return obj.evaluate(x, rng=noise_rng)

    history = []
    evals = 0
    success = False
    evals_to_target = None
    termination = "budget"
    f_m = obj.noiseless_value(dist.m)
    while evals < cfg.budget:
        want_row = state.t % cfg.history_stride == 0
        try:
            dist, state, lstate, report = lra.lra_step(
                dist,
                params,
                state,
                hp,
                lstate,
                sampling_rng,
                evaluate,
                bounds=obj.bounds,
                adapt=adapt,
                full_report=want_row,
            )
        except LracmaError:
            termination = "numerical"
            break
        evals += params.lam
        f_m = obj.noiseless_value(dist.m)
        report.f_m = f_m

        hit = (f_m <= targets) & (first_hits < 0)
        if hit.any():
            first_hits[hit] = evals

        if want_row:
            history.append((evals, report))
        if not math.isfinite(f_m) or not np.all(np.isfinite(dist.m)):
            termination = "numerical"
            break
        if f_m <= cfg.target:
            success = True
            evals_to_target = evals
            termination = "target"
            history.append((evals, report))
            break
        if dist.sigma < SIGMA_UNDERFLOW:
            termination = "numerical"
            break
        scale = POINT_MASS_REL * max(1.0, float(np.max(np.abs(dist.m))))
        if dist.sigma**2 * float(np.max(np.diag(dist.C))) < scale**2:
            termination = "numerical"
            break

    return TrialRecord(
        trial_index=trial_index,
        seed=cfg.seed,
        success=success,
        evaluations_to_target=evals_to_target,
        termination=termination,
        f_m_final=f_m,
        history=history,
        first_hits=first_hits,
    )


def run_config(cfg, jobs=1):
    """All trials of a config, ordered by trial index."""
    cfg = cfg.resolved()
    indices = range(cfg.trials)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_trial, [cfg] * cfg.trials, indices))
    else:
        records = [run_trial(cfg, i) for i in indices]
    return records


def success_rate(records):
    if not records:
        return 0.0
    return sum(r.success for r in records) / len(records)


def sp1(records):
    """Mean successful evals-to-target divided by the success rate.

    Returns None when no trial succeeded (a missing point downstream).
    """
    rate = success_rate(records)
    if rate == 0.0:
        return None
    evals = [r.evaluations_to_target for r in records if r.success]
    return float(np.mean(evals)) / rate


def ecdf_targets(n_targets):
    """Geometric target grid 10^6 down to 10^-3."""
    i = np.arange(1, n_targets + 1)
    return 10.0 ** (6.0 - 9.0 * (i - 1) / (n_targets - 1))


def ecdf_grid(budget, n_points=101):
    """Log-spaced evaluation-count grid from 10^2 up to the budget."""
    return np.logspace(2.0, math.log10(budget), n_points)


def ecdf_curve(records, grid):
    """Fraction of (trial, target) pairs first hit within g evals, per g."""
    hits = np.concatenate([r.first_hits for r in records])
    hits = hits[hits >= 0]
    total = sum(len(r.first_hits) for r in records)
    return np.array([(hits <= g).sum() / total for g in grid])


def sweep(base_cfg, param, values, jobs=1):
    """Run full trial sets per value; rows of (value, success_rate, sp1)."""
    base_cfg = base_cfg.resolved()
    if param not in {f.name for f in dataclasses.fields(RunConfig)}:
        raise InvalidConfig(f"unknown sweep parameter {param!r}")
    rows = []
    for value in values:
        cfg = dataclasses.replace(base_cfg, **{param: value})
        records = run_config(cfg, jobs=jobs)
        rows.append((value, success_rate(records), sp1(records)))
    return rows


# ---------------------------------------------------------------- CSV output


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trials_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["trial", "seed", "success", "evaluations_to_target", "termination", "f_m_final"]
        )
        for r in records:
            w.writerow(
                [
                    r.trial_index,
                    r.seed,
                    int(r.success),
                    _fmt(r.evaluations_to_target),
                    r.termination,
                    _fmt(r.f_m_final),
                ]
            )


def write_history_csv(records, path):
    cols = [
        "trial",
        "t",
        "evals",
        "f_m",
        "f_best",
        "eta_m",
        "eta_sigma",
        "snr_m",
        "snr_sigma",
        "sigma",
        "eig_min",
        "eig_max",
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in records:
            for evals, rep in r.history:
                w.writerow(
                    [r.trial_index, rep.t, evals]
                    + [
                        _fmt(v)
                        for v in (
                            rep.f_m,
                            rep.f_best,
                            rep.eta_m,
                            rep.eta_sigma,
                            rep.snr_m,
                            rep.snr_sigma,
                            rep.sigma,
                            rep.eig_min,
                            rep.eig_max,
                        )
                    ]
                )


def write_ecdf_csv(grid, curves, path):
    """curves: mapping of algorithm label -> proportion array over grid."""
    labels = list(curves)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["evals"] + labels)
        for i, g in enumerate(grid):
            w.writerow([_fmt(float(g))] + [_fmt(float(curves[l][i])) for l in labels])


def write_sweep_csv(rows, param, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([param, "success_rate", "sp1"])
        for value, rate, s in rows:
            w.writerow([_fmt(value), _fmt(rate), _fmt(s)])
