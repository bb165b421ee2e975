"""Learning-rate adaptation wrapped around one CMA-ES iteration.

The raw CMA proposal is turned into parameter deltas, re-expressed in local
coordinates where the Fisher metric is the identity, accumulated into moving
averages, and used to estimate the signal-to-noise ratio of the update.  The
learning-rate factors eta_m and eta_Sigma then track SNR = alpha * eta, and
the damped updates are applied to (m, Sigma) with a step-size correction.

Vectorized d x d matrices use full row-major vectorization (d^2 entries), so
the Euclidean norm of a vectorized delta equals the Frobenius norm of the
matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm as _stdnorm

from . import cma, linalg
from .errors import NumericalRange

SNR_MAX = 1e6  # returned when the noise estimate degenerates to ~0
SNR_DEN_EPS = 1e-300
ETA_MIN = 1e-10  # floor on both factors to keep exponents finite


@dataclass(frozen=True)
class LraHyperParams:
    alpha: float = 1.4
    beta_m: float = 0.1
    beta_sigma: float = 0.03
    gamma: float = 0.1


@dataclass
class LraState:
    """Learning-rate factors and moving-average accumulators.

    E_sigma is stored as a d x d matrix; its vectorized form is what the
    accumulator formulas refer to (norms agree by construction).
    """

    eta_m: float
    eta_sigma: float
    E_m: np.ndarray
    V_m: float
    E_sigma: np.ndarray
    V_sigma: float

    @classmethod
    def initial(cls, d):
        return cls(
            eta_m=1.0,
            eta_sigma=1.0,
            E_m=np.zeros(d),
            V_m=0.0,
            E_sigma=np.zeros((d, d)),
            V_sigma=0.0,
        )


@dataclass
class IterationReport:
    """Per-iteration history row; f_m is filled in by the run loop."""

    t: int
    f_best: float
    f_m: float
    eta_m: float
    eta_sigma: float
    snr_m: float
    snr_sigma: float
    sigma: float
    eig_min: float
    eig_max: float


def compute_deltas(old, proposed):
    """Raw update deltas: (m' - m, vec(sigma'^2 C' - sigma^2 C))."""
    delta_m = proposed.m - old.m
    delta_sigma = (proposed.sigma_matrix() - old.sigma_matrix()).ravel()
    return delta_m, delta_sigma


def to_local(dist_old, delta_m, delta_sigma):
    """Re-express deltas in coordinates where the Fisher metric is I."""
    d = dist_old.dim
    inv_sqrt = linalg.spd_inv_sqrt(dist_old.sigma_matrix())
    tilde_m = inv_sqrt @ delta_m
    mat = delta_sigma.reshape(d, d)
    tilde_sigma = (inv_sqrt @ mat @ inv_sqrt).ravel() / math.sqrt(2.0)
    return tilde_m, tilde_sigma


def update_averages(E, V, tilde_delta, beta):
    """Exponential moving averages of the delta and its squared norm."""
    E_new = (1.0 - beta) * E + beta * tilde_delta
    V_new = (1.0 - beta) * V + beta * float(np.sum(tilde_delta * tilde_delta))
    return E_new, V_new


def estimate_snr(E, V, beta):
    """Debiased SNR estimate from the moving averages.

    Returns SNR_MAX when the noise estimate V - ||E||^2 is nonpositive or
    vanishingly small (a deterministic update stream).
    """
    e2 = float(np.sum(E * E))
    den = V - e2
    if den <= SNR_DEN_EPS:
        return SNR_MAX
    return (e2 - beta / (2.0 - beta) * V) / den


def update_eta(eta, snr_hat, hp, beta):
    """One multiplicative learning-rate step toward SNR = alpha * eta."""
    step = min(hp.gamma * eta, beta)
    drive = min(1.0, max(-1.0, snr_hat / (hp.alpha * eta) - 1.0))
    eta_new = min(1.0, eta * math.exp(step * drive))
    return max(eta_new, ETA_MIN)


def apply_updates(old, delta_m, delta_sigma, eta_m, eta_sigma):
    """Damped parameter application; Sigma is symmetrized and SPD-clamped."""
    d = old.dim
    m_new = old.m + eta_m * delta_m
    sig_mat = linalg.symmetrize(
        old.sigma_matrix() + eta_sigma * delta_sigma.reshape(d, d)
    )
    sig_mat = linalg.spd_clamp(sig_mat)
    sigma, C = decompose(sig_mat, d)
    return cma.SearchDistribution(m=m_new, sigma=sigma, C=C)


def decompose(sigma_matrix, d):
    """Split an overall covariance into (sigma, C) with det(C) = 1.

    sigma = det^(1/2d), computed via log-eigenvalues so that very small
    covariances do not underflow the determinant.
    """
    vals, _ = linalg.clamped_eig(sigma_matrix)
    log_det = float(np.sum(np.log(vals)))
    sigma = math.exp(log_det / (2.0 * d))
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise NumericalRange("step-size under- or overflowed in decomposition")
    C = sigma_matrix / sigma**2
    return sigma, C


def correct_stepsize(sigma, eta_m_old, eta_m_new):
    """Keep sigma near its optimum when eta_m changes (optimum ~ 1/eta_m)."""
    return sigma * (eta_m_old / eta_m_new)


def lra_step(
    dist, params, state, hp, lstate, rng, evaluate, bounds=None, adapt=True, full_report=True
):
    """One full adaptive iteration.

    Order: CMA proposal -> deltas -> local coordinates -> moving averages and
    SNR for both components -> eta updates (capped at 1) -> application with
    the new etas -> decomposition -> step-size correction -> t increment.

    With adapt=False and both factors exactly 1 the proposal is passed
    through untouched, so the trajectory is bit-identical to plain CMA-ES;
    with adapt=False and fixed factors != 1 the damped update still runs but
    the factors never move.

    Returns (dist', state', lstate', IterationReport).
    """
    d = dist.dim
    vals_C, vecs_C = linalg.clamped_eig(dist.C)
    sqrt_C = linalg.symmetrize((vecs_C * np.sqrt(vals_C)) @ vecs_C.T)

    proposal, new_state, ranked = cma.cma_iteration(
        dist, params, state, rng, evaluate, bounds=bounds, sqrt_C=sqrt_C
    )
    f_best = float(ranked.f_values[ranked.order[0]])
    t_next = state.t + 1

    if not adapt and lstate.eta_m == 1.0 and lstate.eta_sigma == 1.0:
        new_state.t = t_next
        if full_report:
            vals_p = np.linalg.eigvalsh(proposal.C)
            eig_min = float(proposal.sigma**2 * vals_p[0])
            eig_max = float(proposal.sigma**2 * vals_p[-1])
        else:
            eig_min = eig_max = math.nan
        report = IterationReport(
            t=t_next,
            f_best=f_best,
            f_m=math.nan,
            eta_m=1.0,
            eta_sigma=1.0,
            snr_m=math.nan,
            snr_sigma=math.nan,
            sigma=proposal.sigma,
            eig_min=eig_min,
            eig_max=eig_max,
        )
        return proposal, new_state, lstate, report

    delta_m, delta_sigma = compute_deltas(dist, proposal)

    # local coordinates, from the cached eigendecomposition of C
    inv_sqrt_sigma_mat = linalg.symmetrize(
        (vecs_C / (dist.sigma * np.sqrt(vals_C))) @ vecs_C.T
    )
    tilde_m = inv_sqrt_sigma_mat @ delta_m
    delta_mat = delta_sigma.reshape(d, d)
    tilde_sigma_mat = (inv_sqrt_sigma_mat @ delta_mat @ inv_sqrt_sigma_mat) / math.sqrt(2.0)

    if adapt:
        E_m, V_m = update_averages(lstate.E_m, lstate.V_m, tilde_m, hp.beta_m)
        E_s, V_s = update_averages(lstate.E_sigma, lstate.V_sigma, tilde_sigma_mat, hp.beta_sigma)
        snr_m = estimate_snr(E_m, V_m, hp.beta_m)
        snr_s = estimate_snr(E_s, V_s, hp.beta_sigma)
        eta_m = update_eta(lstate.eta_m, snr_m, hp, hp.beta_m)
        eta_s = update_eta(lstate.eta_sigma, snr_s, hp, hp.beta_sigma)
    else:
        E_m, V_m, E_s, V_s = lstate.E_m, lstate.V_m, lstate.E_sigma, lstate.V_sigma
        snr_m = snr_s = math.nan
        eta_m, eta_s = lstate.eta_m, lstate.eta_sigma

    m_new = dist.m + eta_m * delta_m
    sig_mat = linalg.symmetrize(dist.sigma_matrix() + eta_s * delta_mat)
    vals_new, vecs_new = linalg.clamped_eig(sig_mat)
    sig_mat = linalg.symmetrize((vecs_new * vals_new) @ vecs_new.T)
    log_det = float(np.sum(np.log(vals_new)))
    sigma_new = math.exp(log_det / (2.0 * d))
    if not math.isfinite(sigma_new) or sigma_new <= 0.0:
        raise NumericalRange(f"step-size degenerated at iteration t={state.t}")
    C_new = sig_mat / sigma_new**2
    sigma_new = correct_stepsize(sigma_new, lstate.eta_m, eta_m)

    new_state.t = t_next
    new_lstate = LraState(
        eta_m=eta_m, eta_sigma=eta_s, E_m=E_m, V_m=V_m, E_sigma=E_s, V_sigma=V_s
    )
    new_dist = cma.SearchDistribution(m=m_new, sigma=sigma_new, C=C_new)
    report = IterationReport(
        t=t_next,
        f_best=f_best,
        f_m=math.nan,
        eta_m=eta_m,
        eta_sigma=eta_s,
        snr_m=snr_m,
        snr_sigma=snr_s,
        sigma=sigma_new,
        eig_min=float(vals_new[0]),
        eig_max=float(vals_new[-1]),
    )
    return new_dist, new_state, new_lstate, report


def theoretical_sphere_snr(d, lam):
    """Closed-form sphere-function SNR scale for the mean update.

    Uses Blom's approximation for expected normal order statistics and the
    default recombination weights padded with zeros to length lam:
    lam / (d - 1) * (w^T n)^2 / (||w||^2 ||n||^2).  Test oracle only.
    """
    params = cma.default_params(d, lam)
    w = np.zeros(lam)
    w[: params.mu] = params.weights
    i = np.arange(1, lam + 1)
    n = _stdnorm.ppf((i - 0.375) / (lam + 0.25))
    return (
        lam
        / (d - 1.0)
        * float(w @ n) ** 2
        / (float(w @ w) * float(n @ n))
    )
