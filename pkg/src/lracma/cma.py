"""One iteration of standard CMA-ES as a pure state transition.

The iteration is split into the usual three steps: sampling/ranking,
evolution-path cumulation, and the (m, sigma, C) update proposal.  Nothing
here performs I/O or owns a loop; callers thread the state through.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidConfig, NumericalRange, ObjectiveNaN


@dataclass
class SearchDistribution:
    """Gaussian search state: mean m, step-size sigma, shape matrix C."""

    m: np.ndarray
    sigma: float
    C: np.ndarray

    @property
    def dim(self):
        return len(self.m)

    def sigma_matrix(self):
        """Overall covariance sigma^2 * C."""
        return self.sigma**2 * self.C


@dataclass(frozen=True)
class CmaParams:
    """Strategy constants; see default_params for the standard settings."""

    lam: int
    mu: int
    weights: np.ndarray
    mu_w: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    c_m: float
    chi_d: float


@dataclass
class CmaState:
    """Evolution paths and the iteration counter (t starts at 0)."""

    p_sigma: np.ndarray
    p_c: np.ndarray
    t: int = 0

    @classmethod
    def initial(cls, d):
        return cls(p_sigma=np.zeros(d), p_c=np.zeros(d), t=0)


@dataclass
class RankedPopulation:
    """Sampled population with its ascending-f ranking."""

    order: np.ndarray  # permutation of 0..lam-1, best first
    x: np.ndarray  # (lam, d)
    y: np.ndarray  # (lam, d)
    z: np.ndarray  # (lam, d)
    f_values: np.ndarray  # (lam,)


def default_lambda(d):
    return 4 + int(3 * math.log(d))


def default_params(d, lam=None):
    """Standard CMA-ES constants for dimension d.

    lam defaults to 4 + floor(3 ln d); mu = floor(lam / 2) with positive
    log-rank weights.
    """
    if d < 1:
        raise InvalidConfig(f"dimension must be >= 1, got {d}")
    if lam is None:
        lam = default_lambda(d)
    if lam < 2:
        raise InvalidConfig(f"population size must be >= 2, got {lam}")
    mu = lam // 2
    raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_w = 1.0 / np.sum(weights**2)
    c_sigma = (mu_w + 2.0) / (d + mu_w + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_w - 1.0) / (d + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_w / d) / (d + 4.0 + 2.0 * mu_w / d)
    c_1 = 2.0 / ((d + 1.3) ** 2 + mu_w)
    c_mu = min(1.0 - c_1, 2.0 * (mu_w - 2.0 + 1.0 / mu_w) / ((d + 2.0) ** 2 + mu_w))
    chi_d = math.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d**2))
    return CmaParams(
        lam=lam,
        mu=mu,
        weights=weights,
        mu_w=mu_w,
        c_sigma=c_sigma,
        d_sigma=d_sigma,
        c_c=c_c,
        c_1=c_1,
        c_mu=c_mu,
        c_m=1.0,
        chi_d=chi_d,
    )


def sample_population(dist, params, rng, bounds=None, sqrt_C=None):
    """Draw lam candidates from N(m, sigma^2 C).

    Standard-normal draws are consumed from rng row by row (sample index
    ascending, coordinate ascending), so a fixed seed reproduces the
    population bit for bit.  With box bounds set, infeasible candidates are
    redrawn up to 100 times and finally clamped coordinate-wise; the clamped
    x is what gets evaluated while y and z keep the raw draw.

    Returns (z, y, x) arrays of shape (lam, d).
    """
    if sqrt_C is None:
        sqrt_C = linalg.spd_sqrt(dist.C)
    z = rng.standard_normal((params.lam, dist.dim))
    y = z @ sqrt_C  # sqrt_C is symmetric
    x = dist.m + dist.sigma * y
    if bounds is not None:
        lo, hi = bounds
        for _ in range(100):
            bad = np.where(np.any((x < lo) | (x > hi), axis=1))[0]
            if bad.size == 0:
                break
            z[bad] = rng.standard_normal((bad.size, dist.dim))
            y[bad] = z[bad] @ sqrt_C
            x[bad] = dist.m + dist.sigma * y[bad]
        np.clip(x, lo, hi, out=x)
    return z, y, x


def rank(f_values):
    """Stable ascending argsort; ties keep the lower sample index first."""
    f_values = np.asarray(f_values)
    if np.any(np.isnan(f_values)):
        raise ObjectiveNaN("objective returned NaN")
    return np.argsort(f_values, kind="stable")


def recombine(ranked, params):
    """Weighted averages dz, dy over the mu best samples."""
    top = ranked.order[: params.mu]
    dz = params.weights @ ranked.z[top]
    dy = params.weights @ ranked.y[top]
    return dz, dy


def heaviside(p_sigma_new, params, t_next, d):
    """Stall indicator h_sigma for the rank-one path update."""
    norm2 = float(p_sigma_new @ p_sigma_new)
    denom = 1.0 - (1.0 - params.c_sigma) ** (2 * t_next)
    return 1 if norm2 / denom < (2.0 + 4.0 / (d + 1.0)) * d else 0


def update_paths(state, params, dz, dy):
    """Cumulate the evolution paths; the caller of the full step bumps t."""
    d = len(dz)
    p_sigma = (1.0 - params.c_sigma) * state.p_sigma + math.sqrt(
        params.c_sigma * (2.0 - params.c_sigma) * params.mu_w
    ) * dz
    h = heaviside(p_sigma, params, state.t + 1, d)
    p_c = (1.0 - params.c_c) * state.p_c + h * math.sqrt(
        params.c_c * (2.0 - params.c_c) * params.mu_w
    ) * dy
    return CmaState(p_sigma=p_sigma, p_c=p_c, t=state.t)


def propose_update(dist, params, state, ranked):
    """Steps 2-3: paths plus the proposed next (m, sigma, C).

    Returns (proposed SearchDistribution, new CmaState).  The new state's
    counter equals the old one; the caller owning the full step increments t.
    """
    dz, dy = recombine(ranked, params)
    new_state = update_paths(state, params, dz, dy)
    d = dist.dim
    h = heaviside(new_state.p_sigma, params, state.t + 1, d)

    m_new = dist.m + params.c_m * dist.sigma * dy
    norm_ps = float(np.linalg.norm(new_state.p_sigma))
    sigma_new = dist.sigma * math.exp(
        min(1.0, (params.c_sigma / params.d_sigma) * (norm_ps / params.chi_d - 1.0))
    )

    top = ranked.order[: params.mu]
    y_top = ranked.y[top]
    rank_mu = (params.weights[:, None] * y_top).T @ y_top - params.weights.sum() * dist.C
    pc = new_state.p_c
    C_new = (
        (1.0 + (1 - h) * params.c_1 * params.c_c * (2.0 - params.c_c)) * dist.C
        + params.c_1 * (np.outer(pc, pc) - dist.C)
        + params.c_mu * rank_mu
    )
    C_new = linalg.symmetrize(C_new)

    if not (
        np.all(np.isfinite(m_new)) and math.isfinite(sigma_new) and np.all(np.isfinite(C_new))
    ):
        raise NumericalRange(f"non-finite CMA update at iteration t={state.t}")
    return SearchDistribution(m=m_new, sigma=sigma_new, C=C_new), new_state


def cma_iteration(dist, params, state, rng, evaluate, bounds=None, sqrt_C=None):
    """Full Step 1-3 transition: sample, evaluate, rank, propose.

    evaluate maps an (lam, d) array to lam objective values.  Returns
    (proposal, new_state, ranked).
    """
    z, y, x = sample_population(dist, params, rng, bounds=bounds, sqrt_C=sqrt_C)
    f = np.asarray(evaluate(x), dtype=float)
    ranked = RankedPopulation(order=rank(f), x=x, y=y, z=z, f_values=f)
    proposal, new_state = propose_update(dist, params, state, ranked)
    return proposal, new_state, ranked
