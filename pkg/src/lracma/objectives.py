"""Benchmark objective suite with noise, rotation, and bound handling.

Every function has its global optimum value 0.  All evaluators are
vectorized over a batch of points with shape (n, d).  Additive Gaussian
noise is drawn from a dedicated RNG stream one value per evaluated point, so
noiseless replays never disturb the sampling stream of the optimizer.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, InvalidInput


def _sphere(x):
    return np.sum(x * x, axis=1)


def _ellipsoid(x):
    d = x.shape[1]
    scale = 1000.0 ** (np.arange(d) / (d - 1))
    sx = scale * x
    return np.sum(sx * sx, axis=1)


def _rosenbrock(x):
    a = x[:, 1:] - x[:, :-1] ** 2
    b = x[:, :-1] - 1.0
    return np.sum(100.0 * a * a + b * b, axis=1)


def _ackley(x):
    d = x.shape[1]
    return (
        20.0
        - 20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=1) / d))
        + math.e
        - np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=1) / d)
    )


def _schaffer(x):
    s = x[:, :-1] ** 2 + x[:, 1:] ** 2
    return np.sum(s**0.25 * (np.sin(50.0 * s**0.1) ** 2 + 1.0), axis=1)


def _rastrigin(x):
    d = x.shape[1]
    return 10.0 * d + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=1)


def _bohachevsky(x):
    x0, x1 = x[:, :-1], x[:, 1:]
    return np.sum(
        x0**2
        + 2.0 * x1**2
        - 0.3 * np.cos(3.0 * np.pi * x0)
        - 0.4 * np.cos(4.0 * np.pi * x1)
        + 0.7,
        axis=1,
    )


def _griewank(x):
    d = x.shape[1]
    i = np.sqrt(np.arange(1, d + 1))
    return (
        np.sum(x * x, axis=1) / 4000.0 - np.prod(np.cos(x / i), axis=1) + 1.0
    )


# name -> (evaluator, m0 coordinate, sigma0, optimum coordinate)
_REGISTRY = {
    "sphere": (_sphere, 3.0, 2.0, 0.0),
    "ellipsoid": (_ellipsoid, 3.0, 2.0, 0.0),
    "rosenbrock": (_rosenbrock, 0.0, 0.1, 1.0),
    "ackley": (_ackley, 15.5, 14.5, 0.0),
    "schaffer": (_schaffer, 55.0, 45.0, 0.0),
    "rastrigin": (_rastrigin, 3.0, 2.0, 0.0),
    "bohachevsky": (_bohachevsky, 8.0, 7.0, 0.0),
    "griewank": (_griewank, 305.0, 295.0, 0.0),
}

# Inferred from the Ackley initialization m0 = 15.5, sigma0 = 14.5 spanning
# exactly this box; the bound-handling protocol is resample-then-clamp.
ACKLEY_BOUNDS = (1.0, 30.0)


def objective_names():
    return sorted(_REGISTRY)


@dataclass
class InitSpec:
    m0: np.ndarray
    sigma0: float


@dataclass
class Objective:
    name: str
    dim: int
    noise_variance: float = 0.0
    rotation: np.ndarray = None  # orthogonal d x d, applied as f(R x)
    bounds: tuple = None  # (lo, hi) box, same for every coordinate

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise InvalidConfig(f"unknown objective {self.name!r}")
        if self.dim < 2:
            raise InvalidConfig(f"objectives require dim >= 2, got {self.dim}")
        self._fn = _REGISTRY[self.name][0]
        if self.name == "ackley" and self.bounds is None:
            self.bounds = ACKLEY_BOUNDS

    def _base(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise InvalidInput(
                f"expected points of dimension {self.dim}, got {x.shape[1]}"
            )
        if self.rotation is not None:
            x = x @ self.rotation.T
        return self._fn(x)

    def evaluate(self, x, rng=None):
        """Objective values, plus one fresh noise draw per point if noisy."""
        f = self._base(x)
        if self.noise_variance > 0.0:
            if rng is None:
                raise InvalidInput("noisy objective requires a noise RNG")
            f = f + rng.normal(0.0, math.sqrt(self.noise_variance), size=f.shape)
        return f

    def noiseless_value(self, x):
        """Noise-suppressed value; used only for metrics, never fed back."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self._base(x[None, :])[0])
        return self._base(x)


def init_spec(name, d):
    """Initial search distribution (m0, sigma0) for a registered function."""
    if name not in _REGISTRY:
        raise InvalidConfig(f"unknown objective {name!r}")
    _, m0, sigma0, _ = _REGISTRY[name]
    return InitSpec(m0=np.full(d, m0), sigma0=sigma0)


def optimum(name, d):
    """Location of the global optimum."""
    if name not in _REGISTRY:
        raise InvalidConfig(f"unknown objective {name!r}")
    return np.full(d, _REGISTRY[name][3])


def random_rotation(d, rng):
    """Haar-ish orthogonal matrix: QR of a Gaussian with a sign fix."""
    a = rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))
