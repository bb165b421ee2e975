"""Zero-learning-rate flow of the 1-D Rastrigin mean/variance dynamics.

The right-hand side is exact; trajectories come from explicit Euler steps at
a configurable learning rate.  Integration halts early when the variance
degenerates or when the flow has effectively stopped.
"""

import math
from dataclasses import dataclass

STALL_EPS = 1e-12  # early stop when both derivatives are below this


@dataclass
class OdeTrajectory:
    steps: list  # step indices of the emitted states
    m: list
    v: list
    degenerate: bool  # True when v dropped to <= 0 and integration halted


def rastrigin_ode_rhs(m, v):
    """(dm/dt, dv/dt) for the 1-D Rastrigin mean/variance flow."""
    damp = math.exp(-2.0 * math.pi**2 * v)
    dm = -2.0 * m * v - 20.0 * math.pi * v * math.sin(2.0 * math.pi * m) * damp
    dv = -2.0 * v * v - 40.0 * math.pi**2 * v * v * math.cos(2.0 * math.pi * m) * damp
    return dm, dv


def euler_integrate(m0, v0, eta, steps, thin=1000):
    """Explicit Euler trajectory from (m0, v0) with step size eta.

    Every thin-th state plus the final one is emitted.  A nonpositive
    variance stops integration with the partial trajectory flagged
    degenerate.
    """
    m, v = float(m0), float(v0)
    out_steps, out_m, out_v = [0], [m], [v]
    degenerate = False
    two_pi_sq = 2.0 * math.pi**2
    k = 0
    for k in range(1, steps + 1):
        damp = math.exp(-two_pi_sq * v)
        dm = -2.0 * m * v - 20.0 * math.pi * v * math.sin(2.0 * math.pi * m) * damp
        dv = -2.0 * v * v - 40.0 * math.pi**2 * v * v * math.cos(2.0 * math.pi * m) * damp
        m += eta * dm
        v += eta * dv
        if v <= 0.0:
            degenerate = True
            out_steps.append(k)
            out_m.append(m)
            out_v.append(v)
            break
        if k % thin == 0:
            out_steps.append(k)
            out_m.append(m)
            out_v.append(v)
        if max(abs(dm), abs(dv)) < STALL_EPS:
            break
    if out_steps[-1] != k and not degenerate:
        out_steps.append(k)
        out_m.append(m)
        out_v.append(v)
    return OdeTrajectory(steps=out_steps, m=out_m, v=out_v, degenerate=degenerate)


def write_ode_csv(traj, path):
    with open(path, "w", newline="") as fh:
        fh.write("step,m,v\n")
        for s, m, v in zip(traj.steps, traj.m, traj.v):
            fh.write(f"{s},{m!r},{v!r}\n")
