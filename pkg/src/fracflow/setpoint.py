"""Rate inversion: find the production rate giving a prescribed drawdown.

The coupled model is a single-input single-output system

    A z + F(z) + B_in Q = 0,      pdd = C(z),

linear in the rate Q.  One linear step response X (A X = -B_in, gain
G = C(X)) turns the inverse problem into a fixed point for Q: solve the
nonlinear state at the current rate, solve the linear correction
A zt = -F(z), and update Q = (target - C(zt)) / G.  At the fixed point
the achieved drawdown equals the target by construction; with beta = 0
the correction vanishes and the first rate is already exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import (
    LinearSystem,
    ScalarField,
    _bulk_stiffness,
    assemble_A,
    assemble_B_in,
    assemble_F_residual,
    output_C,
)
from .errors import ControlError
from .kernels import FlowParams
from .meshing import Mesh
from .solvers import solve_linear, solve_pss

__all__ = ["SetpointResult", "baseline_pdd", "step_response", "solve_setpoint"]


@dataclass(frozen=True)
class SetpointResult:
    """Outcome of a set-point solve.

    J_p is the diffusive capacity Q / PDD, the productivity index of the
    fractured configuration; history holds one (Q, PDD) pair per outer
    iteration.
    """

    Q: float
    PDD: float
    J_p: float
    outer_iterations: int
    history: list
    field: ScalarField


def baseline_pdd(m: Mesh, p: FlowParams, Q: float) -> float:
    """Drawdown of the unfractured reservoir at rate Q (pure Darcy).

    Fracture terms are disabled by treating the aperture as zero, so only
    the bulk operator and the pinned well remain.
    """
    A = _bulk_stiffness(m, p.k_p)
    b = -assemble_B_in(m, aperture=0.0) * Q
    W = solve_linear(LinearSystem(A, b, [(m.well_node, 0.0)], m))
    return output_C(m, W, aperture=0.0)


def step_response(m: Mesh, p: FlowParams,
                  aperture: float | None = None) -> tuple[ScalarField, float]:
    """Unit-rate linear response X (A X = -B_in) and its gain G = C(X) > 0."""
    sys = assemble_A(m, p, aperture=aperture)
    b = -assemble_B_in(m, aperture=aperture)
    X = solve_linear(LinearSystem(sys.matrix, b, sys.constrained_nodes, m))
    G = output_C(m, X, aperture=aperture)
    return X, G


def solve_setpoint(m: Mesh, p: FlowParams, target_pdd: float,
                   tol: float = 1e-6, max_outer: int = 50,
                   picard_tol: float = 1e-9, theta: float = 1.0,
                   aperture: float | None = None) -> SetpointResult:
    """Find Q such that the pseudo-steady drawdown equals target_pdd.

    Raises ControlError with the (Q, PDD) history if max_outer is
    exhausted before |PDD - target| <= tol * target.
    """
    if not (np.isfinite(target_pdd) and target_pdd > 0):
        raise ValueError(f"target_pdd must be positive and finite, got {target_pdd}")
    X, G = step_response(m, p, aperture=aperture)
    sys_A = assemble_A(m, p, aperture=aperture)

    # The raw update Q <- (target - C zt)/G contracts only while the
    # nonlinear drawdown slope stays below twice the linear gain G;
    # relaxing the step restores convergence for strongly nonlinear
    # cells without touching the benign path (omega starts at 1).
    Q = target_pdd / G
    omega = 1.0
    prev_err = np.inf
    history: list[tuple[float, float]] = []
    for k in range(1, max_outer + 1):
        z, _ = solve_pss(m, p, Q, tol=picard_tol, theta=theta, aperture=aperture)
        pdd = output_C(m, z, aperture=aperture)
        history.append((Q, pdd))
        err = abs(pdd - target_pdd)
        if err <= tol * target_pdd:
            return SetpointResult(Q, pdd, Q / pdd, k, history, z)
        if err >= prev_err:
            omega = max(omega / 2.0, 1.0 / 64.0)
        else:
            omega = min(1.0, omega * 1.25)
        prev_err = err
        Fz = assemble_F_residual(m, p, z, aperture=aperture)
        zt = solve_linear(LinearSystem(sys_A.matrix, -Fz, sys_A.constrained_nodes, m))
        Q_raw = (target_pdd - output_C(m, zt, aperture=aperture)) / G
        Q = Q + omega * (Q_raw - Q)
    raise ControlError(
        f"set-point iteration did not reach the target drawdown in {max_outer} steps "
        f"(last relative error {err / target_pdd:g}, relaxation {omega:g})",
        history)
