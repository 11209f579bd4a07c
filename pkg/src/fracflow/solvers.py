"""Sparse linear solves and Picard iteration for the nonlinear systems.

The mobility nonlinearity is monotone, so frozen-coefficient (Picard)
iteration converges without globalization tricks: each step reassembles
the fracture (or slab) coefficient at the current iterate and re-solves
the resulting symmetric positive definite system.  Damping is available
as a safeguard and halves automatically if the nonlinear residual grows.

Solves are deterministic for fixed inputs: the direct factorization path
is attempted first and its residual verified, with a Jacobi-preconditioned
conjugate gradient fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg, splu

from .assembly import (
    LinearSystem,
    ScalarField,
    _bulk_stiffness,
    _line_stiffness,
    apply_constraints,
    assemble_B_in,
    assemble_F_residual,
    dirichlet_nodes,
    fracture_edge_gradients,
    slab_frozen_matrix,
    slab_rhs,
)
from .errors import SolverError
from .kernels import FlowParams, fbeta_iso
from .meshing import Mesh

__all__ = ["SolveReport", "solve_linear", "solve_pss", "solve_slab", "pss_energy"]

_STAGNATION_LIMIT = 10


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool
    damping_used: float


def _solve_spd(A: sparse.csr_matrix, b: np.ndarray, tol: float) -> np.ndarray:
    """Direct factorization with residual verification, CG fallback.

    One step of iterative refinement keeps the direct path at machine
    accuracy even for ill-conditioned systems.
    """
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return np.zeros_like(b)
    norm_A = sparse.linalg.norm(A)

    def accepted(x):
        # residual relative to b; machine-level backward error is also
        # fine, but only alongside a small relative residual so that a
        # near-singular solve with an exploding x cannot sneak through
        r = float(np.linalg.norm(b - A @ x))
        rel = r / norm_b
        backward = r / (norm_b + norm_A * np.linalg.norm(x))
        return (np.all(np.isfinite(x))
                and (rel <= tol or (backward <= 1e-14 and rel <= 1e-6)))

    history = []
    try:
        lu = splu(A.tocsc())
        x = lu.solve(b)
        r = b - A @ x
        res = np.linalg.norm(r) / norm_b
        if np.isfinite(res) and res > tol:
            x = x + lu.solve(r)
            res = np.linalg.norm(b - A @ x) / norm_b
        history.append(("direct", res))
        if accepted(x):
            return x
    except RuntimeError as exc:  # singular factorization
        history.append(("direct", str(exc)))

    diag = A.diagonal()
    if np.any(diag <= 0):
        raise SolverError("matrix is not positive definite (nonpositive diagonal)", history)
    M = sparse.diags(1.0 / diag)
    x, info = cg(A, b, rtol=tol, atol=0.0, maxiter=20 * A.shape[0], M=M)
    res = np.linalg.norm(A @ x - b) / norm_b
    history.append(("cg", res))
    if not accepted(x):
        raise SolverError(
            f"linear solve failed to reach relative residual {tol:g} (got {res:g})",
            history)
    return x


def solve_linear(sys: LinearSystem, tol: float = 1e-10):
    """Solve the constrained SPD system to the given relative residual.

    Returns a ScalarField when the system carries a mesh, otherwise the
    raw solution vector.
    """
    A, b = apply_constraints(sys.matrix, sys.rhs, sys.constrained_nodes)
    x = _solve_spd(A, b, tol)
    if sys.mesh is None:
        return x
    return ScalarField(x, sys.mesh)


def _picard(solve_frozen, residual, z0: np.ndarray, tol: float, theta: float,
            max_iter: int) -> tuple[np.ndarray, SolveReport]:
    """Generic damped frozen-coefficient loop.

    solve_frozen(z) must return the next iterate for the coefficient
    frozen at z; residual(z) the relative nonlinear residual.
    """
    z = z0
    prev_update = np.inf
    prev_res = np.inf
    stall = 0
    history = []
    for k in range(1, max_iter + 1):
        z_next = solve_frozen(z)
        if theta != 1.0:
            z_next = theta * z_next + (1.0 - theta) * z
        denom = max(float(np.linalg.norm(z_next)), 1e-300)
        update = float(np.linalg.norm(z_next - z)) / denom
        res = residual(z_next)
        history.append((update, res))
        z = z_next
        if update <= tol or res <= tol:
            return z, SolveReport(k, res, True, theta)
        if res > prev_res:
            theta = max(theta / 2.0, 1.0 / 64.0)
        stall = stall + 1 if update >= prev_update else 0
        if stall >= _STAGNATION_LIMIT:
            raise SolverError(
                f"Picard stagnated for {stall} steps (update {update:g}); "
                "try a smaller damping theta", history)
        prev_update, prev_res = update, res
    raise SolverError(f"Picard did not converge in {max_iter} iterations "
                      f"(last residual {history[-1][1]:g})", history)


def solve_pss(m: Mesh, p: FlowParams, Q: float, tol: float = 1e-9,
              theta: float = 1.0, max_iter: int = 100,
              aperture: float | None = None) -> tuple[ScalarField, SolveReport]:
    """Pseudo-steady-state solve of the coupled reduced model at rate Q.

    The start iterate solves the linear surrogate (k_f on the fracture
    line); each Picard step freezes the line mobility at the previous
    gradient.  With beta = 0 and the default k_f the first step already
    reproduces the start iterate, so the loop exits after one iteration.
    """
    h = m.aperture if aperture is None else aperture
    A_bulk = _bulk_stiffness(m, p.k_p)
    B = assemble_B_in(m, aperture=h)
    b = -B * Q
    constraints = [(m.well_node, 0.0)]
    lin_tol = max(1e-13, min(1e-11, tol * 1e-3))
    norm_b = max(float(np.linalg.norm(b)), 1e-300)

    has_line = h != 0.0 and len(m.fracture_edges) > 0
    A_lin = A_bulk
    if has_line:
        A_lin = A_bulk + _line_stiffness(
            m, np.full(len(m.fracture_edges), h * p.k_f))

    def solve_frozen(z):
        A = A_bulk
        if has_line:
            gx = fracture_edge_gradients(m, z)
            A = A_bulk + _line_stiffness(m, h * fbeta_iso(np.abs(gx), p))
        A_c, b_c = apply_constraints(A, b, constraints)
        return _solve_spd(A_c, b_c, lin_tol)

    def residual(z):
        r = A_lin @ z + assemble_F_residual(m, p, z, aperture=h) + B * Q
        r[m.well_node] = 0.0
        return float(np.linalg.norm(r)) / norm_b

    A_c0, b_c0 = apply_constraints(A_lin, b, constraints)
    z0 = _solve_spd(A_c0, b_c0, lin_tol)
    z, report = _picard(solve_frozen, residual, z0, tol, theta, max_iter)
    return ScalarField(z, m), report


def solve_slab(m: Mesh, p: FlowParams, flavor: str, q_plus, q_minus,
               q_over_v: float, tol: float = 1e-9, theta: float = 1.0,
               max_iter: int = 100, reduced: bool = False) -> tuple[ScalarField, SolveReport]:
    """Picard solve of the slab problem (full or reduced form).

    With ``reduced=True`` the lateral inflow moves into the volumetric
    source q_over_v - (q+(x)+q-(x))/h and the lateral boundary becomes
    no-flow, which makes the solution independent of y.
    """
    rhs = slab_rhs(m, q_plus, q_minus, float(q_over_v), reduced)
    fixed = dirichlet_nodes(m)
    constraints = [(int(i), 0.0) for i in fixed]
    lin_tol = max(1e-13, min(1e-11, tol * 1e-3))
    norm_rhs = max(float(np.linalg.norm(rhs)), 1e-300)

    def solve_frozen(z):
        K = slab_frozen_matrix(m, p, z, flavor)
        A_c, b_c = apply_constraints(K, rhs, constraints)
        return _solve_spd(A_c, b_c, lin_tol)

    def residual(z):
        r = slab_frozen_matrix(m, p, z, flavor) @ z - rhs
        r[fixed] = 0.0
        return float(np.linalg.norm(r)) / norm_rhs

    z0 = solve_frozen(np.zeros(m.num_nodes))
    z, report = _picard(solve_frozen, residual, z0, tol, theta, max_iter)
    return ScalarField(z, m), report


def _forchheimer_potential(g, alpha: float, beta: float):
    """Antiderivative int_0^g s * fbeta_iso(s) ds, closed form."""
    g = np.asarray(g, dtype=float)
    if beta == 0.0:
        return 0.5 * g * g / alpha
    u = np.sqrt(alpha * alpha + 4.0 * beta * g)
    bracket = u ** 3 / 3.0 - alpha * u * u / 2.0
    bracket0 = alpha ** 3 / 3.0 - alpha ** 3 / 2.0  # at g = 0
    return (bracket - bracket0) / (4.0 * beta * beta)


def pss_energy(m: Mesh, p: FlowParams, W, Q: float,
               aperture: float | None = None) -> float:
    """Variational energy of the coupled state at rate Q.

    Half the bulk Darcy energy plus the fracture drag potential minus the
    work of the source load; this is the convex functional the
    frozen-coefficient iteration descends, so it decreases monotonically
    along Picard iterates.
    """
    h = m.aperture if aperture is None else aperture
    w = W.values if isinstance(W, ScalarField) else np.asarray(W, dtype=float)
    A_bulk = _bulk_stiffness(m, p.k_p)
    e = 0.5 * float(w @ (A_bulk @ w))
    if h != 0.0 and len(m.fracture_edges) > 0:
        gx = fracture_edge_gradients(m, w)
        a = m.nodes[m.fracture_edges[:, 0]]
        b = m.nodes[m.fracture_edges[:, 1]]
        ell = np.linalg.norm(b - a, axis=1)
        e += h * float(np.sum(ell * _forchheimer_potential(np.abs(gx), p.alpha_f, p.beta)))
    e -= float((-assemble_B_in(m, aperture=h) * Q) @ w)
    return e
