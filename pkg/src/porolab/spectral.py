"""First weighted eigenvalue of -div(A grad phi) = lambda f phi.

Inverse power iteration on the pencil (A_h, diag(f)): each step solves one
linear system with conjugate gradients and renormalizes in the f-weighted
l2 inner product.  Only the smallest eigenvalue is needed, so no shifts.
A zero of f at some nodes leaves the iteration well-posed because A_h is
positive definite; f identically zero is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import cg

from .errors import DegenerateWeight, InvalidWeight, NoConvergence
from .elliptic import GridFunction, SparseOperator


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Principal eigenvalue with its positive, f-normalized eigenfunction.

    ``residual`` is ||A_h phi - lambda w phi||_2 / ||A_h phi||_2 on interior
    nodes; ``rayleigh`` re-evaluates the quotient on the returned iterate as an
    independent consistency value.
    """

    lambda1: float
    phi1: GridFunction
    residual: float
    rayleigh: float
    iterations: int
    sup_phi1: float


def _weight_vector(op: SparseOperator, f: GridFunction) -> np.ndarray:
    if f.grid != op.grid:
        raise InvalidWeight("weight grid does not match operator grid")
    w = f.interior()
    if np.any(w < 0):
        raise InvalidWeight("weight f must be nonnegative")
    if not np.any(w > 0):
        raise InvalidWeight("weight f must not vanish identically")
    return w


def rayleigh_quotient(op: SparseOperator, f: GridFunction, w: GridFunction) -> float:
    """Discrete Rayleigh quotient: energy of w over its f-weighted mass."""
    if np.any(f.values < 0):
        raise InvalidWeight("weight f must be nonnegative")
    vol = op.grid.cell_volume
    wi = w.interior()
    den = float(np.sum(f.interior() * wi * wi)) * vol
    if den <= 0.0:
        raise DegenerateWeight("f-weighted mass of the trial function is zero")
    num = float(wi @ (op.matrix @ wi)) * vol
    return num / den


def principal_eigenpair(
    op: SparseOperator,
    f: GridFunction,
    tol: float,
    inner_tol: float | None = None,
    max_iter: int = 500,
    max_linear_iter: int | None = None,
) -> EigenPair:
    """Smallest eigenvalue of A_h phi = lambda diag(f) phi with phi > 0.

    Starts from the all-ones interior vector (never orthogonal to the
    principal eigenfunction, which has one sign); stops when successive
    eigenvalue estimates agree to tol relatively.
    """
    if tol <= 0:
        raise InvalidWeight("solver.tol_eig must be positive")
    w = _weight_vector(op, f)
    vol = op.grid.cell_volume
    n = op.grid.n_interior
    cap = max_linear_iter if max_linear_iter is not None else 10 * n
    itol = inner_tol if inner_tol is not None else min(1e-12, tol * 1e-2)

    phi = np.ones(n)
    phi /= np.sqrt(float(np.sum(w * phi * phi)) * vol)
    lam = float(phi @ (op.matrix @ phi)) / float(np.sum(w * phi * phi))

    for k in range(1, max_iter + 1):
        rhs = w * phi
        z, info = cg(op.matrix, rhs, x0=phi / lam, rtol=itol, atol=0.0, maxiter=cap)
        if info != 0:
            raise NoConvergence(
                f"inner conjugate gradient failed at eigen iteration {k}"
            )
        if z[np.argmax(np.abs(z))] < 0:
            z = -z
        mass = float(np.sum(w * z * z))
        if mass <= 0.0:
            raise NoConvergence("eigen iterate lost its f-weighted mass")
        lam_new = float(z @ (op.matrix @ z)) / mass
        phi = z / np.sqrt(mass * vol)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    else:
        raise NoConvergence(
            f"eigen iteration did not converge in {max_iter} steps (tol={tol})"
        )

    a_phi = op.matrix @ phi
    residual = float(np.linalg.norm(a_phi - lam * w * phi)) / float(
        np.linalg.norm(a_phi)
    )
    phi_gf = GridFunction.from_interior(op.grid, phi)
    ray = rayleigh_quotient(op, f, phi_gf)
    return EigenPair(
        lambda1=lam,
        phi1=phi_gf,
        residual=residual,
        rayleigh=ray,
        iterations=k,
        sup_phi1=float(np.max(np.abs(phi))),
    )
