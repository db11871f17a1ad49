"""Uniform-grid discretization of -div(A(x) grad v) on an interval or rectangle.

Homogeneous Dirichlet conditions, diagonal coefficient tensor, 3-point (1D) or
5-point (2D) flux-form stencil with arithmetic-mean face coefficients.  The
assembled matrix over interior nodes is a symmetric M-matrix, so the discrete
maximum principle holds: nonnegative data give nonnegative solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .errors import (
    BoundaryViolation,
    ConfigError,
    EllipticityError,
    InvalidWeight,
    NoConvergence,
)


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on (x0, x1) or (x0, x1) x (y0, y1).

    ``nx``/``ny`` count cells per axis; nodes per axis are one more.  Nodal
    arrays are indexed [i] in 1D and [j, i] in 2D (rows sweep y), so flattened
    node order is row-major by y then x.
    """

    dim: int
    x0: float
    x1: float
    nx: int
    y0: float | None = None
    y1: float | None = None
    ny: int | None = None

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def h_max(self) -> float:
        return self.hx if self.dim == 1 else max(self.hx, self.hy)

    @property
    def cell_volume(self) -> float:
        return self.hx if self.dim == 1 else self.hx * self.hy

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx + 1)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny + 1)

    @property
    def node_shape(self) -> tuple[int, ...]:
        if self.dim == 1:
            return (self.nx + 1,)
        return (self.ny + 1, self.nx + 1)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.node_shape))

    @property
    def interior_shape(self) -> tuple[int, ...]:
        if self.dim == 1:
            return (self.nx - 1,)
        return (self.ny - 1, self.nx - 1)

    @property
    def n_interior(self) -> int:
        return int(np.prod(self.interior_shape))

    def interior_slice(self):
        if self.dim == 1:
            return slice(1, self.nx)
        return (slice(1, self.ny), slice(1, self.nx))

    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.node_shape, dtype=bool)
        mask[self.interior_slice()] = False
        return mask

    def node_coordinates(self) -> tuple[np.ndarray, ...]:
        """Nodal coordinate arrays with the same shape as nodal value arrays."""
        if self.dim == 1:
            return (self.xs,)
        x, y = np.meshgrid(self.xs, self.ys)
        return (x, y)


def build_grid(
    dim: int,
    x_extent: tuple[float, float] = (0.0, 1.0),
    n_cells: int = 128,
    y_extent: tuple[float, float] | None = None,
    n_cells_y: int | None = None,
) -> Grid:
    """Uniform grid; node coordinates are a pure function of the arguments."""
    if dim not in (1, 2):
        raise ConfigError("domain.dim must be 1 or 2")
    x0, x1 = float(x_extent[0]), float(x_extent[1])
    if not x1 > x0:
        raise ConfigError("domain x extent is degenerate (need x1 > x0)")
    if n_cells < 4:
        raise ConfigError("domain.n_cells must be at least 4 per axis")
    if dim == 1:
        return Grid(dim=1, x0=x0, x1=x1, nx=int(n_cells))
    y_extent = y_extent if y_extent is not None else x_extent
    ny = int(n_cells_y) if n_cells_y is not None else int(n_cells)
    y0, y1 = float(y_extent[0]), float(y_extent[1])
    if not y1 > y0:
        raise ConfigError("domain y extent is degenerate (need y1 > y0)")
    if ny < 4:
        raise ConfigError("domain.n_cells must be at least 4 per axis")
    return Grid(dim=2, x0=x0, x1=x1, nx=int(n_cells), y0=y0, y1=y1, ny=ny)


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Diagonal coefficient tensor sampled at nodes.

    ``a1`` multiplies the x-derivative flux, ``a2`` (2D only) the y-derivative
    flux.  [alpha, beta] is the declared ellipticity window; every nodal value
    must lie inside it.
    """

    grid: Grid
    a1: np.ndarray
    a2: np.ndarray | None = None
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a1", np.asarray(self.a1, dtype=float))
        if self.grid.dim == 2:
            if self.a2 is None:
                object.__setattr__(self, "a2", self.a1)
            else:
                object.__setattr__(self, "a2", np.asarray(self.a2, dtype=float))
        if self.a1.shape != self.grid.node_shape:
            raise EllipticityError("coefficient array shape does not match grid")
        if self.grid.dim == 2 and self.a2.shape != self.grid.node_shape:
            raise EllipticityError("coefficient array shape does not match grid")
        lo = float(min(self.a1.min(), self.a2.min() if self.a2 is not None else np.inf))
        hi = float(max(self.a1.max(), self.a2.max() if self.a2 is not None else -np.inf))
        alpha = self.alpha if self.alpha > 0 else lo
        beta = self.beta if self.beta > 0 else hi
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "beta", float(beta))
        if not (0 < self.alpha <= self.beta):
            raise EllipticityError(
                f"ellipticity window [{self.alpha:g}, {self.beta:g}] is invalid"
            )
        if lo < self.alpha or hi > self.beta:
            raise EllipticityError(
                f"nodal coefficient range [{lo:g}, {hi:g}] leaves "
                f"[{self.alpha:g}, {self.beta:g}]"
            )


def constant_field(grid: Grid, value: float = 1.0) -> CoefficientField:
    a = np.full(grid.node_shape, float(value))
    return CoefficientField(grid=grid, a1=a, a2=a if grid.dim == 2 else None)


def ramp_field(
    grid: Grid, base: float = 1.0, slope_x: float = 0.0, slope_y: float = 0.0
) -> CoefficientField:
    """a1 = base + slope_x * x, a2 = base + slope_y * y."""
    coords = grid.node_coordinates()
    a1 = base + slope_x * coords[0]
    a2 = base + slope_y * coords[1] if grid.dim == 2 else None
    return CoefficientField(grid=grid, a1=a1, a2=a2)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on a grid; Dirichlet outputs carry exact zeros on the rim."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=float).reshape(self.grid.node_shape)
        )

    @classmethod
    def from_interior(cls, grid: Grid, interior: np.ndarray) -> "GridFunction":
        vals = np.zeros(grid.node_shape)
        vals[grid.interior_slice()] = np.asarray(interior, dtype=float).reshape(
            grid.interior_shape
        )
        return cls(grid=grid, values=vals)

    @classmethod
    def zero(cls, grid: Grid) -> "GridFunction":
        return cls(grid=grid, values=np.zeros(grid.node_shape))

    def interior(self) -> np.ndarray:
        """Flat interior vector in row-major (y then x) order."""
        return self.values[self.grid.interior_slice()].ravel()

    def boundary_values(self) -> np.ndarray:
        return self.values[self.grid.boundary_mask()]

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(grid=self.grid, values=c * self.values)


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    """Datum and coefficients for -div(A grad v) = lambda_scale * f, v = 0 on the rim."""

    grid: Grid
    field: CoefficientField
    f: GridFunction
    lambda_scale: float = 1.0

    def __post_init__(self):
        if self.field.grid is not self.grid and self.field.grid != self.grid:
            raise ConfigError("coefficient field grid does not match problem grid")
        if self.f.grid is not self.grid and self.f.grid != self.grid:
            raise ConfigError("data grid does not match problem grid")
        if np.any(self.f.values < 0):
            raise InvalidWeight("data f must be nonnegative at every node")
        if not self.lambda_scale > 0:
            raise ConfigError("data.lambda_scale must be positive")

    def rhs(self) -> GridFunction:
        return self.f.scaled(self.lambda_scale)


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Interior-node matrix for -div(A grad .) plus face data for energy sums.

    ``matrix`` is CSR over interior nodes in row-major order.  The face
    coefficient arrays retain the arithmetic means used in assembly so the
    energy of a function can be recomputed directly from differences,
    independently of the matrix.
    """

    grid: Grid
    matrix: sp.csr_matrix
    face_x: np.ndarray
    face_y: np.ndarray | None = None

    def apply_interior(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def quadratic_form(self, u: GridFunction) -> float:
        """u . A_h u . cellvol, the discrete energy (matrix route)."""
        v = u.interior()
        return float(v @ (self.matrix @ v)) * self.grid.cell_volume

    def energy_pairing(self, w: GridFunction, phi: GridFunction) -> float:
        """phi . A_h w . cellvol; equals the face-sum pairing for zero-boundary w."""
        return float(phi.interior() @ (self.matrix @ w.interior())) * self.grid.cell_volume

    def face_energy(self, u: GridFunction) -> float:
        """Sum over faces of a_face (difference quotient)^2 cellvol (direct route)."""
        g = self.grid
        v = u.values
        if g.dim == 1:
            d = np.diff(v) / g.hx
            return float(np.sum(self.face_x * d * d) * g.hx)
        dx = np.diff(v, axis=1) / g.hx
        dy = np.diff(v, axis=0) / g.hy
        total = np.sum(self.face_x * dx * dx) + np.sum(self.face_y * dy * dy)
        return float(total * g.cell_volume)


def assemble_operator(grid: Grid, field: CoefficientField) -> SparseOperator:
    """Flux-form stencil with arithmetic-mean face coefficients, Dirichlet rows
    eliminated.  Result is symmetric with M-matrix sign pattern."""
    if field.grid != grid:
        raise EllipticityError("coefficient field grid does not match")
    # re-scan [alpha, beta] in case the field was built with stale bounds
    lo = float(min(field.a1.min(), field.a2.min() if field.a2 is not None else np.inf))
    hi = float(max(field.a1.max(), field.a2.max() if field.a2 is not None else -np.inf))
    if lo < field.alpha or hi > field.beta:
        raise EllipticityError(
            f"nodal coefficient range [{lo:g}, {hi:g}] leaves "
            f"[{field.alpha:g}, {field.beta:g}]"
        )

    if grid.dim == 1:
        n = grid.nx - 1
        face = 0.5 * (field.a1[:-1] + field.a1[1:])  # face j sits between nodes j, j+1
        inv_h2 = 1.0 / grid.hx**2
        west = face[:-1] * inv_h2
        east = face[1:] * inv_h2
        diag = west + east
        mat = sp.diags(
            [-west[1:], diag, -east[:-1]], offsets=[-1, 0, 1], format="csr"
        )
        return SparseOperator(grid=grid, matrix=mat, face_x=face)

    nx, ny = grid.nx, grid.ny
    face_x = 0.5 * (field.a1[:, :-1] + field.a1[:, 1:])  # shape (ny+1, nx)
    face_y = 0.5 * (field.a2[:-1, :] + field.a2[1:, :])  # shape (ny, nx+1)
    inv_hx2 = 1.0 / grid.hx**2
    inv_hy2 = 1.0 / grid.hy**2

    jj, ii = np.meshgrid(np.arange(1, ny), np.arange(1, nx), indexing="ij")
    k = (jj - 1) * (nx - 1) + (ii - 1)  # interior flat index, row-major by y

    west = face_x[jj, ii - 1] * inv_hx2
    east = face_x[jj, ii] * inv_hx2
    south = face_y[jj - 1, ii] * inv_hy2
    north = face_y[jj, ii] * inv_hy2
    diag = west + east + south + north

    rows = [k.ravel()]
    cols = [k.ravel()]
    vals = [diag.ravel()]
    neighbor = [
        (ii > 1, k - 1, west),
        (ii < nx - 1, k + 1, east),
        (jj > 1, k - (nx - 1), south),
        (jj < ny - 1, k + (nx - 1), north),
    ]
    for keep, col, val in neighbor:
        m = keep.ravel()
        rows.append(k.ravel()[m])
        cols.append(col.ravel()[m])
        vals.append(-val.ravel()[m])
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.n_interior, grid.n_interior),
    ).tocsr()
    return SparseOperator(grid=grid, matrix=mat, face_x=face_x, face_y=face_y)


def solve_linear(
    op: SparseOperator,
    rhs: GridFunction,
    tol: float,
    max_iter: int | None = None,
    jacobi: bool = False,
) -> GridFunction:
    """Conjugate gradient from a zero start to relative residual <= tol."""
    if tol <= 0:
        raise ConfigError("solver.tol_linear must be positive")
    b = rhs.interior()
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return GridFunction.zero(op.grid)
    n = op.grid.n_interior
    cap = max_iter if max_iter is not None else 10 * n
    M = None
    if jacobi:
        M = sp.diags(1.0 / op.matrix.diagonal())
    x, info = cg(op.matrix, b, x0=np.zeros(n), rtol=tol, atol=0.0, maxiter=cap, M=M)
    if info != 0:
        raise NoConvergence(
            f"conjugate gradient did not reach tol={tol} within {cap} iterations"
        )
    rel = float(np.linalg.norm(op.matrix @ x - b)) / norm_b
    if rel > 10 * tol:
        raise NoConvergence(
            f"conjugate gradient returned residual {rel:.3e} above tol={tol}"
        )
    return GridFunction.from_interior(op.grid, x)


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


def h1_seminorm(u: GridFunction) -> float:
    """Discrete gradient l2 norm: forward differences weighted by cell volume."""
    g = u.grid
    v = u.values
    if g.dim == 1:
        d = np.diff(v) / g.hx
        return float(np.sqrt(np.sum(d * d) * g.hx))
    dx = np.diff(v, axis=1) / g.hx
    dy = np.diff(v, axis=0) / g.hy
    return float(np.sqrt((np.sum(dx * dx) + np.sum(dy * dy)) * g.cell_volume))


def l2_norm(u: GridFunction) -> float:
    return float(np.sqrt(np.sum(u.values**2) * u.grid.cell_volume))


def h1_norm(u: GridFunction) -> float:
    return float(np.hypot(l2_norm(u), h1_seminorm(u)))


def measure_above(u: GridFunction, M: float) -> float:
    """Volume carried by nodes where the value reaches M."""
    return float(np.count_nonzero(u.values >= M) * u.grid.cell_volume)


def require_zero_boundary(u: GridFunction, what: str = "function") -> None:
    if np.any(u.boundary_values() != 0.0):
        raise BoundaryViolation(f"{what} must vanish on the boundary")


# ---------------------------------------------------------------------------
# GridFunction CSV: header x,value (1D) or x,y,value (2D), rows sweep y then x
# ---------------------------------------------------------------------------


def gridfunction_to_csv(u: GridFunction, comment: str | None = None) -> str:
    g = u.grid
    lines = []
    if comment is not None:
        lines.append(f"# {comment}")
    if g.dim == 1:
        lines.append("x,value")
        for x, val in zip(g.xs, u.values):
            lines.append(f"{x:.16e},{val:.16e}")
    else:
        lines.append("x,y,value")
        xs, ys = g.xs, g.ys
        for j in range(g.ny + 1):
            for i in range(g.nx + 1):
                lines.append(f"{xs[i]:.16e},{ys[j]:.16e},{u.values[j, i]:.16e}")
    return "\n".join(lines) + "\n"


def write_gridfunction_csv(u: GridFunction, path: str, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(gridfunction_to_csv(u, comment))


def read_gridfunction_csv(path: str, grid: Grid) -> GridFunction:
    """Load nodal values written by gridfunction_to_csv onto ``grid``.

    Row count and column count must match; coordinates are checked loosely
    (within half a cell) to catch files from a different grid.
    """
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line[0].isalpha():  # header
                continue
            rows.append([float(tok) for tok in line.split(",")])
    data = np.asarray(rows, dtype=float)
    want_cols = 2 if grid.dim == 1 else 3
    if data.ndim != 2 or data.shape[1] != want_cols:
        raise ConfigError(f"data.file: expected {want_cols} columns in {path}")
    if data.shape[0] != grid.n_nodes:
        raise ConfigError(
            f"data.file: {path} has {data.shape[0]} rows, grid needs {grid.n_nodes}"
        )
    coords = grid.node_coordinates()
    tol = 0.5 * grid.h_max
    if grid.dim == 1:
        if np.max(np.abs(data[:, 0] - coords[0])) > tol:
            raise ConfigError(f"data.file: node coordinates in {path} do not match grid")
        vals = data[:, 1]
    else:
        x_flat = coords[0].ravel()
        y_flat = coords[1].ravel()
        if (
            np.max(np.abs(data[:, 0] - x_flat)) > tol
            or np.max(np.abs(data[:, 1] - y_flat)) > tol
        ):
            raise ConfigError(f"data.file: node coordinates in {path} do not match grid")
        vals = data[:, 2]
    return GridFunction(grid=grid, values=vals.reshape(grid.node_shape))
