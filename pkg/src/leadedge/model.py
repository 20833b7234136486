"""Model parameters, lateral-flow speed profiles, and the speed-normalizing
coordinate change.

The physical domain is the unit interval with a prescribed positive speed
c(x).  All solvers work either on a uniform cell-centered grid in x or, for
the characteristics scheme, on the uniform grid in the stretched coordinate
X(x) = C * integral_0^x dxi/c(xi), where 1/C = integral_0^1 dx/c(x).  In the
X coordinate both families are transported with the constant speed C, and
densities transform as U = c*u/C, V = c*v/C.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, ProfileError

PBC = "PBC"
DBC = "DBC"
_BC_KINDS = (PBC, DBC)


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class DimensionalParams:
    """Raw biophysical rates before scaling.

    kappa_br, kappa_cap are the branching/capping rate constants (1/time),
    c_rec the recruitment rate of the branching agent (density/time), a0 its
    equilibrium density, L the leading-edge length, and c_dim the dimensional
    lateral-flow speed profile defined on arclength [0, L] (length/time).
    """

    kappa_br: float
    kappa_cap: float
    c_rec: float
    a0: float
    L: float
    c_dim: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        for name in ("kappa_br", "kappa_cap", "c_rec", "a0", "L"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameters of the reaction-transport system."""

    alpha: float
    bc: str = PBC
    epsilon: float | None = None

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ParameterError("alpha must be nonnegative")
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ParameterError("epsilon, when given, must be positive")
        if self.bc not in _BC_KINDS:
            raise ParameterError(f"bc must be one of {_BC_KINDS}, got {self.bc!r}")


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [0,1]: centers x_i = (i+1/2)/n."""

    n_cells: int

    def __post_init__(self):
        if self.n_cells < 8:
            raise ParameterError("grid needs at least 8 cells")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class FieldState:
    """Grid samples of both end densities (and optionally the agent density a)
    at one time.  `coords` records whether values live on the physical x-grid
    or the transformed X-grid."""

    t: float
    u: np.ndarray
    v: np.ndarray
    a: np.ndarray | None = None
    coords: str = "x"

    def __post_init__(self):
        if self.u.shape != self.v.shape:
            raise ParameterError("u and v must have equal length")
        if self.a is not None and self.a.shape != self.u.shape:
            raise ParameterError("a must have the same length as u, v")

    def validate(self, tol: float = 0.0) -> None:
        if self.u.min() < -tol or self.v.min() < -tol:
            raise ParameterError("densities must be nonnegative")
        if self.a is not None and (self.a.min() <= 0.0 or self.a.max() > 1.0):
            raise ParameterError("a must lie in (0, 1]")

    def sup(self) -> float:
        return max(float(self.u.max(initial=0.0)), float(self.v.max(initial=0.0)))


# ---------------------------------------------------------------------------
# speed profile specs


@dataclass(frozen=True)
class ConstantSpeed:
    value: float


@dataclass(frozen=True)
class CosineSpeed:
    """c(x) = c0 + amplitude * cos(2*pi*frequency*x); 1-periodic by design."""

    c0: float
    amplitude: float
    frequency: int = 1


@dataclass(frozen=True)
class TabulatedSpeed:
    """Piecewise-linear c through sample points (x must cover [0,1])."""

    x: tuple[float, ...]
    c: tuple[float, ...]


ProfileSpec = ConstantSpeed | CosineSpeed | TabulatedSpeed


@dataclass(frozen=True)
class SpeedProfile:
    """Lateral-flow speed c(x) with its harmonic-mean speed C and the
    coordinate map x <-> X.

    The map is stored as a cumulative quadrature table and interpolated
    linearly in both directions; the table is normalized so that X(1) = 1
    exactly.  beta(x) = C/c(x) is the local density weight appearing in the
    transformed reaction term.
    """

    kind: str
    c_func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    c_min: float
    c_max: float
    C: float
    x_table: np.ndarray = field(repr=False)
    X_table: np.ndarray = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.c_func(np.asarray(x, dtype=float)))

    def x_to_X(self, x) -> np.ndarray:
        return np.interp(x, self.x_table, self.X_table)

    def X_to_x(self, X) -> np.ndarray:
        return np.interp(X, self.X_table, self.x_table)

    def beta(self, x) -> np.ndarray:
        return self.C / self(x)

    def beta_of_X(self, X) -> np.ndarray:
        return self.C / self(self.X_to_x(X))

    @property
    def is_periodic(self) -> bool:
        c0, c1 = float(self(0.0)), float(self(1.0))
        return abs(c0 - c1) <= 1e-12 * max(c0, c1)


def _spec_to_callable(spec: ProfileSpec) -> tuple[str, Callable]:
    if isinstance(spec, ConstantSpeed):
        if not spec.value > 0.0:
            raise ProfileError("constant speed must be positive")
        return "constant", lambda x: np.full_like(np.asarray(x, dtype=float), spec.value)
    if isinstance(spec, CosineSpeed):
        c0, amp, freq = spec.c0, spec.amplitude, spec.frequency
        if not c0 - abs(amp) > 0.0:
            raise ProfileError("cosine speed must stay positive: need c0 > |amplitude|")
        return "cosine", lambda x: c0 + amp * np.cos(2.0 * np.pi * freq * np.asarray(x, dtype=float))
    if isinstance(spec, TabulatedSpeed):
        xs = np.asarray(spec.x, dtype=float)
        cs = np.asarray(spec.c, dtype=float)
        if xs.ndim != 1 or xs.shape != cs.shape or xs.size < 2:
            raise ProfileError("tabulated speed needs matching 1d x and c arrays")
        if np.any(np.diff(xs) <= 0.0):
            raise ProfileError("tabulated x samples must be strictly increasing")
        if xs[0] > 0.0 or xs[-1] < 1.0:
            raise ProfileError("tabulated x samples must cover [0, 1]")
        if cs.min() <= 0.0:
            raise ProfileError("tabulated speed values must be positive")
        # linear interpolation keeps values between samples, but guard anyway
        floor = cs.min() / 2.0
        probe = np.interp(np.linspace(0.0, 1.0, 1001), xs, cs)
        if probe.min() < floor:
            raise ProfileError("interpolated speed drops below half the declared minimum")
        return "tabulated", lambda x: np.interp(np.asarray(x, dtype=float), xs, cs)
    raise ProfileError(f"unknown profile spec {spec!r}")


def _cumulative_simpson_even(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative composite-Simpson integral of samples f (even interval
    count); returns values at the even-index nodes, starting from 0."""
    pair = (h / 3.0) * (f[:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    out = np.empty(pair.size + 1)
    out[0] = 0.0
    np.cumsum(pair, out=out[1:])
    return out


def _build_from_callable(kind: str, c_func: Callable, n_quad: int) -> SpeedProfile:
    if n_quad % 2:
        n_quad += 1
    xs = np.linspace(0.0, 1.0, n_quad + 1)
    cs = np.asarray(c_func(xs), dtype=float)
    if cs.min() <= 0.0:
        raise ProfileError("speed must be positive on [0, 1]")
    inv_cum = _cumulative_simpson_even(1.0 / cs, 1.0 / n_quad)
    total = inv_cum[-1]  # = 1/C
    X_table = inv_cum / total  # normalized: X(1) = 1 exactly
    return SpeedProfile(
        kind=kind,
        c_func=c_func,
        c_min=float(cs.min()),
        c_max=float(cs.max()),
        C=1.0 / total,
        x_table=xs[::2],
        X_table=X_table,
    )


def build_speed_profile(spec: ProfileSpec, n_quad: int = 4096) -> SpeedProfile:
    """Build a SpeedProfile from a spec, computing C and the x->X table by
    composite Simpson quadrature of 1/c on a fine grid of n_quad intervals."""
    kind, c_func = _spec_to_callable(spec)
    return _build_from_callable(kind, c_func, n_quad)


def constant_profile(value: float = 1.0, n_quad: int = 4096) -> SpeedProfile:
    return build_speed_profile(ConstantSpeed(value), n_quad)


# ---------------------------------------------------------------------------
# nondimensionalization


def nondimensionalize(dim: DimensionalParams, bc: str = PBC, n_quad: int = 4096
                      ) -> tuple[ModelParams, SpeedProfile]:
    """Scale raw rates to the dimensionless system.

    alpha = kappa_br/kappa_cap, epsilon = kappa_cap*a0/c_rec, and the speed
    becomes c(x) = c_dim(x*L)/(L*kappa_cap) on [0, 1].
    """
    params = ModelParams(
        alpha=dim.kappa_br / dim.kappa_cap,
        bc=bc,
        epsilon=dim.kappa_cap * dim.a0 / dim.c_rec,
    )
    scale = dim.L * dim.kappa_cap
    c_dim, L = dim.c_dim, dim.L
    profile = _build_from_callable(
        "scaled", lambda x: np.asarray(c_dim(np.asarray(x, dtype=float) * L)) / scale, n_quad
    )
    return params, profile


# ---------------------------------------------------------------------------
# coordinate transform of grid states


def _interp_with_ghosts(xq: np.ndarray, centers: np.ndarray, values: np.ndarray,
                        periodic: bool) -> np.ndarray:
    """Linear interpolation of cell values to query points, extending by one
    ghost cell on each side (wrapped for periodic data, linearly extrapolated
    otherwise)."""
    dx = centers[1] - centers[0]
    xg = np.concatenate(([centers[0] - dx], centers, [centers[-1] + dx]))
    if periodic:
        vg = np.concatenate(([values[-1]], values, [values[0]]))
    else:
        lo = 2.0 * values[0] - values[1]
        hi = 2.0 * values[-1] - values[-2]
        vg = np.concatenate(([lo], values, [hi]))
    return np.interp(xq, xg, vg)


def transform_state(state: FieldState, profile: SpeedProfile, grid: Grid,
                    bc: str = PBC) -> FieldState:
    """Map a physical-grid state (u, v) to (U, V) on the uniform X-grid,
    U = c*u/C sampled at the X cell centers."""
    if state.coords != "x":
        raise ParameterError("state is already in transformed coordinates")
    Xc = grid.centers()
    xq = profile.X_to_x(Xc)
    cq = profile(xq)
    periodic = bc == PBC
    u_q = _interp_with_ghosts(xq, grid.centers(), state.u, periodic)
    v_q = _interp_with_ghosts(xq, grid.centers(), state.v, periodic)
    return FieldState(t=state.t, u=cq * u_q / profile.C, v=cq * v_q / profile.C,
                      coords="X")


def inverse_transform_state(state: FieldState, profile: SpeedProfile, grid: Grid,
                            bc: str = PBC) -> FieldState:
    """Map a transformed-grid state (U, V) back to (u, v) on the x-grid."""
    if state.coords != "X":
        raise ParameterError("state is not in transformed coordinates")
    xc = grid.centers()
    Xq = profile.x_to_X(xc)
    periodic = bc == PBC
    U_q = _interp_with_ghosts(Xq, grid.centers(), state.u, periodic)
    V_q = _interp_with_ghosts(Xq, grid.centers(), state.v, periodic)
    c = profile(xc)
    return FieldState(t=state.t, u=profile.C * U_q / c, v=profile.C * V_q / c,
                      coords="x")
