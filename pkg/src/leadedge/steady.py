"""Stationary states: local bifurcation data, the explicit/perturbative
periodic branches, and the phase-plane shooting construction under zero-inflow
boundary conditions with constant speed.

Three constructions are provided:

* the transcritical bifurcation point and its normal form (both boundary
  conditions, any admissible speed profile),
* the periodic-domain branch for nearly constant speed c = c0 + eps*c1(x),
  built by inverting a constant-coefficient 2x2 linear ODE on periodic
  functions (closed-form matrix exponentials, composite Simpson for the
  Duhamel integrals),
* the zero-inflow branch for constant speed, reduced to a planar Hamiltonian
  system in p = u+v, q = u-v and solved by shooting on the conserved level
  E0 = q^2 + E(p).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError, ParameterError
from .model import DBC, PBC, Grid, SpeedProfile
from .operators import stationary_residual_centered

__all__ = [
    "BifurcationData", "SteadyProfile", "ShootingState",
    "bifurcation_value", "null_eigenfunction", "normal_form_coefficients",
    "full_bifurcation_data", "branch_slope",
    "pbc_constant_steady", "pbc_perturbative_steady",
    "energy_E", "E_star", "turning_points", "shooting_integral",
    "shooting_state", "dbc_shooting_steady", "dbc_shooting_path",
    "steady_envelope_bounds",
]


# ---------------------------------------------------------------------------
# data types


@dataclass
class BifurcationData:
    """Critical branching/capping ratio and normal-form data.

    For PBC the critical ratio is 1 with constant null functions; for DBC it
    is 1/|cos b0| where b0 is the smallest root of C*b + tan(b) = 0 in
    (pi/2, pi), with null pair (sin(b0*X), sin(b0*(1-X))).
    """

    bc: str
    C: float
    alpha0: float
    b0: float | None = None
    eigen_U: np.ndarray | None = None
    eigen_V: np.ndarray | None = None
    kappa1: float | None = None
    kappa2: float | None = None


@dataclass
class SteadyProfile:
    """A stationary pair on the grid with provenance.

    residual is the sup norm of a stationary operator applied to the profile;
    which operator depends on the method (documented per constructor):
    exact/analytic methods use second-order centered derivatives (constant:
    ~machine zero; perturbative: exact ODE derivatives, O(eps^2*alpha);
    shooting: O(dx^2)), while time-marched profiles record the upwind
    semi-discrete residual, driven below the march tolerance.
    m and M record the positivity envelope: bounds of u, v themselves (PBC)
    or of u/x and v/(1-x) (DBC).
    """

    u_bar: np.ndarray
    v_bar: np.ndarray
    method: str
    residual: float
    alpha: float
    E0: float | None = None
    m: float | None = None
    M: float | None = None


@dataclass(frozen=True)
class ShootingState:
    """Conserved-level data of the planar stationary system."""

    alpha: float
    c: float
    E0: float
    p0: float
    p1: float
    E_star: float


def steady_envelope_bounds(u_bar: np.ndarray, v_bar: np.ndarray, grid: Grid,
                           bc: str) -> tuple[float, float]:
    """Positivity envelope constants (m, M): direct bounds for PBC, bounds of
    u/x and v/(1-x) at the cell centers for DBC."""
    if bc == PBC:
        lo = min(float(u_bar.min()), float(v_bar.min()))
        hi = max(float(u_bar.max()), float(v_bar.max()))
        return lo, hi
    x = grid.centers()
    ru = u_bar / x
    rv = v_bar / (1.0 - x)
    return min(float(ru.min()), float(rv.min())), max(float(ru.max()), float(rv.max()))


# ---------------------------------------------------------------------------
# bifurcation point, null functions, normal form


def bifurcation_value(bc: str, C: float) -> BifurcationData:
    """Critical ratio alpha0 (and the root b0 for DBC) at transformed speed C."""
    if not C > 0.0:
        raise ParameterError("C must be positive")
    if bc == PBC:
        return BifurcationData(bc=bc, C=C, alpha0=1.0)
    if bc != DBC:
        raise ParameterError(f"unknown boundary condition {bc!r}")

    # singularity-free form of C*b + tan b = 0 on (pi/2, pi):
    # g(pi/2) = 1 > 0 and g(pi) = -C*pi < 0, so a bracket always exists.
    def g(b):
        return C * b * np.cos(b) + np.sin(b)

    b0 = brentq(g, np.pi / 2 + 1e-14, np.pi - 1e-14, xtol=1e-14, rtol=8.9e-16)
    return BifurcationData(bc=bc, C=C, alpha0=1.0 / abs(np.cos(b0)), b0=b0)


def _eigen_funcs(bif: BifurcationData):
    if bif.bc == PBC:
        return (lambda X: np.ones_like(np.asarray(X, dtype=float)),
                lambda X: np.ones_like(np.asarray(X, dtype=float)))
    b0 = bif.b0
    return (lambda X: np.sin(b0 * np.asarray(X, dtype=float)),
            lambda X: np.sin(b0 * (1.0 - np.asarray(X, dtype=float))))


def null_eigenfunction(bif: BifurcationData, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Null pair of the linearization at alpha0, sampled at the X cell centers."""
    fU, fV = _eigen_funcs(bif)
    Xc = grid.centers()
    eU, eV = fU(Xc), fV(Xc)
    bif.eigen_U, bif.eigen_V = eU, eV
    return eU, eV


def _simpson(y: np.ndarray, h: float) -> float:
    # composite Simpson on an odd-length uniform sample
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum()))


def normal_form_coefficients(bif: BifurcationData, profile: SpeedProfile,
                             n_quad: int = 4096) -> tuple[float, float]:
    """Transcritical normal-form coefficients.

    kappa1 = int(U~^2 + V~^2) / (2 int U~ V~) and
    kappa2 = alpha0 * int(beta (U~+V~)(U~^2+V~^2)) / (2 int U~ V~),
    integrated over the transformed coordinate by composite Simpson.
    Both are positive; the supercritical branch has amplitude
    (alpha - alpha0) * kappa1/kappa2.
    """
    if n_quad % 2:
        n_quad += 1
    X = np.linspace(0.0, 1.0, n_quad + 1)
    h = 1.0 / n_quad
    fU, fV = _eigen_funcs(bif)
    eU, eV = fU(X), fV(X)
    beta = profile.beta_of_X(X)
    quad_sq = _simpson(eU**2 + eV**2, h)
    quad_uv = _simpson(eU * eV, h)
    quad_cub = _simpson(beta * (eU + eV) * (eU**2 + eV**2), h)
    kappa1 = quad_sq / (2.0 * quad_uv)
    kappa2 = bif.alpha0 * quad_cub / (2.0 * quad_uv)
    bif.kappa1, bif.kappa2 = kappa1, kappa2
    return kappa1, kappa2


def full_bifurcation_data(bc: str, profile: SpeedProfile, grid: Grid,
                          n_quad: int = 4096) -> BifurcationData:
    bif = bifurcation_value(bc, profile.C)
    null_eigenfunction(bif, grid)
    normal_form_coefficients(bif, profile, n_quad)
    return bif


def branch_slope(bif: BifurcationData, profile: SpeedProfile, grid: Grid
                 ) -> tuple[np.ndarray, np.ndarray]:
    """d(u_bar, v_bar)/dalpha at the bifurcation point, in physical
    coordinates: (kappa1*C)/(kappa2*c(x)) times the null pair at X(x)."""
    if bif.kappa1 is None or bif.kappa2 is None:
        normal_form_coefficients(bif, profile)
    xc = grid.centers()
    Xc = profile.x_to_X(xc)
    fU, fV = _eigen_funcs(bif)
    factor = bif.kappa1 * profile.C / (bif.kappa2 * profile(xc))
    return factor * fU(Xc), factor * fV(Xc)


# ---------------------------------------------------------------------------
# periodic branches


def pbc_constant_steady(alpha: float, grid: Grid) -> SteadyProfile:
    """Homogeneous periodic branch u = v = (alpha-1)/2; exists for alpha > 1
    and is stationary for any constant speed."""
    if not alpha > 1.0:
        raise ParameterError("no nontrivial constant state for alpha <= 1")
    level = 0.5 * (alpha - 1.0)
    u = np.full(grid.n_cells, level)
    v = np.full(grid.n_cells, level)
    s = 1.0 + u + v
    residual = float(np.abs(alpha * v / s - u).max())
    return SteadyProfile(u_bar=u, v_bar=v, method="constant", residual=residual,
                         alpha=alpha, m=level, M=level)


def _cosh_sinhc(z: np.ndarray | float, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """cosh(mu*z) and sinh(mu*z)/mu, stable as mu -> 0."""
    if mu > 1e-6:
        return np.cosh(mu * z), np.sinh(mu * z) / mu
    w = (mu * np.asarray(z, dtype=float)) ** 2
    return 1.0 + w / 2.0 + w * w / 24.0, np.asarray(z, dtype=float) * (1.0 + w / 6.0 + w * w / 120.0)


def _perturbation_matrix(alpha: float, c0: float) -> tuple[np.ndarray, float]:
    M = np.array([[1.0 - 3.0 * alpha, alpha + 1.0],
                  [-alpha - 1.0, 3.0 * alpha - 1.0]]) / (2.0 * c0 * alpha)
    # M^2 = mu^2 * I, so exp(M x) = cosh(mu x) I + sinh(mu x)/mu * M
    mu = np.sqrt(2.0 * (alpha - 1.0) / alpha) / c0
    return M, mu


def pbc_perturbative_steady(alpha: float, c0: float, c1, dc1, eps_c: float,
                            grid: Grid, quad_refine: int = 4) -> SteadyProfile:
    """Periodic steady state for an almost constant speed c = c0 + eps_c*c1(x).

    Returns (alpha-1)*(1/2 + eps_c*u1, 1/2 + eps_c*v1) where (u1, v1) is the
    periodic solution of w' - M(alpha) w = h with h = -c1'/(2 c0) * (1,1),
    assembled from closed-form matrix exponentials and cumulative Simpson
    quadrature.  c1 and dc1 are callables (dc1 the exact derivative of c1).

    The recorded residual evaluates the stationary equations with exact
    derivatives (the ODE supplies u1', v1'), so it scales as eps_c^2 without a
    grid-resolution floor.
    """
    if not alpha > 1.0:
        raise ParameterError("perturbative branch needs alpha > 1 (M singular otherwise)")
    if not c0 > 0.0:
        raise ParameterError("c0 must be positive")
    n = grid.n_cells
    M, mu = _perturbation_matrix(alpha, c0)
    Mones = M @ np.ones(2)

    # fine grid with step 1/(4*K*n): cell centers land on even Simpson nodes
    K = max(1, quad_refine // 2)
    nf = 4 * K * n
    y = np.linspace(0.0, 1.0, nf + 1)
    hy = 1.0 / nf
    phi = -np.asarray(dc1(y), dtype=float) / (2.0 * c0)  # h(y) = phi(y)*(1,1)

    # W(y) = exp(-M y) h(y), computed componentwise from M^2 = mu^2 I
    ch, shc = _cosh_sinhc(-y, mu)
    W0 = phi * (ch + shc * Mones[0])
    W1 = phi * (ch + shc * Mones[1])

    def cum_even(f):
        pair = (hy / 3.0) * (f[:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
        out = np.empty(pair.size + 1)
        out[0] = 0.0
        np.cumsum(pair, out=out[1:])
        return out

    S0, S1 = cum_even(W0), cum_even(W1)  # values at even fine nodes

    ch1, shc1 = _cosh_sinhc(-1.0, mu)
    expM_neg1 = ch1 * np.eye(2) + shc1 * M
    try:
        Kvec = np.linalg.solve(expM_neg1 - np.eye(2), np.array([S0[-1], S1[-1]]))
    except np.linalg.LinAlgError:
        from scipy.linalg import expm  # degenerate fallback: series exponential
        Kvec = np.linalg.solve(expm(-M) - np.eye(2), np.array([S0[-1], S1[-1]]))

    xc = grid.centers()
    idx = (4 * K * np.arange(n) + 2 * K)  # fine index of each center / 2 -> even table
    Sx = np.stack([S0[idx // 2], S1[idx // 2]], axis=0)
    chx, shcx = _cosh_sinhc(xc, mu)
    inner0 = Kvec[0] + Sx[0]
    inner1 = Kvec[1] + Sx[1]
    # exp(M x) @ inner, again via cosh/sinh split
    u1 = chx * inner0 + shcx * (M[0, 0] * inner0 + M[0, 1] * inner1)
    v1 = chx * inner1 + shcx * (M[1, 0] * inner0 + M[1, 1] * inner1)

    u_bar = (alpha - 1.0) * (0.5 + eps_c * u1)
    v_bar = (alpha - 1.0) * (0.5 + eps_c * v1)

    # stationary residual with exact derivatives: w' = M w + h
    w_prime_0 = M[0, 0] * u1 + M[0, 1] * v1 + np.asarray(
        -np.asarray(dc1(xc), dtype=float) / (2.0 * c0))
    w_prime_1 = M[1, 0] * u1 + M[1, 1] * v1 + np.asarray(
        -np.asarray(dc1(xc), dtype=float) / (2.0 * c0))
    c_x = c0 + eps_c * np.asarray(c1(xc), dtype=float)
    dc_x = eps_c * np.asarray(dc1(xc), dtype=float)
    du_bar = (alpha - 1.0) * eps_c * w_prime_0
    dv_bar = (alpha - 1.0) * eps_c * w_prime_1
    s = 1.0 + u_bar + v_bar
    res_u = -(dc_x * u_bar + c_x * du_bar) + alpha * v_bar / s - u_bar
    res_v = (dc_x * v_bar + c_x * dv_bar) + alpha * u_bar / s - v_bar
    residual = max(float(np.abs(res_u).max()), float(np.abs(res_v).max()))

    m = min(float(u_bar.min()), float(v_bar.min()))
    Mcap = max(float(u_bar.max()), float(v_bar.max()))
    return SteadyProfile(u_bar=u_bar, v_bar=v_bar, method="perturbative",
                         residual=residual, alpha=alpha, m=m, M=Mcap)


# ---------------------------------------------------------------------------
# zero-inflow branch: first integral and shooting


def energy_E(p, alpha: float):
    """Potential part of the conserved level: E(p) = -p^2 + 4 a p
    - 4 a (a+1) log(1 + p/(a+1)), with E(0) = 0."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= -(alpha + 1.0)):
        raise ParameterError("energy undefined at p <= -(alpha+1)")
    out = -p * p + 4.0 * alpha * p - 4.0 * alpha * (alpha + 1.0) * np.log1p(p / (alpha + 1.0))
    return out if out.ndim else float(out)


def _dE_dp(p: float, alpha: float) -> float:
    return 2.0 * p * (alpha - 1.0 - p) / (alpha + 1.0 + p)


def E_star(alpha: float) -> float:
    """Separatrix level E(alpha-1): the stable manifold of the saddle."""
    return float((3.0 * alpha + 1.0) * (alpha - 1.0)
                 - 4.0 * alpha * (alpha + 1.0) * np.log(2.0 * alpha / (alpha + 1.0)))


def turning_points(E0: float, alpha: float) -> tuple[float, float]:
    """Entry and turning values of p: E(p0) + p0^2 = E0 and E(p1) = E0.

    Both are unique in (0, alpha-1): E + p^2 and E are strictly increasing
    there.  Requires 0 < E0 < E_star(alpha).
    """
    if not alpha > 1.0:
        raise ParameterError("turning points require alpha > 1")
    Es = E_star(alpha)
    if not 0.0 < E0 < Es:
        raise ParameterError(f"E0 must lie in (0, E_star) = (0, {Es})")
    hi = alpha - 1.0
    p0 = brentq(lambda p: energy_E(p, alpha) + p * p - E0, 0.0, hi, xtol=1e-15)
    p1 = brentq(lambda p: energy_E(p, alpha) - E0, 0.0, hi, xtol=1e-15)
    return p0, p1


def shooting_integral(E0: float, alpha: float, c: float, n_nodes: int = 4001) -> float:
    """Transit 'time' from the entry line q = -p to the symmetry line q = 0:

        I(E0) = c * int_{p0}^{p1} dp / [(1 + a/(1+p)) sqrt(E0 - E(p))].

    The square-root endpoint singularity at p1 is removed by p = p1 - s^2
    (dE/dp(p1) > 0 below the separatrix), leaving a smooth integrand for
    composite Simpson.  E0 = 0 returns the closed form
    c/sqrt(a^2-1) * (pi/2 - arcsin sqrt((a-1)/(2a))).
    """
    if not alpha > 1.0:
        raise ParameterError("shooting requires alpha > 1")
    Es = E_star(alpha)
    if E0 >= Es:
        raise ParameterError("integral diverges at and beyond the separatrix level")
    if E0 < 0.0:
        raise ParameterError("E0 must be nonnegative")
    if E0 == 0.0:
        return c / np.sqrt(alpha * alpha - 1.0) * (
            np.pi / 2.0 - np.arcsin(np.sqrt((alpha - 1.0) / (2.0 * alpha))))

    p0, p1 = turning_points(E0, alpha)
    if n_nodes % 2 == 0:
        n_nodes += 1
    s = np.linspace(0.0, np.sqrt(p1 - p0), n_nodes)
    p = p1 - s * s
    D = E0 - energy_E(p, alpha)
    g = np.empty_like(s)
    g[0] = 2.0 / ((1.0 + alpha / (1.0 + p1)) * np.sqrt(_dE_dp(p1, alpha)))
    g[1:] = 2.0 * s[1:] / ((1.0 + alpha / (1.0 + p[1:])) * np.sqrt(np.maximum(D[1:], 0.0)))
    return c * _simpson(g, s[1] - s[0])


def shooting_state(alpha: float, c: float, n_nodes: int = 4001) -> ShootingState:
    """Solve I(E0) = 1/2 for the conserved level of the zero-inflow steady
    state; requires alpha above the constant-speed bifurcation value."""
    alpha0 = bifurcation_value(DBC, c).alpha0
    if not alpha > alpha0:
        raise ParameterError(
            f"no nontrivial zero-inflow state: alpha = {alpha} <= alpha0 = {alpha0:.6f}")
    Es = E_star(alpha)

    def f(E0):
        return shooting_integral(E0, alpha, c, n_nodes) - 0.5

    lo = Es * 1e-12
    if f(lo) >= 0.0:
        # supercritically I(0) < 1/2; only fails if alpha is right at alpha0
        raise NumericalError("shooting bracket failed at the lower end")
    hi = 0.9 * Es
    for _ in range(60):
        if f(hi) > 0.0:
            break
        hi = 0.5 * (hi + Es)
    else:
        raise NumericalError("shooting bracket failed approaching the separatrix")
    E0 = brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)
    p0, p1 = turning_points(E0, alpha)
    return ShootingState(alpha=alpha, c=c, E0=E0, p0=p0, p1=p1, E_star=Es)


def _pq_rhs(p: float, q: float, alpha: float, c: float) -> tuple[float, float]:
    w = alpha / (1.0 + p)
    return -q * (1.0 + w) / c, p * (w - 1.0) / c


def _integrate_half(alpha: float, c: float, p0: float, n_steps: int
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Classical RK4 for the planar system on [0, 1/2] from (p0, -p0)."""
    h = 0.5 / n_steps
    p = np.empty(n_steps + 1)
    q = np.empty(n_steps + 1)
    p[0], q[0] = p0, -p0
    pc, qc = p0, -p0
    for k in range(n_steps):
        k1p, k1q = _pq_rhs(pc, qc, alpha, c)
        k2p, k2q = _pq_rhs(pc + 0.5 * h * k1p, qc + 0.5 * h * k1q, alpha, c)
        k3p, k3q = _pq_rhs(pc + 0.5 * h * k2p, qc + 0.5 * h * k2q, alpha, c)
        k4p, k4q = _pq_rhs(pc + h * k3p, qc + h * k3q, alpha, c)
        pc += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        qc += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        p[k + 1], q[k + 1] = pc, qc
    return p, q


def dbc_shooting_steady(alpha: float, c: float, grid: Grid, tol: float = 1e-8,
                        min_steps: int = 10000) -> SteadyProfile:
    """Zero-inflow steady state for constant speed by shooting.

    Integrates the planar system over [0, 1/2] from (p0, -p0) at the level
    E0 solving I(E0) = 1/2, extends by the symmetry p(x) = p(1-x),
    q(x) = -q(1-x), and returns u = (p+q)/2, v = (p-q)/2 at the cell centers.
    Validates |q(1/2)| < tol and the conserved-level drift along the path.
    """
    state = shooting_state(alpha, c)
    n = grid.n_cells
    # step chosen so every cell center below 1/2 is an integration node
    K = max(1, -(-min_steps // n))  # ceil
    n_steps = K * n
    p_path, q_path = _integrate_half(alpha, c, state.p0, n_steps)

    drift = np.abs(q_path**2 + energy_E(p_path, alpha) - state.E0).max()
    if drift > tol:
        raise NumericalError(f"first-integral drift {drift:.3e} exceeds tol {tol:.1e}")
    if abs(q_path[-1]) > tol:
        raise NumericalError(
            f"|q(1/2)| = {abs(q_path[-1]):.3e} exceeds tol {tol:.1e}; "
            f"E0 root or quadrature too loose")

    i = np.arange(n)
    node = (2 * i + 1) * K  # index of center (i+1/2)/n on the half-interval path
    left = node <= n_steps
    p = np.empty(n)
    q = np.empty(n)
    p[left] = p_path[node[left]]
    q[left] = q_path[node[left]]
    mirror = n - 1 - i[~left]
    p[~left] = p[mirror]
    q[~left] = -q[mirror]

    u_bar = 0.5 * (p + q)
    v_bar = 0.5 * (p - q)
    u_bar = np.maximum(u_bar, 0.0)
    v_bar = np.maximum(v_bar, 0.0)

    from .model import ConstantSpeed, build_speed_profile
    profile = build_speed_profile(ConstantSpeed(c), n_quad=64)
    residual = stationary_residual_centered(u_bar, v_bar, profile, grid, alpha, DBC)
    m, Mcap = steady_envelope_bounds(u_bar, v_bar, grid, DBC)
    return SteadyProfile(u_bar=u_bar, v_bar=v_bar, method="shooting",
                         residual=residual, alpha=alpha, E0=state.E0, m=m, M=Mcap)


def dbc_shooting_path(alpha: float, c: float, n_half: int = 10000
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense (x, p, q) samples of the shooting solution over the full [0, 1],
    endpoints included; u(0) = (p+q)(0)/2 = 0 holds exactly by construction."""
    state = shooting_state(alpha, c)
    p_half, q_half = _integrate_half(alpha, c, state.p0, n_half)
    x = np.linspace(0.0, 1.0, 2 * n_half + 1)
    p = np.concatenate([p_half, p_half[-2::-1]])
    q = np.concatenate([q_half, -q_half[-2::-1]])
    return x, p, q
