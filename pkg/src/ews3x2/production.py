"""Explicit production technologies and the nonlinear equilibrium oracle.

Three cost-function families per sector: Cobb-Douglas, single-elasticity CES,
and two-level CES with a chosen factor pair nested inside (land-capital by
default). The nested family is the only one that can make a factor pair
Allen complements; nesting land with capital is what pushes the EWS-ratio
vector into quadrant IV.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExhaustedRejection, NonConvergence, Specialization
from .model import Economy, K, L, T, ews_matrix, validate_economy
from .statics import solve_partial_pivot


@dataclass(frozen=True)
class CobbDouglas:
    """c(w) = scale * prod_i w_i^alpha[i], alpha on the simplex."""

    alpha: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.array(self.alpha, dtype=float))

    def unit_cost(self, w):
        w = np.asarray(w, dtype=float)
        c = self.scale * float(np.prod(w ** self.alpha))
        return c, self.alpha * c / w

    def aes(self, w):
        _, a = self.unit_cost(w)
        return _fill_aes_diagonal(np.ones((3, 3)), self._shares(w, a))

    def _shares(self, w, a):
        c = float(a @ np.asarray(w, dtype=float))
        return a * np.asarray(w, dtype=float) / c

    def to_dict(self):
        return {"form": "cobb_douglas", "alpha": self.alpha.tolist(),
                "scale": self.scale}


@dataclass(frozen=True)
class Ces:
    """c(w) = scale * (sum_i delta[i] w_i^(1-s))^(1/(1-s)), s > 0, s != 1."""

    delta: np.ndarray
    s: float
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "delta", np.array(self.delta, dtype=float))
        if self.s <= 0 or self.s == 1.0:
            raise ValueError("CES elasticity must be positive and != 1")

    def unit_cost(self, w):
        w = np.asarray(w, dtype=float)
        rho = 1.0 - self.s
        base = float(self.delta @ w ** rho)
        c = self.scale * base ** (1.0 / rho)
        # a_i = dc/dw_i = scale^rho... use log-derivative form, exact for any scale
        a = c * self.delta * w ** (rho - 1.0) / base
        return c, a

    def aes(self, w):
        sig = np.full((3, 3), self.s)
        _, a = self.unit_cost(w)
        w = np.asarray(w, dtype=float)
        shares = a * w / float(a @ w)
        return _fill_aes_diagonal(sig, shares)

    def to_dict(self):
        return {"form": "ces", "delta": self.delta.tolist(), "s": self.s,
                "scale": self.scale}


@dataclass(frozen=True)
class TwoLevelCes:
    """Nested CES: composite M = CES_{s_in}(nest pair), then
    c = CES_{s_out}(M, remaining factor).

    ``nest`` holds the two factor indices of the inner composite, (T, K) by
    default. mu are the inner share weights in nest order, nu = (nu_M,
    nu_outside) the outer ones. Factors in different nests have Allen
    elasticity s_out; the nested pair has s_out + (s_in - s_out)/theta_M,
    which is negative when the inner elasticity is small enough relative to
    the outer one.
    """

    mu: np.ndarray
    nu: np.ndarray
    s_in: float
    s_out: float
    scale: float = 1.0
    nest: tuple = (T, K)

    def __post_init__(self):
        object.__setattr__(self, "mu", np.array(self.mu, dtype=float))
        object.__setattr__(self, "nu", np.array(self.nu, dtype=float))
        object.__setattr__(self, "nest", tuple(int(i) for i in self.nest))
        if sorted(self.nest) not in ([T, K], [T, L], [K, L]):
            raise ValueError("nest must name two distinct factors")
        for s in (self.s_in, self.s_out):
            if s <= 0 or s == 1.0:
                raise ValueError("nest elasticities must be positive and != 1")

    @property
    def outside(self) -> int:
        return ({T, K, L} - set(self.nest)).pop()

    def _inner_price(self, w):
        i1, i2 = self.nest
        rho = 1.0 - self.s_in
        base = self.mu[0] * w[i1] ** rho + self.mu[1] * w[i2] ** rho
        return base ** (1.0 / rho), base

    def unit_cost(self, w):
        w = np.asarray(w, dtype=float)
        i1, i2 = self.nest
        out = self.outside
        q, base_in = self._inner_price(w)
        rho = 1.0 - self.s_out
        base = self.nu[0] * q ** rho + self.nu[1] * w[out] ** rho
        c = self.scale * base ** (1.0 / rho)
        # outer demands: composite and the outside factor
        a_m = c * self.nu[0] * q ** (rho - 1.0) / base
        rin = 1.0 - self.s_in
        a = np.empty(3)
        a[out] = c * self.nu[1] * w[out] ** (rho - 1.0) / base
        a[i1] = a_m * self.mu[0] * w[i1] ** (rin - 1.0) * q / base_in
        a[i2] = a_m * self.mu[1] * w[i2] ** (rin - 1.0) * q / base_in
        return c, a

    def aes(self, w):
        w = np.asarray(w, dtype=float)
        c, a = self.unit_cost(w)
        shares = a * w / c
        i1, i2 = self.nest
        theta_m = shares[i1] + shares[i2]
        sig = np.full((3, 3), self.s_out)
        inner = self.s_out + (self.s_in - self.s_out) / theta_m
        sig[i1, i2] = sig[i2, i1] = inner
        return _fill_aes_diagonal(sig, shares)

    def to_dict(self):
        return {"form": "two_level_ces", "mu": self.mu.tolist(),
                "nu": self.nu.tolist(), "s_in": self.s_in,
                "s_out": self.s_out, "scale": self.scale,
                "nest": list(self.nest)}


def _fill_aes_diagonal(sig: np.ndarray, shares: np.ndarray) -> np.ndarray:
    """Set diagonals so every share-weighted row sums to zero."""
    sig = np.array(sig, dtype=float)
    for i in range(3):
        off = sum(shares[h] * sig[i, h] for h in range(3) if h != i)
        sig[i, i] = -off / shares[i]
    return sig


def spec_from_dict(d: dict):
    form = d["form"]
    if form == "cobb_douglas":
        return CobbDouglas(d["alpha"], d.get("scale", 1.0))
    if form == "ces":
        return Ces(d["delta"], d["s"], d.get("scale", 1.0))
    if form == "two_level_ces":
        return TwoLevelCes(d["mu"], d["nu"], d["s_in"], d["s_out"],
                           d.get("scale", 1.0),
                           tuple(d.get("nest", (T, K))))
    raise ValueError(f"unknown production form {form!r}")


def unit_cost(spec, w):
    """Unit cost and its gradient (the input-output coefficients).

    c is homogeneous of degree 1 in w and a = grad c of degree 0; the closed
    forms are exact for all three families.
    """
    return spec.unit_cost(np.asarray(w, dtype=float))


def aes_from_spec(spec, w) -> np.ndarray:
    """Allen-partial elasticity matrix of the technology at factor prices w."""
    return spec.aes(np.asarray(w, dtype=float))


def calibrated_spec(family: str, theta_col, **kw):
    """Spec whose input-output coefficients at w = (1,1,1) equal theta_col.

    With unit prices this makes the distributive shares of the snapshot equal
    to theta_col, so test economies stay readable.
    """
    th = np.asarray(theta_col, dtype=float)
    if family == "cobb_douglas":
        return CobbDouglas(th)
    if family == "ces":
        return Ces(th, kw["s"])
    if family == "two_level_ces":
        i1, i2 = nest = tuple(kw.get("nest", (T, K)))
        out = ({T, K, L} - set(nest)).pop()
        nu_m = th[i1] + th[i2]
        return TwoLevelCes(mu=[th[i1] / nu_m, th[i2] / nu_m],
                           nu=[nu_m, th[out]],
                           s_in=kw["s_in"], s_out=kw["s_out"], nest=nest)
    raise ValueError(f"unknown production family {family!r}")


@dataclass(frozen=True)
class EquilibriumPoint:
    """Levels solution: rewards w, prices p, endowments V, outputs X,
    input-output coefficients a, total income I."""

    w: np.ndarray
    p: np.ndarray
    V: np.ndarray
    X: np.ndarray
    a: np.ndarray  # (3, 2)
    income: float

    def residuals(self) -> dict:
        zero_profit = self.a.T @ self.w - self.p
        full_employment = self.a @ self.X - self.V
        income_gap = self.p @ self.X - self.w @ self.V
        return {
            "zero_profit": float(np.max(np.abs(zero_profit / self.p))),
            "full_employment": float(np.max(np.abs(full_employment / self.V))),
            "income": float(abs(income_gap) / self.income),
        }


def _system(specs, p, V, w, X):
    a = np.zeros((3, 2))
    c = np.zeros(2)
    for j in range(2):
        c[j], a[:, j] = specs[j].unit_cost(w)
    f = np.concatenate([c - p, a @ X - V])
    return f, a, c


def _jacobian(specs, w, X, a):
    jac = np.zeros((5, 5))
    jac[:2, :3] = a.T
    jac[2:, 3:] = a
    for j in range(2):
        sig = specs[j].aes(w)
        c = float(a[:, j] @ w)
        shares = a[:, j] * w / c
        # da_ij/dw_h = a_ij * theta_hj * sigma_ihj / w_h
        for i in range(3):
            for h in range(3):
                jac[2 + i, h] += X[j] * a[i, j] * shares[h] * sig[i, h] / w[h]
    return jac


def solve_equilibrium(specs, p, V, w0=None, x0=None,
                      tol: float = 1e-12, max_iter: int = 100) -> EquilibriumPoint:
    """Damped Newton solve of {zero profit x2, full employment x3}.

    Unknowns are (w_T, w_K, w_L, X_1, X_2). Steps are clipped to 50% of any
    coordinate to preserve positivity and halved while the residual does not
    decrease. Converges to a relative residual below `tol`.
    """
    p = np.asarray(p, dtype=float)
    V = np.asarray(V, dtype=float)
    w = np.ones(3) if w0 is None else np.array(w0, dtype=float)
    X = np.ones(2) if x0 is None else np.array(x0, dtype=float)
    scale = np.concatenate([p, V])

    f, a, _ = _system(specs, p, V, w, X)
    norm = float(np.max(np.abs(f / scale)))
    for _ in range(max_iter):
        if norm < tol:
            break
        jac = _jacobian(specs, w, X, a)
        step = -solve_partial_pivot(jac, f)
        z = np.concatenate([w, X])
        clip = np.max(np.abs(step) / (0.5 * z))
        if clip > 1.0:
            step = step / clip
        lam = 1.0
        for _ in range(40):
            z_new = z + lam * step
            f_new, a_new, _ = _system(specs, p, V, z_new[:3], z_new[3:])
            norm_new = float(np.max(np.abs(f_new / scale)))
            if norm_new < norm:
                break
            lam *= 0.5
        else:
            raise NonConvergence(f"line search stalled at residual {norm:.3e}")
        w, X = z_new[:3], z_new[3:]
        f, a, norm = f_new, a_new, norm_new
    else:
        raise NonConvergence(f"no convergence after {max_iter} iterations "
                             f"(residual {norm:.3e})")
    if np.any(X <= 0):
        raise Specialization(f"non-positive output at the solution: X = {X}")
    income = float(p @ X)
    return EquilibriumPoint(w, p, V, X, a, income)


def economy_snapshot(eq: EquilibriumPoint, specs) -> Economy:
    """Share/elasticity snapshot of a converged equilibrium."""
    theta_share = eq.a * eq.w[:, None] / eq.p[None, :]
    lambda_share = eq.a * eq.X[None, :] / eq.V[:, None]
    theta_good = eq.p * eq.X / eq.income
    theta_factor = eq.w * eq.V / eq.income
    sigma = np.stack([specs[j].aes(eq.w) for j in range(2)])
    return Economy(theta_share, lambda_share, theta_good, theta_factor, sigma)


def fd_rybczynski(specs, p, V, h: float = 1e-4, base: EquilibriumPoint | None = None):
    """Finite-difference output elasticities to endowment changes.

    Central differences with relative step h on each V_i; the independent
    nonlinear oracle for the linearized Rybczynski matrix.
    """
    p = np.asarray(p, dtype=float)
    V = np.asarray(V, dtype=float)
    if base is None:
        base = solve_equilibrium(specs, p, V)
    out = np.zeros((2, 3))
    for i in range(3):
        vp = V.copy()
        vp[i] *= 1.0 + h
        vm = V.copy()
        vm[i] *= 1.0 - h
        up = solve_equilibrium(specs, p, vp, w0=base.w, x0=base.X)
        dn = solve_equilibrium(specs, p, vm, w0=base.w, x0=base.X)
        out[:, i] = (up.X - dn.X) / base.X / (2.0 * h)
    return out


@dataclass(frozen=True)
class SampleConstraints:
    """What a sampled economy must satisfy.

    quadrant: None, or one of "I", "II", "III", "IV" for the ratio point.
    families: candidate cost-function families for each draw.
    """

    ranked: bool = True
    quadrant: str | None = None
    families: tuple = ("cobb_douglas", "ces", "two_level_ces")
    min_share: float = 0.02


@dataclass(frozen=True)
class SampledEconomy:
    economy: Economy
    specs: tuple
    equilibrium: EquilibriumPoint
    seed: int


def _draw_spec(rng, family: str, theta_col, nest=None):
    if family == "cobb_douglas":
        return calibrated_spec(family, theta_col)
    if family == "ces":
        s = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        if abs(s - 1.0) < 1e-3:
            s = 1.1
        return calibrated_spec(family, theta_col, s=s)
    if nest is None:
        nest = ((T, K), (T, L), (K, L))[rng.integers(3)]
    s_out = float(np.exp(rng.uniform(np.log(0.3), np.log(5.0))))
    s_in = float(np.exp(rng.uniform(np.log(0.02), np.log(2.0))))
    if abs(s_out - 1.0) < 1e-3:
        s_out = 1.1
    if abs(s_in - 1.0) < 1e-3:
        s_in = 0.9
    return calibrated_spec(family, theta_col, s_in=s_in, s_out=s_out,
                           nest=nest)


def sample_economy(seed: int, constraints: SampleConstraints = SampleConstraints(),
                   max_draws: int = 100_000) -> SampledEconomy:
    """Rejection-sample a production-backed economy satisfying the constraints.

    Specs are calibrated so that w = (1,1,1), p = (1,1) is an exact
    equilibrium; endowments follow from a random output draw. Deterministic
    for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    cons = constraints
    for _ in range(max_draws):
        theta_share = rng.dirichlet(np.ones(3), size=2).T
        if np.min(theta_share) < cons.min_share:
            continue
        if cons.ranked:
            rt = theta_share[T, 0] / theta_share[T, 1]
            rl = theta_share[L, 0] / theta_share[L, 1]
            rk = theta_share[K, 0] / theta_share[K, 1]
            if not (rt > rl > rk and theta_share[L, 0] > theta_share[L, 1]):
                continue
        families = cons.families
        nest = None
        if cons.quadrant == "IV":
            # only land-capital complementarity can reach quadrant IV
            families = ("two_level_ces",)
            nest = (T, K)
        specs = tuple(_draw_spec(rng, families[rng.integers(len(families))],
                                 theta_share[:, j], nest=nest)
                      for j in range(2))
        X = rng.uniform(0.5, 2.0, size=2)
        w = np.ones(3)
        p = np.ones(2)
        a = np.stack([specs[j].unit_cost(w)[1] for j in range(2)], axis=1)
        V = a @ X
        eq = EquilibriumPoint(w, p, V, X, a, float(p @ X))
        e = economy_snapshot(eq, specs)
        if not validate_economy(e, check_ranking=cons.ranked).ok:
            continue
        if cons.quadrant is not None:
            g = ews_matrix(e)
            if abs(g.g_LT) < 1e-12:
                continue
            s_dir = g.g_LK / g.g_LT
            u_dir = g.g_KT / g.g_LT
            quad = ("I" if u_dir > 0 else "IV") if s_dir > 0 else \
                   ("II" if u_dir > 0 else "III")
            if quad != cons.quadrant:
                continue
        return SampledEconomy(e, specs, eq, seed)
    raise ExhaustedRejection(
        f"no economy satisfying {cons} within {max_draws} draws (seed {seed})")


def appendix_f_sweep(e: Economy, outer_aes, inner_grid) -> list:
    """Vary only the nested-pair Allen elasticity at a fixed share snapshot.

    outer_aes: (c_1, c_2), the constant cross elasticities involving labor.
    inner_grid: values of the (T, K) Allen elasticity, common to both sectors.
    Returns one row per grid point: dict with sigma_KT, the raw (S, T, U)
    aggregates and the ratio coordinates (s, u). S' stays constant across
    the grid while U' moves with the inner elasticity.
    """
    rows = []
    for sig_kt in inner_grid:
        sigma = np.empty((2, 3, 3))
        for j in range(2):
            c_j = outer_aes[j]
            m = np.full((3, 3), c_j)
            m[T, K] = m[K, T] = sig_kt
            sigma[j] = _fill_aes_diagonal(m, e.theta_share[:, j])
        econ = Economy(e.theta_share, e.lambda_share, e.theta_good,
                       e.theta_factor, sigma)
        g = ews_matrix(econ)
        rows.append({
            "sigma_KT": float(sig_kt),
            "g_LK": g.g_LK, "g_LT": g.g_LT, "g_KT": g.g_KT,
            "s": g.g_LK / g.g_LT, "u": g.g_KT / g.g_LT,
        })
    return rows
