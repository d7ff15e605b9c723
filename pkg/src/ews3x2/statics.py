"""Linearized comparative statics: the 5x5 hat-system and its diagnostics.

Everything here works in rates of change (hat calculus): an asterisked
variable x* = dx/x. The solver returns factor-price and output responses to
goods-price / endowment shocks, plus the rate-of-change diagnostics used by
the ranking and sign-pattern lemmas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousSign, DegenerateShares, SingularSystem
from .model import Economy, K, L, T, epsilon, ews_matrix

#: ties in rankings / sign decisions below this are "ties", not strict signs
TIE_TOL = 1e-12


def solve_partial_pivot(a: np.ndarray, b: np.ndarray,
                        cond_limit: float = 1e12) -> np.ndarray:
    """Gaussian elimination with partial pivoting for a small dense system.

    The condition of the system is estimated by the ratio of the extreme
    pivot magnitudes; systems beyond `cond_limit` raise SingularSystem.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    pivots = []
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        p = a[col, col]
        if p == 0.0:
            raise SingularSystem("zero pivot in elimination")
        pivots.append(abs(p))
        for row in range(col + 1, n):
            m = a[row, col] / p
            if m != 0.0:
                a[row, col:] -= m * a[col, col:]
                b[row] -= m * b[col]
    if max(pivots) / min(pivots) > cond_limit:
        raise SingularSystem(
            f"pivot ratio {max(pivots)/min(pivots):.3e} exceeds {cond_limit:.1e}")
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


@dataclass(frozen=True)
class Shock:
    """Exogenous rates of change: goods prices p_star (2,) and endowments v_star (3,)."""

    p_star: np.ndarray
    v_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_star", np.array(self.p_star, dtype=float))
        object.__setattr__(self, "v_star", np.array(self.v_star, dtype=float))

    @property
    def relative_price_change(self) -> float:
        """P = p_1* - p_2*."""
        return float(self.p_star[0] - self.p_star[1])

    @classmethod
    def price(cls, P: float) -> "Shock":
        return cls(np.array([P, 0.0]), np.zeros(3))

    @classmethod
    def endowment(cls, i: int, rate: float = 1.0) -> "Shock":
        v = np.zeros(3)
        v[i] = rate
        return cls(np.zeros(2), v)

    @classmethod
    def from_dict(cls, d: dict) -> "Shock":
        return cls(np.asarray(d["p_star"], dtype=float),
                   np.asarray(d["v_star"], dtype=float))

    def to_dict(self) -> dict:
        return {"p_star": self.p_star.tolist(), "v_star": self.v_star.tolist()}


_SIGN_LABELS = {
    (-1, 1, -1): "A",
    (-1, 1, 1): "B",
    (1, 1, -1): "C",
    (-1, -1, 1): "D",
    (1, -1, 1): "E",
    (1, -1, -1): "F",
}

RANKINGS_UNDER_ASSUMPTIONS = ("X>Y>Z", "X>Z>Y", "Z>X>Y", "Z>Y>X")


def ranking_label(xyz, tol: float = TIE_TOL) -> str:
    """Order the real factor-price changes (X, Y, Z); 'tie' if any pair is within tol."""
    x, y, z = xyz
    if abs(x - y) < tol or abs(x - z) < tol or abs(y - z) < tol:
        return "tie"
    names = ["X", "Y", "Z"]
    order = sorted(range(3), key=lambda i: -xyz[i])
    return ">".join(names[i] for i in order)


def sign_label(triple, dead_band: float = TIE_TOL):
    """Map a sign triple of (a_T0', a_K0', a_L0') to its letter A..F, or None."""
    if any(abs(v) < dead_band for v in triple):
        return None
    return _SIGN_LABELS.get(tuple(int(np.sign(v)) for v in triple))


@dataclass(frozen=True)
class Response:
    """Solved hat-variables for one shock, plus derived diagnostics.

    w_star (3,), x_star (2,), a_star[i, j] (3, 2), a0_prime (3,) the
    allocation-weighted aggregate of a_star, W[i, h] = w_i* - w_h*,
    xyz = w* - p_1* (real factor-price changes), H[j] the per-sector
    isoquant/isocost diagnostic (scaled by 1/p_j), H0 its aggregate.
    """

    shock: Shock
    w_star: np.ndarray
    x_star: np.ndarray
    a_star: np.ndarray
    a0_prime: np.ndarray
    W: np.ndarray
    xyz: np.ndarray
    H: np.ndarray
    H0: float
    ranking: str
    label: object  # letter A..F or None

    def to_dict(self) -> dict:
        return {
            "w_star": self.w_star.tolist(),
            "x_star": self.x_star.tolist(),
            "a_star": self.a_star.tolist(),
            "a0_prime": self.a0_prime.tolist(),
            "W": self.W.tolist(),
            "xyz": self.xyz.tolist(),
            "H": self.H.tolist(),
            "H0": self.H0,
            "ranking": self.ranking,
            "sign_label": self.label,
            "P": self.shock.relative_price_change,
        }


def hat_system(e: Economy) -> np.ndarray:
    """Coefficient matrix of the 5x5 system in (w_T*, w_K*, w_L*, X_1*, X_2*).

    Rows 1-2: zero-profit in rates, sum_i theta_ij w_i* = p_j*.
    Rows 3-5: full employment in rates, sum_h g_ih w_h* + sum_j lambda_ij X_j* = V_i*.
    """
    g = ews_matrix(e).g
    m = np.zeros((5, 5))
    m[0, :3] = e.theta_share[:, 0]
    m[1, :3] = e.theta_share[:, 1]
    m[2:, :3] = g
    m[2:, 3:] = e.lambda_share
    return m


def solve_linear(e: Economy, s: Shock) -> Response:
    """Solve the hat-system and populate every derived rate-of-change field."""
    m = hat_system(e)
    rhs = np.concatenate([s.p_star, s.v_star])
    x = solve_partial_pivot(m, rhs)
    resid = float(np.max(np.abs(m @ x - rhs)))
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if resid > 1e-10 * scale:
        raise SingularSystem(f"hat-system residual {resid:.3e} too large")

    w_star = x[:3]
    x_star = x[3:]
    eps = epsilon(e)
    # a_ij* = sum_h eps[j, i, h] w_h*
    a_star = np.einsum("jih,h->ij", eps, w_star)
    a0_prime = np.einsum("ij,ij->i", e.lambda_share, a_star)
    W = w_star[:, None] - w_star[None, :]
    xyz = w_star - s.p_star[0]
    H = np.einsum("i,ij,ij->j", w_star, a_star, e.theta_share)
    H0 = float(w_star @ (a0_prime * e.theta_factor))
    return Response(
        shock=s, w_star=w_star, x_star=x_star, a_star=a_star,
        a0_prime=a0_prime, W=W, xyz=xyz, H=H, H0=H0,
        ranking=ranking_label(xyz),
        label=sign_label(a0_prime),
    )


def a0_prime_from_ews(e: Economy, w_star: np.ndarray) -> np.ndarray:
    """Aggregate input-coefficient changes computed from the EWS matrix alone.

    a_i0' = sum_{h != i} g_ih (w_h* - w_i*); equal to the allocation-weighted
    aggregate of a_ij* in exact arithmetic (the cross-check route).
    """
    g = ews_matrix(e).g
    out = np.zeros(3)
    for i in range(3):
        for h in range(3):
            if h != i:
                out[i] += g[i, h] * (w_star[h] - w_star[i])
    return out


def rybczynski_matrix(e: Economy) -> tuple:
    """Output responses to unit endowment changes at fixed goods prices.

    Returns (values, signs): values[j, i] = X_j*/V_i* from three solves with
    p* = 0 and a unit v_star on factor i; signs is the elementwise sign matrix.
    """
    values = np.zeros((2, 3))
    for i in range(3):
        r = solve_linear(e, Shock.endowment(i))
        values[:, i] = r.x_star
    signs = np.sign(values).astype(int)
    return values, signs


def stolper_samuelson(e: Economy, P: float, time_reversal: bool = False) -> Response:
    """Pure goods-price shock p* = (P, 0), v* = 0.

    The ranking lemma assumes P > 0; a negative P is accepted only with
    `time_reversal`, which negates the whole shock (all rates flip sign).
    """
    if P < 0 and not time_reversal:
        raise ValueError("P < 0 requires time_reversal=True; the ranking "
                         "results assume a rising relative price of good 1")
    return solve_linear(e, Shock.price(abs(P) if time_reversal else P))


@dataclass(frozen=True)
class XyzLines:
    """Lines X(Z) and Y(Z) implied by the two zero-profit conditions.

    X = intercept_x + slope_x * Z and Y = intercept_y + slope_y * Z, with
    determinants (d1, d2, d3) all positive under the intensity ranking and
    slope_x < slope_y under the middle-factor condition.
    """

    d1: float
    d2: float
    d3: float
    slope_x: float
    intercept_x: float
    slope_y: float
    intercept_y: float
    z_cross_x: float  # Z value where X = Z
    z_cross_y: float  # Z value where Y = Z

    def x_at(self, z: float) -> float:
        return self.intercept_x + self.slope_x * z

    def y_at(self, z: float) -> float:
        return self.intercept_y + self.slope_y * z


def lines_xyz(e: Economy, P: float) -> XyzLines:
    """Solve the 2x2 zero-profit block for X and Y as functions of Z."""
    th = e.theta_share
    d1 = th[T, 0] * th[K, 1] - th[K, 0] * th[T, 1]
    d2 = th[K, 1] * th[L, 0] - th[K, 0] * th[L, 1]
    d3 = th[T, 0] * th[L, 1] - th[T, 1] * th[L, 0]
    if abs(d1) < 1e-12:
        raise DegenerateShares(f"share determinant d1 = {d1:.3e} vanishes")
    slope_x, intercept_x = -d2 / d1, th[K, 0] * P / d1
    slope_y, intercept_y = -d3 / d1, -th[T, 0] * P / d1
    z_cross_y = -th[T, 0] / (th[T, 0] - th[T, 1]) * P
    z_cross_x = -th[K, 0] / (th[K, 0] - th[K, 1]) * P
    return XyzLines(float(d1), float(d2), float(d3),
                    float(slope_x), float(intercept_x),
                    float(slope_y), float(intercept_y),
                    float(z_cross_x), float(z_cross_y))


@dataclass(frozen=True)
class Lemma2Diagnostics:
    aggregate_label: str
    sector_labels: tuple
    feasible: bool
    ranking: str


def lemma2_diagnostics(r: Response, dead_band: float = TIE_TOL) -> Lemma2Diagnostics:
    """Classify the aggregate and per-sector input-coefficient sign patterns.

    Under the realized ranking X>Z>Y only the letters A-D are feasible;
    E or F (or any letter under another ranking's exclusion) marks data
    inconsistent with the model assumptions.
    """
    if any(abs(v) < dead_band for v in r.a0_prime):
        raise AmbiguousSign("an aggregate input-coefficient change is inside "
                            "the dead band; sign letter undefined")
    agg = sign_label(r.a0_prime, dead_band)
    sector = tuple(sign_label(r.a_star[:, j], dead_band) for j in range(2))
    feasible = (r.ranking == "X>Z>Y" and agg in ("A", "B", "C", "D"))
    return Lemma2Diagnostics(agg, sector, feasible, r.ranking)


@dataclass(frozen=True)
class HChecks:
    H: np.ndarray
    H0: float
    d10_residual: float
    decompositions: tuple  # three algebraically equal forms of H0

    @property
    def decomposition_spread(self) -> float:
        return max(self.decompositions) - min(self.decompositions)


def h_checks(e: Economy, r: Response) -> HChecks:
    """Evaluate the negativity diagnostics and their internal consistency.

    H[j] = sum_i w_i* a_ij* theta_ij (negative for any genuine factor-price
    perturbation), H0 the income-share aggregate, and three eliminations of
    H0 that must agree exactly.
    """
    w, a0, tf = r.w_star, r.a0_prime, e.theta_factor
    H = np.einsum("i,ij,ij->j", w, r.a_star, e.theta_share)
    H0 = float(w @ (a0 * tf))
    d10 = abs(float(a0 @ tf))
    dec_l = (w[T] - w[L]) * a0[T] * tf[T] + (w[K] - w[L]) * a0[K] * tf[K]
    dec_k = (w[T] - w[K]) * a0[T] * tf[T] + (w[L] - w[K]) * a0[L] * tf[L]
    dec_t = (w[K] - w[T]) * a0[K] * tf[K] + (w[L] - w[T]) * a0[L] * tf[L]
    return HChecks(H, H0, d10, (float(dec_l), float(dec_k), float(dec_t)))
