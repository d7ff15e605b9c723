"""Economy snapshot (shares and Allen elasticities) and its substitution aggregates.

Factor order is (T, K, L) = (land, capital, labor); sector order is (1, 2).
All matrices are dense: theta/lambda shares are 3x2, per-sector Allen
elasticity matrices are 3x3, and the economy-wide substitution matrix is 3x3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator

FACTORS = ("T", "K", "L")
SECTORS = ("1", "2")
T, K, L = 0, 1, 2

#: tolerance on structural residuals of user-supplied data
STRUCT_TOL = 1e-9
#: tolerance on algebraic identities evaluated in double precision
IDENT_TOL = 1e-12


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Economy:
    """Static snapshot of the 3x2 economy.

    theta_share[i, j]  distributive share of factor i in sector j
    lambda_share[i, j] fraction of factor i's endowment employed in sector j
    theta_good[j]      share of good j in total income
    theta_factor[i]    share of factor i in total income
    sigma[j, i, h]     Allen-partial elasticity of substitution in sector j
    """

    theta_share: np.ndarray
    lambda_share: np.ndarray
    theta_good: np.ndarray
    theta_factor: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta_share", _readonly(self.theta_share))
        object.__setattr__(self, "lambda_share", _readonly(self.lambda_share))
        object.__setattr__(self, "theta_good", _readonly(self.theta_good))
        object.__setattr__(self, "theta_factor", _readonly(self.theta_factor))
        object.__setattr__(self, "sigma", _readonly(self.sigma))

    @property
    def theta_L_over_K(self) -> float:
        return float(self.theta_factor[L] / self.theta_factor[K])

    @classmethod
    def from_shares(cls, theta_share, theta_good, sigma,
                    lambda_share=None, theta_factor=None) -> "Economy":
        """Build an economy, deriving lambda_share / theta_factor when absent.

        theta_factor[i] = sum_j theta_good[j] * theta_share[i, j] and
        lambda_share[i, j] = (theta_good[j] / theta_factor[i]) * theta_share[i, j].
        """
        theta_share = np.asarray(theta_share, dtype=float)
        theta_good = np.asarray(theta_good, dtype=float)
        if theta_factor is None:
            theta_factor = theta_share @ theta_good
        theta_factor = np.asarray(theta_factor, dtype=float)
        if lambda_share is None:
            lambda_share = theta_share * theta_good[None, :] / theta_factor[:, None]
        return cls(theta_share, lambda_share, theta_good, theta_factor, sigma)

    @classmethod
    def cobb_douglas(cls, theta_share, theta_good) -> "Economy":
        """Economy with all cross Allen elasticities equal to one.

        Diagonals follow from the zero row-sum constraint:
        sigma[j, i, i] = -(1 - theta_share[i, j]) / theta_share[i, j].
        """
        theta_share = np.asarray(theta_share, dtype=float)
        sigma = np.ones((2, 3, 3))
        for j in range(2):
            for i in range(3):
                sigma[j, i, i] = -(1.0 - theta_share[i, j]) / theta_share[i, j]
        return cls.from_shares(theta_share, theta_good, sigma)

    @classmethod
    def from_dict(cls, d: dict) -> "Economy":
        return cls.from_shares(
            theta_share=d["theta_share"],
            theta_good=d["theta_good"],
            sigma=d["sigma"],
            lambda_share=d.get("lambda_share"),
            theta_factor=d.get("theta_factor"),
        )

    def to_dict(self) -> dict:
        return {
            "factors": list(FACTORS),
            "sectors": list(SECTORS),
            "theta_share": self.theta_share.tolist(),
            "lambda_share": self.lambda_share.tolist(),
            "theta_good": self.theta_good.tolist(),
            "theta_factor": self.theta_factor.tolist(),
            "sigma": self.sigma.tolist(),
        }


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str
    magnitude: float

    def __str__(self):
        return f"{self.code}: {self.detail} (magnitude {self.magnitude:.3e})"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, detail: str, magnitude: float):
        self.violations.append(Violation(code, detail, float(magnitude)))

    def codes(self):
        return [v.code for v in self.violations]

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"code": v.code, "detail": v.detail, "magnitude": v.magnitude}
                for v in self.violations
            ],
        }


def validate_economy(e: Economy, check_ranking: bool = False,
                     tol: float = STRUCT_TOL) -> ValidationReport:
    """Check every structural constraint of the snapshot; report all violations.

    Violations are reported, never raised, so a CLI caller can show them all
    at once. `check_ranking` additionally enforces the factor-intensity
    ranking (T/K extreme, L middle, L used intensively in sector 1).
    """
    rep = ValidationReport()
    th, la = e.theta_share, e.lambda_share
    tg, tf, sg = e.theta_good, e.theta_factor, e.sigma

    for arr, name in ((th, "theta_share"), (la, "lambda_share"),
                      (tg, "theta_good"), (tf, "theta_factor"), (sg, "sigma")):
        if not np.all(np.isfinite(arr)):
            rep.add("non-finite", f"{name} contains non-finite entries", np.inf)
            return rep

    for j in range(2):
        r = abs(th[:, j].sum() - 1.0)
        if r > tol:
            rep.add("share-column-sum",
                    f"distributive shares of sector {SECTORS[j]} do not sum to 1", r)
    for i in range(3):
        r = abs(la[i, :].sum() - 1.0)
        if r > tol:
            rep.add("allocation-row-sum",
                    f"allocation shares of factor {FACTORS[i]} do not sum to 1", r)
    r = abs(tg.sum() - 1.0)
    if r > tol:
        rep.add("income-share-sum", "good income shares do not sum to 1", r)
    r = abs(tf.sum() - 1.0)
    if r > tol:
        rep.add("income-share-sum", "factor income shares do not sum to 1", r)

    link = la - th * tg[None, :] / tf[:, None]
    r = np.abs(link).max()
    if r > tol:
        rep.add("share-link",
                "lambda_share inconsistent with (theta_good/theta_factor)*theta_share", r)

    if np.any(th <= 0) or np.any(th >= 1):
        rep.add("share-range", "distributive shares must lie in (0,1)",
                float(max(np.max(-th), np.max(th - 1), 0)))
    if np.any(la <= 0) or np.any(la >= 1):
        rep.add("share-range", "allocation shares must lie in (0,1)",
                float(max(np.max(-la), np.max(la - 1), 0)))

    for j in range(2):
        r = np.abs(sg[j] - sg[j].T).max()
        if r > tol:
            rep.add("aes-symmetry",
                    f"Allen elasticity matrix of sector {SECTORS[j]} is not symmetric", r)
        for i in range(3):
            if sg[j, i, i] >= 0:
                rep.add("aes-diagonal-sign",
                        f"sigma[{SECTORS[j]}][{FACTORS[i]}][{FACTORS[i]}] must be negative",
                        sg[j, i, i])
            r = abs(float(th[:, j] @ sg[j, i, :]))
            if r > tol:
                rep.add("aes-row-sum",
                        f"share-weighted Allen row ({FACTORS[i]}, sector {SECTORS[j]}) "
                        "does not sum to 0", r)

    if check_ranking:
        r_t = th[T, 0] / th[T, 1]
        r_l = th[L, 0] / th[L, 1]
        r_k = th[K, 0] / th[K, 1]
        if not (r_t > r_l > r_k):
            rep.add("intensity-ranking",
                    "theta_T1/theta_T2 > theta_L1/theta_L2 > theta_K1/theta_K2 fails",
                    max(r_l - r_t, r_k - r_l))
        if not th[L, 0] > th[L, 1]:
            rep.add("middle-factor-intensity",
                    "theta_L1 > theta_L2 fails", th[L, 1] - th[L, 0])
    return rep


def is_ranked(e: Economy) -> bool:
    """True iff the snapshot satisfies the assumed factor-intensity ranking."""
    th = e.theta_share
    return (th[T, 0] / th[T, 1] > th[L, 0] / th[L, 1] > th[K, 0] / th[K, 1]
            and th[L, 0] > th[L, 1])


def epsilon(e: Economy) -> np.ndarray:
    """Price elasticities of the input-output coefficients.

    eps[j, i, h] = theta_share[h, j] * sigma[j, i, h]; each (i, j) row sums
    to zero because a_ij is homogeneous of degree zero in factor prices.
    """
    return e.theta_share.T[:, None, :] * e.sigma


@dataclass(frozen=True)
class EwsMatrix:
    """3x3 matrix of economy-wide substitution terms with its share context."""

    g: np.ndarray
    theta_factor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", _readonly(self.g))
        object.__setattr__(self, "theta_factor", _readonly(self.theta_factor))

    @property
    def g_LK(self) -> float:
        return float(self.g[L, K])

    @property
    def g_LT(self) -> float:
        return float(self.g[L, T])

    @property
    def g_KT(self) -> float:
        return float(self.g[K, T])

    @property
    def theta_L_over_K(self) -> float:
        return float(self.theta_factor[L] / self.theta_factor[K])

    def row_sums(self) -> np.ndarray:
        return self.g.sum(axis=1)

    def reciprocity_residuals(self) -> np.ndarray:
        """Residuals of theta_i * g_ih - theta_h * g_hi (zero in exact arithmetic)."""
        w = self.theta_factor[:, None] * self.g
        return w - w.T

    def sign_triple(self) -> tuple:
        return (int(np.sign(self.g[L, K])), int(np.sign(self.g[L, T])),
                int(np.sign(self.g[K, T])))

    def determinant_identity(self) -> tuple:
        """Three algebraically equal forms of the KT-block determinant.

        Returns (g_KK*g_TT - g_TK*g_KT, the pairwise-product form, the
        share-ratio form). All three are equal in exact arithmetic and
        strictly positive for a valid economy.
        """
        g = self.g
        tf = self.theta_factor
        lhs = g[K, K] * g[T, T] - g[T, K] * g[K, T]
        mid = g[K, T] * g[T, L] + g[K, L] * g[T, K] + g[K, L] * g[T, L]
        ltk = tf[L] / tf[T]
        lkk = tf[L] / tf[K]
        rhs = ltk * (g[K, T] * (g[L, T] + g[L, K]) + lkk * g[L, K] * g[L, T])
        return float(lhs), float(mid), float(rhs)


def ews_matrix(e: Economy) -> EwsMatrix:
    """Aggregate the sectoral substitution elasticities into the EWS matrix.

    g[i, h] = sum_j lambda_share[i, j] * eps[j, i, h], the economy-wide
    substitution towards factor i when factor h becomes more expensive,
    holding sector outputs constant.
    """
    eps = epsilon(e)
    g = np.einsum("ij,jih->ih", e.lambda_share, eps)
    return EwsMatrix(g, e.theta_factor)


@dataclass(frozen=True)
class RatioPoint:
    """A point (S', U') in the EWS-ratio plane.

    Carries the theta_L/theta_K ratio the boundary hyperbola needs, and the
    sign of g_LT the ratios were formed from (the region inequality flips
    with it).
    """

    s: float
    u: float
    theta_L_over_K: float
    g_LT_sign: int = 1

    def coords(self) -> tuple:
        return (self.s, self.u)


def ews_ratio_vector(g: EwsMatrix) -> RatioPoint:
    """(S', U') = (g_LK/g_LT, g_KT/g_LT)."""
    if abs(g.g_LT) < 1e-12:
        raise DegenerateDenominator(
            f"g_LT = {g.g_LT:.3e}; the EWS-ratio vector is undefined")
    return RatioPoint(g.g_LK / g.g_LT, g.g_KT / g.g_LT,
                      g.theta_L_over_K, 1 if g.g_LT > 0 else -1)


SUBSTITUTE = "economy-wide substitute"
SUBSTITUTE_BORDERLINE = "economy-wide substitute (borderline)"
COMPLEMENT = "economy-wide complement"

_PAIRS = ((L, K), (L, T), (K, T))


def classify_substitutes(g: EwsMatrix) -> dict:
    """Label each factor pair by the sign of its off-diagonal EWS term.

    Strictly positive -> substitute, strictly negative -> complement; an
    exact zero gets the borderline substitute label (only strict signs are
    meaningful in the model).
    """
    out = {}
    for i, h in _PAIRS:
        v = g.g[i, h]
        if v > 0:
            label = SUBSTITUTE
        elif v < 0:
            label = COMPLEMENT
        else:
            label = SUBSTITUTE_BORDERLINE
        out[(FACTORS[i], FACTORS[h])] = label
    return out


def sample_economy_shares(seed, ranked: bool = True, min_share: float = 0.02,
                          max_draws: int = 100_000) -> Economy:
    """Rejection-sample a valid economy directly at the share/AES level.

    Unlike the production-backed sampler this draws the Allen matrices
    freely (symmetric, share-weighted rows summing to zero, negative
    diagonal), so it reaches substitution patterns no single-nest CES
    technology can produce. Deterministic for a fixed seed.
    """
    from .errors import ExhaustedRejection

    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        theta_share = rng.dirichlet(np.ones(3), size=2).T
        if np.min(theta_share) < min_share:
            continue
        if ranked:
            rt = theta_share[T, 0] / theta_share[T, 1]
            rk = theta_share[K, 0] / theta_share[K, 1]
            rl = theta_share[L, 0] / theta_share[L, 1]
            if not (rt > rl > rk and theta_share[L, 0] > theta_share[L, 1]):
                continue
        theta_good = rng.dirichlet(np.ones(2))
        if np.min(theta_good) < 0.01:
            continue
        sigma = np.zeros((2, 3, 3))
        concave = True
        for j in range(2):
            off = rng.uniform(-3.0, 6.0, size=3)
            s = np.zeros((3, 3))
            s[T, K] = s[K, T] = off[0]
            s[T, L] = s[L, T] = off[1]
            s[K, L] = s[L, K] = off[2]
            for i in range(3):
                w = sum(theta_share[h, j] * s[i, h]
                        for h in range(3) if h != i)
                s[i, i] = -w / theta_share[i, j]
            # curvature: the share-weighted Allen matrix of a concave cost
            # function is negative semidefinite (one zero eigenvalue from
            # homogeneity, the rest strictly negative)
            tth = theta_share[:, j]
            weighted = tth[:, None] * s * tth[None, :]
            if np.linalg.eigvalsh(weighted)[-1] > 1e-10:
                concave = False
                break
            sigma[j] = s
        if not concave:
            continue
        e = Economy.from_shares(theta_share, theta_good, sigma)
        if not validate_economy(e, check_ranking=ranked).ok:
            continue
        g = ews_matrix(e)
        off = (g.g_LK, g.g_LT, g.g_KT)
        if not (np.all(np.diag(g.g) < 0)
                and sum(v < 0 for v in off) <= 1
                and min(g.determinant_identity()) > 0):
            continue
        return e
    raise ExhaustedRejection(
        f"no valid share-level economy within {max_draws} draws")
