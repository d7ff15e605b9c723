"""Two-period estimation pipeline: locate the EWS-ratio vector from data.

Given base-period shares and observed rates of change, the pipeline computes
the segment endpoints A and B, applies the quadrant-IV sufficient condition,
runs the subregion sign tests, and reports a Rybczynski sign-pattern verdict
with full diagnostics. All decisions are sign-based with a relative dead
band: measured rates inside the band yield "ambiguous", never a guess.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateObservation, UnsupportedRanking, ZeroP)
from .geometry import (Quadrant, RYBCZYNSKI_PATTERNS, SubregionLabel, quadrant)
from .model import FACTORS, K, L, RatioPoint, T
from .statics import ranking_label, sign_label

#: relative dead band for sign decisions on measured rates
DEAD_BAND = 1e-10
#: residual tolerance for measured-data consistency (looser than internal)
DATA_TOL = 1e-6


@dataclass(frozen=True)
class Observation:
    """Base-period shares plus observed rates of change between two periods.

    Either per-sector a_star (3, 2) or the aggregates a0_prime (3,) must be
    present; when a_star is given the aggregates are recomputed from it.
    """

    theta_share: np.ndarray
    theta_good: np.ndarray
    p_star: np.ndarray
    w_star: np.ndarray
    a_star: np.ndarray | None = None
    a0_prime: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta_share", np.array(self.theta_share, dtype=float))
        object.__setattr__(self, "theta_good", np.array(self.theta_good, dtype=float))
        object.__setattr__(self, "p_star", np.array(self.p_star, dtype=float))
        object.__setattr__(self, "w_star", np.array(self.w_star, dtype=float))
        if self.a_star is not None:
            object.__setattr__(self, "a_star", np.array(self.a_star, dtype=float))
            lam = self.lambda_share
            object.__setattr__(self, "a0_prime",
                               np.einsum("ij,ij->i", lam, self.a_star))
        elif self.a0_prime is not None:
            object.__setattr__(self, "a0_prime", np.array(self.a0_prime, dtype=float))
        else:
            raise DegenerateObservation("need a_star or a0_prime")

    @property
    def theta_factor(self) -> np.ndarray:
        return self.theta_share @ self.theta_good

    @property
    def lambda_share(self) -> np.ndarray:
        tf = self.theta_factor
        return self.theta_share * self.theta_good[None, :] / tf[:, None]

    @property
    def P(self) -> float:
        return float(self.p_star[0] - self.p_star[1])

    @property
    def xyz(self) -> np.ndarray:
        return self.w_star - self.p_star[0]

    def rate_scale(self) -> float:
        vals = [np.max(np.abs(self.p_star)), np.max(np.abs(self.w_star))]
        if self.a_star is not None:
            vals.append(np.max(np.abs(self.a_star)))
        vals.append(np.max(np.abs(self.a0_prime)))
        return max(float(max(vals)), 1e-300)

    @classmethod
    def from_dict(cls, d: dict) -> "Observation":
        return cls(theta_share=d["theta_share"], theta_good=d["theta_good"],
                   p_star=d["p_star"], w_star=d["w_star"],
                   a_star=d.get("a_star"), a0_prime=d.get("a0_prime"))

    def to_dict(self) -> dict:
        out = {
            "theta_share": self.theta_share.tolist(),
            "theta_good": self.theta_good.tolist(),
            "p_star": self.p_star.tolist(),
            "w_star": self.w_star.tolist(),
            "a0_prime": self.a0_prime.tolist(),
        }
        if self.a_star is not None:
            out["a_star"] = self.a_star.tolist()
        return out


def observation_from_response(e, resp) -> Observation:
    """Synthetic observation from an economy snapshot and a solved response."""
    return Observation(theta_share=e.theta_share, theta_good=e.theta_good,
                       p_star=resp.shock.p_star, w_star=resp.w_star,
                       a_star=resp.a_star)


def _signed(value: float, scale: float, dead_band: float = DEAD_BAND) -> int:
    """Sign with a relative dead band; 0 means 'ambiguous'."""
    if abs(value) < dead_band * scale:
        return 0
    return 1 if value > 0 else -1


@dataclass(frozen=True)
class PreprocessInfo:
    permutation: tuple  # role order: which input factor fills (T, K, L)
    reversed: bool


def preprocess(obs: Observation, time_reversal: bool = False) -> tuple:
    """Normalize an observation to the assumed ranking and sign conventions.

    Factor labels are permuted so the intensity ranking holds with L the
    middle factor; a negative relative-price change is flipped (all rates
    negated) only when `time_reversal` is set. Returns (obs, PreprocessInfo).
    """
    th = obs.theta_share
    ratios = th[:, 0] / th[:, 1]
    order = tuple(int(i) for i in np.argsort(-ratios))
    perm = (order[0], order[2], order[1])  # T = max ratio, K = min, L = middle
    if not (ratios[order[0]] > ratios[order[1]] > ratios[order[2]]):
        raise UnsupportedRanking("tied intensity ratios; no strict ranking exists")
    idx = list(perm)
    th2 = th[idx, :]
    if not th2[L, 0] > th2[L, 1]:
        raise UnsupportedRanking(
            "middle factor is not used intensively in sector 1 under any "
            "relabeling; this configuration is out of scope")
    w2 = obs.w_star[idx]
    a2 = obs.a_star[idx, :] if obs.a_star is not None else None
    a02 = None if a2 is not None else obs.a0_prime[idx]
    p2 = obs.p_star.copy()

    P = float(p2[0] - p2[1])
    if abs(P) < 1e-12:
        raise ZeroP("relative goods-price change is zero; nothing to estimate")
    flipped = False
    if P < 0 and time_reversal:
        p2, w2 = -p2, -w2
        a2 = -a2 if a2 is not None else None
        a02 = -a02 if a02 is not None else None
        flipped = True
    out = Observation(theta_share=th2, theta_good=obs.theta_good,
                      p_star=p2, w_star=w2, a_star=a2, a0_prime=a02)
    return out, PreprocessInfo(perm, flipped)


def point_a(obs: Observation) -> RatioPoint:
    """Segment endpoint A from the factor-price changes alone."""
    w = obs.w_star
    scale = max(float(np.max(np.abs(w))), 1e-300)
    w_kl = w[K] - w[L]
    w_kt = w[K] - w[T]
    if _signed(w_kl, scale) == 0 or _signed(w_kt, scale) == 0:
        raise DegenerateObservation("W_KL or W_KT inside the dead band; point A undefined")
    tf = obs.theta_factor
    r = float(tf[L] / tf[K])
    s = -(w[T] - w[L]) / w_kl
    u = r * (-(w[L] - w[T]) / w_kt)
    return RatioPoint(float(s), float(u), r)


def point_b(obs: Observation) -> RatioPoint:
    """Segment endpoint B from the aggregate input-coefficient changes."""
    a0 = obs.a0_prime
    scale = max(float(np.max(np.abs(a0))), 1e-300)
    if _signed(a0[T], scale) == 0 or _signed(a0[L], scale) == 0:
        raise DegenerateObservation("a_T0' or a_L0' inside the dead band; point B undefined")
    tf = obs.theta_factor
    r = float(tf[L] / tf[K])
    s = a0[K] / a0[T] * (tf[K] / tf[T])
    u = a0[K] / a0[L]
    return RatioPoint(float(s), float(u), r)


@dataclass(frozen=True)
class Theorem1Verdict:
    verdict: str  # "quadrant IV", "quadrant IV (case D, reversed bounds)", "inconclusive"
    ranking: str
    a0_label: object
    point_a: RatioPoint | None
    point_b: RatioPoint | None
    bounds: dict | None  # s_low < S' < s_high, u_high > U' > u_low
    failed_preconditions: tuple = ()

    @property
    def quadrant_iv(self) -> bool:
        return self.verdict.startswith("quadrant IV")


def theorem1_verdict(obs: Observation) -> Theorem1Verdict:
    """Quadrant-IV sufficient condition plus the segment bounds it implies.

    The condition: rising relative price of good 1, realized ranking X>Z>Y,
    and aggregate sign pattern (+, +, -). When it holds, both endpoints are
    in quadrant IV, A left of B, and the ratio vector is bracketed by them.
    """
    failed = []
    scale = obs.rate_scale()
    if _signed(obs.P, scale) <= 0:
        failed.append("relative price change P > 0")
    ranking = ranking_label(obs.xyz, tol=DEAD_BAND * scale)
    if ranking != "X>Z>Y":
        failed.append(f"factor-price-change ranking X>Z>Y (got {ranking})")
    label = sign_label(obs.a0_prime, dead_band=DEAD_BAND * scale)
    if label != "C" and label != "D":
        failed.append(f"aggregate sign pattern (+, +, -) (got label {label})")

    pa = pb = None
    try:
        pa = point_a(obs)
    except DegenerateObservation:
        failed.append("point A computable")
    try:
        pb = point_b(obs)
    except DegenerateObservation:
        failed.append("point B computable")

    if failed or label == "D":
        # case D: both endpoints in quadrant IV but A right of B; no subregion
        # machinery applies, so only report it
        if label == "D" and not failed:
            bounds = {"s_low": pb.s, "s_high": pa.s, "u_high": pb.u, "u_low": pa.u}
            return Theorem1Verdict("quadrant IV (case D, reversed bounds)",
                                   ranking, label, pa, pb, bounds)
        return Theorem1Verdict("inconclusive", ranking, label, pa, pb, None,
                               tuple(failed))
    bounds = {"s_low": pa.s, "s_high": pb.s, "u_high": pa.u, "u_low": pb.u}
    return Theorem1Verdict("quadrant IV", ranking, label, pa, pb, bounds)


@dataclass(frozen=True)
class CorollaryResult:
    verdict: str  # "P1", "P2", "P3", "ambiguous"
    shortcut: str | None
    chain: str | None
    tests: dict
    equivalence_mismatches: tuple


def corollary1_subregion(obs: Observation, t1v: Theorem1Verdict) -> CorollaryResult:
    """Subregion sign tests, run both as shortcuts and as raw threshold chains.

    Shortcuts use the signs of w_L* - p_j* and the point-B abscissa; chains
    compare the endpoint abscissas against the R-point thresholds directly.
    The two routes are equivalent on exact data; any disagreement (noise)
    yields 'ambiguous' with both results reported.
    """
    if not t1v.quadrant_iv or t1v.a0_label != "C":
        return CorollaryResult("not-quadrant-IV", None, None, {}, ())
    th = obs.theta_share
    w = obs.w_star
    p = obs.p_star
    scale = obs.rate_scale()
    t_1 = float(th[K, 0] / th[T, 0])  # S'(R_L1)
    t_2 = float(th[K, 1] / th[T, 1])  # S'(R_L2)
    s_a = t1v.point_a.s
    s_b = t1v.point_b.s

    sign_wl_p1 = _signed(w[L] - p[0], scale)
    sign_wl_p2 = _signed(w[L] - p[1], scale)
    thr_scale = max(t_1, t_2, abs(s_a), abs(s_b))

    shortcut = None
    if sign_wl_p2 < 0:
        shortcut = "P1"
    elif (sign_wl_p2 > 0 and sign_wl_p1 < 0
          and _signed(t_2 - s_b, thr_scale) > 0):
        shortcut = "P2"
    elif sign_wl_p1 > 0 and _signed(t_1 - s_b, thr_scale) > 0:
        shortcut = "P3"

    chain = None
    if _signed(s_a - t_2, thr_scale) > 0:
        chain = "P1"
    elif (_signed(s_a - t_1, thr_scale) > 0
          and _signed(t_2 - s_b, thr_scale) > 0):
        chain = "P2"
    elif _signed(t_1 - s_b, thr_scale) > 0:
        chain = "P3"

    # threshold/sign equivalences: t_2 < S'_A <-> w_L* - p_2* < 0 and
    # t_1 < S'_A <-> w_L* - p_1* < 0 (both follow from the zero-profit rows)
    mism = []
    lhs2 = _signed(s_a - t_2, thr_scale)
    if lhs2 != 0 and sign_wl_p2 != 0 and lhs2 != -sign_wl_p2:
        mism.append("S'(R_L2) threshold vs sign(w_L* - p_2*)")
    lhs1 = _signed(s_a - t_1, thr_scale)
    if lhs1 != 0 and sign_wl_p1 != 0 and lhs1 != -sign_wl_p1:
        mism.append("S'(R_L1) threshold vs sign(w_L* - p_1*)")

    tests = {
        "w_L_minus_p1_sign": sign_wl_p1,
        "w_L_minus_p2_sign": sign_wl_p2,
        "s_a": s_a, "s_b": s_b,
        "threshold_R_L1": t_1, "threshold_R_L2": t_2,
    }
    if shortcut is not None and shortcut == chain and not mism:
        verdict = shortcut
    else:
        verdict = "ambiguous"
    return CorollaryResult(verdict, shortcut, chain, tests, tuple(mism))


def consistency_checks(obs: Observation) -> dict:
    """Model-consistency diagnostics on measured data.

    Reports the signs of H_j and H0, the zero-profit and aggregation
    residuals, and the sign-letter memberships; violations mark the data as
    inconsistent with the 3x2 model assumptions.
    """
    failures = []
    scale = obs.rate_scale()
    out = {}

    d10 = abs(float(obs.a0_prime @ obs.theta_factor))
    out["d10_residual"] = d10
    if d10 > DATA_TOL * max(scale, 1.0):
        failures.append("aggregate input-coefficient changes do not "
                        "income-weight to zero")

    h0 = float(obs.w_star @ (obs.a0_prime * obs.theta_factor))
    out["H0"] = h0
    if _signed(h0, scale * scale) > 0:
        failures.append("H0 > 0")

    if obs.a_star is not None:
        eq5 = np.einsum("ij,ij->j", obs.theta_share, obs.a_star)
        out["zero_profit_residuals"] = [abs(float(v)) for v in eq5]
        if np.max(np.abs(eq5)) > DATA_TOL * max(scale, 1.0):
            failures.append("per-sector share-weighted a* rows do not sum to zero")
        H = np.einsum("i,ij,ij->j", obs.w_star, obs.a_star, obs.theta_share)
        out["H"] = H.tolist()
        for j in range(2):
            if _signed(float(H[j]), scale * scale) > 0:
                failures.append(f"H_{j+1} > 0")

    ranking = ranking_label(obs.xyz, tol=DEAD_BAND * scale)
    out["ranking"] = ranking
    agg = sign_label(obs.a0_prime, dead_band=DEAD_BAND * scale)
    out["a0_label"] = agg
    if ranking == "X>Z>Y" and agg in ("E", "F"):
        failures.append(f"aggregate sign label {agg} excluded under ranking X>Z>Y")
    if obs.a_star is not None:
        sec = [sign_label(obs.a_star[:, j], dead_band=DEAD_BAND * scale)
               for j in range(2)]
        out["sector_labels"] = sec
        if ranking == "X>Z>Y":
            for j, lab in enumerate(sec):
                if lab in ("E", "F"):
                    failures.append(f"sector {j+1} sign label {lab} excluded "
                                    "under ranking X>Z>Y")
    out["consistent"] = not failures
    out["failures"] = failures
    return out


@dataclass(frozen=True)
class EstimateReport:
    P: float
    preprocess: PreprocessInfo
    theorem1: Theorem1Verdict
    corollary: CorollaryResult | None
    diagnostics: dict
    subregion_verdict: str
    rybczynski: object  # sign matrix (list) or list of candidate matrices or None

    def to_dict(self) -> dict:
        t = self.theorem1
        return {
            "P": self.P,
            "factor_permutation": [FACTORS[i] for i in (0, 1, 2)],
            "input_factor_roles": list(self.preprocess.permutation),
            "time_reversed": self.preprocess.reversed,
            "ranking": t.ranking,
            "a0_sign_label": t.a0_label,
            "point_a": None if t.point_a is None else list(t.point_a.coords()),
            "point_b": None if t.point_b is None else list(t.point_b.coords()),
            "point_a_quadrant": None if t.point_a is None
            else quadrant(t.point_a)[0].value,
            "point_b_quadrant": None if t.point_b is None
            else quadrant(t.point_b)[0].value,
            "bounds": t.bounds,
            "quadrant_verdict": t.verdict,
            "failed_preconditions": list(t.failed_preconditions),
            "subregion_verdict": self.subregion_verdict,
            "corollary": None if self.corollary is None else {
                "verdict": self.corollary.verdict,
                "shortcut": self.corollary.shortcut,
                "chain": self.corollary.chain,
                "tests": self.corollary.tests,
                "equivalence_mismatches": list(self.corollary.equivalence_mismatches),
            },
            "rybczynski": self.rybczynski,
            "diagnostics": self.diagnostics,
        }


def run_pipeline(obs: Observation, time_reversal: bool = False) -> EstimateReport:
    """Full estimation pipeline on one observation."""
    norm, info = preprocess(obs, time_reversal=time_reversal)
    t1v = theorem1_verdict(norm)
    diag = consistency_checks(norm)
    corol = None
    if t1v.verdict == "quadrant IV":
        corol = corollary1_subregion(norm, t1v)
        sub = corol.verdict
    elif t1v.quadrant_iv:
        sub = "quadrant-IV (case D); no subregion test applies"
    else:
        sub = "not-quadrant-IV"

    ryb = None
    if sub in ("P1", "P2", "P3"):
        ryb = RYBCZYNSKI_PATTERNS[SubregionLabel[sub]].tolist()
    elif t1v.quadrant_iv:
        ryb = [RYBCZYNSKI_PATTERNS[lab].tolist()
               for lab in (SubregionLabel.P1, SubregionLabel.P2, SubregionLabel.P3)]
    return EstimateReport(norm.P, info, t1v, corol, diag, sub, ryb)
