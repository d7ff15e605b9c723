"""Objects in the (S', U') plane: boundary hyperbola, vector line, segment AB,
special points Q and R, and the subregion -> Rybczynski sign-pattern map."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (AsymptoteHit, DegenerateShares, DegenerateShock,
                     TangentOrComplexRoots, UnmappedRegion)
from .model import Economy, K, L, RatioPoint, T, ews_matrix
from .statics import Response

#: points closer than this to a subregion border line are labeled Boundary
BORDER_TOL = 1e-9
#: quadratic discriminants below this mean tangency / missing intersections
DISCRIMINANT_TOL = 1e-14


def boundary_u(s: float, theta_L_over_K: float) -> float:
    """U' on the boundary hyperbola at abscissa S'.

    U' = -(theta_L/theta_K) * S'/(S'+1): passes through the origin, vertical
    asymptote S' = -1, horizontal asymptote U' = -theta_L/theta_K.
    """
    if abs(s + 1.0) < 1e-12:
        raise AsymptoteHit(f"boundary evaluated at S' = {s} (asymptote S' = -1)")
    return -theta_L_over_K * s / (s + 1.0)


def region_contains(p: RatioPoint, sign_g_LT: int | None = None) -> bool:
    """Strict feasible-region test for a ratio point.

    The admissible side of the boundary flips with the sign of g_LT:
    above the curve for g_LT > 0, below it for g_LT < 0.
    """
    sign = p.g_LT_sign if sign_g_LT is None else sign_g_LT
    b = boundary_u(p.s, p.theta_L_over_K)
    return p.u > b if sign > 0 else p.u < b


class Quadrant(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    BOUNDARY = "boundary"


#: quadrant of (S', U') -> implied sign triple of (g_LK, g_LT, g_KT)
QUADRANT_SIGNS = {
    Quadrant.I: (1, 1, 1),
    Quadrant.II: (-1, 1, 1),
    Quadrant.III: (1, -1, 1),
    Quadrant.IV: (1, 1, -1),
}


def quadrant(p: RatioPoint) -> tuple:
    """Quadrant of the ratio point and the EWS sign triple it implies."""
    if p.s == 0.0 or p.u == 0.0:
        return Quadrant.BOUNDARY, None
    if p.s > 0:
        q = Quadrant.I if p.u > 0 else Quadrant.IV
    else:
        q = Quadrant.II if p.u > 0 else Quadrant.III
    return q, QUADRANT_SIGNS[q]


@dataclass(frozen=True)
class VectorLine:
    """The straight line U' = -a1*S' + b1 the ratio vector must lie on,
    given one non-degenerate shock. g0 is the (positive) common scale
    factor tying the line to the shock."""

    a1: float
    b1: float
    g0: float

    def u_at(self, s: float) -> float:
        return -self.a1 * s + self.b1


def vector_line(resp: Response, e: Economy) -> VectorLine:
    """Build the vector line from a solved response.

    a1 = a_T0' theta_T W_LK / (a_L0' theta_K W_KT),
    b1 = a_K0' W_LT / (a_L0' W_KT), with W_ih = w_i* - w_h*.
    """
    a0 = resp.a0_prime
    W = resp.W
    if abs(W[K, T]) < 1e-12 or abs(a0[L]) < 1e-12:
        raise DegenerateShock(
            "uniform factor-price change or vanishing a_L0'; vector line undefined")
    tf = e.theta_factor
    a1 = a0[T] * tf[T] * W[L, K] / (a0[L] * tf[K] * W[K, T])
    b1 = a0[K] * W[L, T] / (a0[L] * W[K, T])
    g = ews_matrix(e)
    g0 = (g.g_KT * tf[K] * (g.g_LK + g.g_LT) + g.g_LT * g.g_LK * tf[L])
    return VectorLine(float(a1), float(b1), float(g0))


def line_boundary_intersections(line: VectorLine, theta_L_over_K: float) -> tuple:
    """S' roots of the line/hyperbola system, smaller first.

    Substituting the line into the boundary gives
    a1*S'^2 - (b1 - a1 + r)*S' - b1 = 0 with r = theta_L/theta_K.
    """
    r = theta_L_over_K
    qa, qb, qc = line.a1, -(line.b1 - line.a1 + r), -line.b1
    if abs(qa) < 1e-15:
        raise TangentOrComplexRoots("vector line is horizontal; single intersection")
    disc = qb * qb - 4.0 * qa * qc
    if disc < DISCRIMINANT_TOL:
        raise TangentOrComplexRoots(
            f"discriminant {disc:.3e}: line tangent to or missing the boundary")
    sq = math.sqrt(disc)
    roots = sorted(((-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)))
    return tuple(roots)


@dataclass(frozen=True)
class SegmentAB:
    """Chord of the boundary cut out by the vector line.

    When both endpoints lie on the same branch of the hyperbola (both
    abscissas on the same side of the asymptote S' = -1), the feasible part
    of the line is exactly this chord and the ratio vector lies on it,
    endpoints included. When the endpoints straddle the asymptote the
    feasible part of the line is the complement of the chord, and the ratio
    vector falls outside the S' interval."""

    point_a: RatioPoint
    point_b: RatioPoint
    line: VectorLine
    quadratic_roots: tuple

    def same_branch(self) -> bool:
        return (self.point_a.s + 1.0) * (self.point_b.s + 1.0) > 0

    def s_interval(self) -> tuple:
        lo, hi = sorted((self.point_a.s, self.point_b.s))
        return lo, hi

    def contains(self, p: RatioPoint, tol: float = 1e-8) -> bool:
        lo, hi = self.s_interval()
        width = max(hi - lo, 1.0)
        if not (lo - tol * width <= p.s <= hi + tol * width):
            return False
        scale = max(1.0, abs(p.u))
        return abs(p.u - self.line.u_at(p.s)) <= tol * scale


def segment_ab(line: VectorLine, resp: Response, e: Economy) -> SegmentAB:
    """Endpoints A and B of the boundary chord, in closed form.

    A = (-W_TL/W_KL, (theta_L/theta_K)(-W_LT/W_KT)) and
    B = ((a_K0'/a_T0')(theta_K/theta_T), a_K0'/a_L0'); both coincide with the
    roots of the line/boundary quadratic.
    """
    W, a0 = resp.W, resp.a0_prime
    tf = e.theta_factor
    for name, v in (("W_KL", W[K, L]), ("W_KT", W[K, T]),
                    ("a_T0'", a0[T]), ("a_L0'", a0[L])):
        if abs(v) < 1e-12:
            raise DegenerateShock(f"{name} = {v:.3e}; segment endpoints undefined")
    r = float(tf[L] / tf[K])
    sign = 1 if ews_matrix(e).g_LT > 0 else -1
    a = RatioPoint(float(-W[T, L] / W[K, L]), float(r * (-W[L, T] / W[K, T])),
                   r, sign)
    b = RatioPoint(float(a0[K] / a0[T] * (tf[K] / tf[T])), float(a0[K] / a0[L]),
                   r, sign)
    roots = line_boundary_intersections(line, r)
    return SegmentAB(a, b, line, roots)


def point_q(e: Economy) -> RatioPoint:
    """Common intersection point of the subregion border lines.

    Q = (B/A, (B/E)(theta_L/theta_K)) with (A, B, E) the between-sector share
    differences of (T, K, L); under the intensity ranking Q is in quadrant III.
    """
    th = e.theta_share
    da = th[T, 0] - th[T, 1]
    db = th[K, 0] - th[K, 1]
    de = th[L, 0] - th[L, 1]
    if abs(da) < 1e-12 or abs(de) < 1e-12:
        raise DegenerateShares(
            f"share differences (A, E) = ({da:.3e}, {de:.3e}) vanish; Q undefined")
    r = e.theta_L_over_K
    return RatioPoint(float(db / da), float(db / de * r), r)


def points_r(e: Economy) -> tuple:
    """Boundary points R_L1 and R_L2 delimiting the quadrant-IV subregions.

    R_Lj = (theta_Kj/theta_Tj, -theta_Kj/(1 - theta_Lj) * theta_L/theta_K);
    both satisfy the boundary equation identically, and the intensity
    ranking puts R_L1 left of R_L2.
    """
    th = e.theta_share
    r = e.theta_L_over_K
    pts = []
    for j in range(2):
        s = th[K, j] / th[T, j]
        u = -th[K, j] / (1.0 - th[L, j]) * r
        pts.append(RatioPoint(float(s), float(u), r))
    return tuple(pts)


class SubregionLabel(enum.Enum):
    QUAD_I = "quadrant I"
    QUAD_II = "quadrant II"
    QUAD_III = "quadrant III"
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    QUAD_IV_UNCLASSIFIED = "quadrant IV (unclassified)"
    BOUNDARY = "boundary"


_QUADRANT_TO_LABEL = {
    Quadrant.I: SubregionLabel.QUAD_I,
    Quadrant.II: SubregionLabel.QUAD_II,
    Quadrant.III: SubregionLabel.QUAD_III,
    Quadrant.BOUNDARY: SubregionLabel.BOUNDARY,
}


def _line_side(q: RatioPoint, r: RatioPoint, p) -> float:
    """Signed cross product of (r - q) with (p - q); sign picks the side."""
    ps, pu = (p.s, p.u) if isinstance(p, RatioPoint) else p
    return (r.s - q.s) * (pu - q.u) - (r.u - q.u) * (ps - q.s)


def _border_distance(q: RatioPoint, r: RatioPoint, p) -> float:
    return abs(_line_side(q, r, p)) / math.hypot(r.s - q.s, r.u - q.u)


def classify_subregion(p: RatioPoint, e: Economy,
                       border_tol: float = BORDER_TOL) -> SubregionLabel:
    """Quadrant-IV subregion of a ratio point (P1/P2/P3), or its quadrant.

    The two border lines run through Q and R_L2 (P1/P2 border) and through Q
    and R_L1 (P2/P3 border). Side orientation is calibrated against boundary
    points just outside the R thresholds, so that on-boundary points
    reproduce the S'-threshold ordering P3 < S'(R_L1) < P2 < S'(R_L2) < P1.
    """
    quad, _ = quadrant(p)
    if quad is not Quadrant.IV:
        return _QUADRANT_TO_LABEL[quad]
    q = point_q(e)
    r_l1, r_l2 = points_r(e)
    r = e.theta_L_over_K

    if (_border_distance(q, r_l2, p) < border_tol
            or _border_distance(q, r_l1, p) < border_tol):
        return SubregionLabel.BOUNDARY

    # calibration points on the boundary curve just beyond each threshold
    s1 = r_l2.s * (1.0 + 1e-3)
    ref_p1 = (s1, boundary_u(s1, r))
    s3 = r_l1.s * (1.0 - 1e-3)
    ref_p3 = (s3, boundary_u(s3, r))

    on_p1_side = _line_side(q, r_l2, p) * _line_side(q, r_l2, ref_p1) > 0
    on_p3_side = _line_side(q, r_l1, p) * _line_side(q, r_l1, ref_p3) > 0
    if on_p1_side and on_p3_side:
        return SubregionLabel.QUAD_IV_UNCLASSIFIED
    if on_p1_side:
        return SubregionLabel.P1
    if on_p3_side:
        return SubregionLabel.P3
    return SubregionLabel.P2


#: subregion -> Rybczynski sign matrix, rows = goods (1, 2), cols = (V_T, V_K, V_L)
RYBCZYNSKI_PATTERNS = {
    SubregionLabel.P1: np.array([[1, -1, -1], [-1, 1, 1]]),
    SubregionLabel.P2: np.array([[1, -1, 1], [-1, 1, 1]]),
    SubregionLabel.P3: np.array([[1, -1, 1], [-1, 1, -1]]),
}


def rybczynski_pattern(label: SubregionLabel) -> np.ndarray:
    """Tabulated sign matrix of output responses to endowment changes."""
    try:
        return RYBCZYNSKI_PATTERNS[label].copy()
    except KeyError:
        raise UnmappedRegion(
            f"no Rybczynski sign matrix is tabulated for {label.value}") from None
