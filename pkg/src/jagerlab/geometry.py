"""The folded pairing map, strips of orbit states, and their image regions.

The map

    Psi_k(x, y) = (1/(x-y), -xy / (k(x-y)))

carries orbit states to approximation pairs.  It is invariant under the
reflection (x, y) -> (-y, -x) about the line x + y = 0 and injective on
either side of that line, so it folds the plane in two; for k < 1 the
digit-0 strip straddles the crease and the map loses injectivity there.

Strips, their image quadrangles, and the digit-0 image region for k < 1
are provided with three-valued membership: points within eps_boundary of
a boundary are reported as "boundary" rather than being forced to a side.
Margins are measured in the (u, v) plane, normalized by the gradient of
the active constraint, so the dead zone has uniform width along every
boundary piece.

Membership in the full space of pairs (the union of all strip images) is
decided by the existence of a preimage root inside the strips; the root
conditions rewrite exactly as line and hyperbola constraints, which is
the form evaluated here.  A literal quadrangle-plus-hyperbola comparison
region is kept alongside for reconciliation reports; the two disagree
near the v axis and the discrepancy is reported, never asserted away.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .scalar import DomainError


class Location(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


class GammaMode(enum.Enum):
    CONSTRUCTIVE = "constructive-union"
    LITERAL = "corollary-literal"


def _classify(margin: float, eps: float) -> Location:
    if margin > eps:
        return Location.INSIDE
    if margin < -eps:
        return Location.OUTSIDE
    return Location.BOUNDARY


# -- the map and its fold --------------------------------------------------


def psi(k, p):
    """Image (u, v) of an orbit state (x, y); undefined on x == y."""
    x, y = p
    if x == y:
        raise DomainError("psi is singular on the diagonal x == y")
    d = x - y
    return (1 / d, -(x * y) / (k * d))


def reflect(p):
    """The fold (x, y) -> (-y, -x); psi(k, p) == psi(k, reflect(p))."""
    x, y = p
    return (-y, -x)


def psi_preimage(k, q):
    """Real preimages of (u, v) under the pairing map, canonical root first.

    The canonical root satisfies x + y <= 0; the second root is its
    reflection.  Returns one root when (u, v) sits on the critical
    hyperbola 4kuv = 1, none when it lies beyond.  Floating point only.
    """
    u, v = float(q[0]), float(q[1])
    k = float(k)
    if u <= 0:
        raise DomainError(f"preimages need u > 0, got u={u}")
    disc = 1.0 - 4.0 * k * u * v
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    # stable forms: no cancellation as disc -> 1 (u -> 0)
    x = 2.0 * k * v / (1.0 + s)
    y = -(1.0 + s) / (2.0 * u)
    if disc == 0.0:
        return [(x, y)]
    return [(x, y), (-y, -x)]


# -- strips of orbit states ------------------------------------------------


@dataclass(frozen=True)
class Strip:
    """Orbit states with current digit a: (0,1) x (-k-a-1, -k-a].

    The y interval is half-open exactly as written: the top is included,
    the bottom excluded.
    """

    k: object
    a: int

    def __post_init__(self):
        if self.a < 0:
            raise DomainError("strip digits are nonnegative")
        if not self.k > 0:
            raise DomainError("strip parameter k must be positive")

    @property
    def y_top(self):
        return -(self.k + self.a)

    @property
    def y_bottom(self):
        return -(self.k + self.a + 1)

    def contains(self, p) -> bool:
        x, y = p
        return 0 < x < 1 and self.y_bottom < y <= self.y_top

    def contains_with_slack(self, p, eps: float) -> bool:
        x, y = (float(p[0]), float(p[1]))
        return (
            -eps < x < 1 + eps
            and float(self.y_bottom) - eps < y <= float(self.y_top) + eps
        )


def strip_contains(strip: Strip, p) -> bool:
    return strip.contains(p)


# -- convex image quadrangles ----------------------------------------------


@dataclass(frozen=True)
class QuadRegion:
    """A simple convex quadrangle, vertices in counterclockwise order."""

    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) != 4 or len(set(self.vertices)) != 4:
            raise DomainError("a quadrangle needs four distinct vertices")

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % 4]) for i in range(4)]

    def signed_margin(self, p) -> float:
        """Distance into the quadrangle (negative outside), in uv units."""
        px, py = float(p[0]), float(p[1])
        worst = math.inf
        for (ax, ay), (bx, by) in self.edges():
            ax, ay, bx, by = float(ax), float(ay), float(bx), float(by)
            ex, ey = bx - ax, by - ay
            cross = ex * (py - ay) - ey * (px - ax)
            worst = min(worst, cross / math.hypot(ex, ey))
        return worst

    def classify(self, p, eps_boundary: float = 1e-9) -> Location:
        return _classify(self.signed_margin(p), eps_boundary)

    def closed_polyline(self):
        return list(self.vertices) + [self.vertices[0]]


def pa_sharp_quad(k, a: int) -> QuadRegion:
    """Image quadrangle of the digit-a strip, valid where the map does not
    fold across it (a >= 1, or any a when k >= 1).

    Vertices, counterclockwise:
    (1/(k+a), 0), (1/(k+a+1), (k+a)/(k(k+a+1))),
    (1/(k+a+2), (k+a+1)/(k(k+a+2))), (1/(k+a+1), 0).
    The middle two lie on the line u + k v = 1; the strip's top and
    bottom edges map onto the two slanted sides, the right edge onto the
    u + kv = 1 side, and the left edge onto the v = 0 side between
    u = 1/(k+a+1) and u = 1/(k+a).  Adjacent digit images share their
    slanted sides, fanning out below u + kv = 1.  At k + a = 1 the first
    three vertices are collinear and the quadrangle degenerates to a
    triangle; classification is unaffected.
    """
    if a < 0:
        raise DomainError("strip digits are nonnegative")
    if k < 1 and a == 0:
        raise DomainError(
            "the digit-0 strip folds when k < 1; use the five-curve region"
        )
    s = k + a
    zero = k - k  # matches the arithmetic type of k
    return QuadRegion(
        vertices=(
            (1 / s, zero),
            (1 / (s + 1), s / (k * (s + 1))),
            (1 / (s + 2), (s + 1) / (k * (s + 2))),
            (1 / (s + 1), zero),
        )
    )


def corollary_quad(k) -> QuadRegion:
    """The literal comparison quadrangle: (0,0), (1/k,0),
    (1/(k+1), 1/(k+1)), (0, 1/(k+1))."""
    zero = k - k
    return QuadRegion(
        vertices=(
            (zero, zero),
            (1 / k, zero),
            (1 / (k + 1), 1 / (k + 1)),
            (zero, 1 / (k + 1)),
        )
    )


# -- digit-0 image region for k < 1 ----------------------------------------


def _line_margin(c_u: float, c_v: float, rhs: float, u: float, v: float) -> float:
    """Signed margin of c_u*u + c_v*v <= rhs, gradient-normalized."""
    return (rhs - c_u * u - c_v * v) / math.hypot(c_u, c_v)


def _hyperbola_margin(k: float, u: float, v: float) -> float:
    """Signed margin of 4kuv <= 1, gradient-normalized."""
    return (1.0 - 4.0 * k * u * v) / (4.0 * k * math.hypot(u, v))


def _p0_margin(k: float, u: float, v: float) -> float:
    """Distance into the digit-0 image region for k < 1 (negative outside).

    The region is bounded below by v = 0 and the line
    (k+1)^2 u + k v = k+1, and above by a three-piece envelope:
    u + kv = 1 up to u = 1/2, the hyperbola 4kuv = 1 across the fold
    (the lines are tangent to it at the junctions), and ku + v = 1
    beyond u = 1/(2k).
    """
    margins = [v]
    margins.append(_line_margin(-((k + 1) ** 2), -k, -(k + 1), u, v))
    if u < 0.5:
        margins.append(_line_margin(1.0, k, 1.0, u, v))
    elif u <= 1.0 / (2.0 * k):
        margins.append(_hyperbola_margin(k, u, v))
    else:
        margins.append(_line_margin(k, 1.0, 1.0, u, v))
    return min(margins)


def p0_sharp_contains(k, q, eps_boundary: float = 1e-9) -> Location:
    """Three-valued membership in the digit-0 image region (k < 1 only)."""
    k = float(k)
    if not k < 1:
        raise DomainError("the five-curve region only exists for k < 1")
    return _classify(_p0_margin(k, float(q[0]), float(q[1])), eps_boundary)


@dataclass(frozen=True)
class LabeledCurve:
    label: str
    points: tuple

    def __iter__(self):
        return iter(self.points)


def _segment(label: str, p0, p1, n: int) -> LabeledCurve:
    (x0, y0), (x1, y1) = p0, p1
    if n < 2:
        n = 2
    pts = [
        (x0 + (x1 - x0) * i / (n - 1), y0 + (y1 - y0) * i / (n - 1))
        for i in range(n)
    ]
    pts[0], pts[-1] = (x0, y0), (x1, y1)
    return LabeledCurve(label, tuple(pts))


def hyperbola_arc(k, n: int = 256, label: str = "hyperbola_arc") -> LabeledCurve:
    """The arc of 4kuv = 1 between (1/2, 1/(2k)) and (1/(2k), 1/2)."""
    k = float(k)
    u0, u1 = 0.5, 1.0 / (2.0 * k)
    pts = []
    for i in range(n):
        u = u0 + (u1 - u0) * i / (n - 1)
        pts.append((u, 1.0 / (4.0 * k * u)))
    pts[0] = (u0, 1.0 / (2.0 * k))
    pts[-1] = (u1, 0.5)
    return LabeledCurve(label, tuple(pts))


def p0_boundary_curves(k, arc_points: int = 256, line_points: int = 2) -> list[LabeledCurve]:
    """The five boundary curves of the digit-0 image region for k < 1.

    1. segment of ku + v = 1 from (1/(2k), 1/2) to (1/k, 0)
    2. segment of v = 0 from (1/(k+1), 0) to (1/k, 0)
    3. segment of (k+1)^2 u + kv = k+1 from (1/(k+1), 0)
       to (1/(k+2), (k+1)/(k(k+2)))
    4. segment of u + kv = 1 from (1/(k+2), (k+1)/(k(k+2))) to (1/2, 1/(2k))
    5. the hyperbola arc from (1/2, 1/(2k)) to (1/(2k), 1/2)
    """
    k = float(k)
    if not 0 < k < 1:
        raise DomainError("the five-curve region only exists for 0 < k < 1")
    c3_top = (1.0 / (k + 2.0), (k + 1.0) / (k * (k + 2.0)))
    return [
        _segment("p0_item_1", (1.0 / (2.0 * k), 0.5), (1.0 / k, 0.0), line_points),
        _segment("p0_item_2", (1.0 / (k + 1.0), 0.0), (1.0 / k, 0.0), line_points),
        _segment("p0_item_3", (1.0 / (k + 1.0), 0.0), c3_top, line_points),
        _segment("p0_item_4", c3_top, (0.5, 1.0 / (2.0 * k)), line_points),
        hyperbola_arc(k, arc_points, label="p0_item_5"),
    ]


# -- the full space of pairs ------------------------------------------------


def gamma_margin(k, q, mode: GammaMode = GammaMode.CONSTRUCTIVE) -> float:
    """Signed uv-distance into the space of pairs (negative outside)."""
    k = float(k)
    u, v = float(q[0]), float(q[1])
    if mode is GammaMode.CONSTRUCTIVE:
        if u <= 0:
            raise DomainError(f"pair membership needs u > 0, got u={u}")
        margins = [v]
        if k >= 1.0:
            margins.append(_line_margin(1.0, k, 1.0, u, v))
            margins.append(_line_margin(k, 1.0, 1.0, u, v))
        elif u < 0.5:
            margins.append(_line_margin(1.0, k, 1.0, u, v))
        elif u <= 1.0 / (2.0 * k):
            margins.append(_hyperbola_margin(k, u, v))
        else:
            margins.append(_line_margin(k, 1.0, 1.0, u, v))
        return min(margins)
    # literal: quadrangle, plus the hyperbola bulge between the two edge
    # lines and the arc when k < 1 (one reading of "the part of the
    # hyperbola between u = 1/2 and u = 1/(2k)")
    quad_m = corollary_quad(k).signed_margin((u, v))
    if k >= 1.0:
        return quad_m
    bulge_m = min(
        _line_margin(-k, -1.0, -1.0, u, v),
        _line_margin(-1.0, -k, -1.0, u, v),
        _hyperbola_margin(k, u, v),
    )
    return max(quad_m, bulge_m)


def gamma_contains(k, q, mode: GammaMode = GammaMode.CONSTRUCTIVE,
                   eps_boundary: float = 1e-9) -> Location:
    """Three-valued membership of an approximation pair candidate.

    Constructive mode is the ground truth: a point belongs iff some
    preimage root lands in a strip (0 < x < 1, y <= -k); those root
    conditions are evaluated in their line/hyperbola form.  Literal mode
    is the comparison region kept for reconciliation reports.
    """
    return _classify(gamma_margin(k, q, mode), eps_boundary)


def gamma_root_test(k, q) -> bool:
    """Direct preimage test (no tolerance): some root lies in a strip."""
    k = float(k)
    u, v = float(q[0]), float(q[1])
    if u <= 0:
        raise DomainError(f"pair membership needs u > 0, got u={u}")
    return any(0 < x < 1 and y <= -k for x, y in psi_preimage(k, (u, v)))


def gamma_piecewise_contains(k, q, eps_boundary: float = 1e-9) -> Location:
    """Union-of-pieces membership: quadrangles for folded-free strips plus
    the five-curve region as the digit-0 piece when k < 1.

    An independent route to the same set, used to cross-validate the
    constructive test.  A point inside any piece is inside the union even
    if it sits on a shared internal edge of two pieces.
    """
    k = float(k)
    u, v = float(q[0]), float(q[1])
    if u <= 0:
        raise DomainError(f"pair membership needs u > 0, got u={u}")
    inv = 1.0 / u
    a_lo = max(0, math.ceil(inv - k - 2.0) - 1)
    a_hi = max(0, math.floor(inv - k) + 1)
    best = Location.OUTSIDE
    for a in range(a_lo, a_hi + 1):
        if a == 0 and k < 1.0:
            piece = p0_sharp_contains(k, (u, v), eps_boundary)
        else:
            piece = pa_sharp_quad(k, a).classify((u, v), eps_boundary)
        if piece is Location.INSIDE:
            return Location.INSIDE
        if piece is Location.BOUNDARY:
            best = Location.BOUNDARY
    return best


def gamma_boundary_polyline(k, arc_points: int = 256) -> list[LabeledCurve]:
    """Outer boundary of the constructive union, for plotting."""
    k = float(k)
    if k >= 1.0:
        corner = (1.0 / (k + 1.0), 1.0 / (k + 1.0))
        return [
            _segment("gamma_edge_bottom", (0.0, 0.0), (1.0 / k, 0.0), 2),
            _segment("gamma_edge_right", (1.0 / k, 0.0), corner, 2),
            _segment("gamma_edge_upper", corner, (0.0, 1.0 / k), 2),
        ]
    return [
        _segment("gamma_edge_bottom", (0.0, 0.0), (1.0 / k, 0.0), 2),
        _segment("gamma_edge_right", (1.0 / k, 0.0), (1.0 / (2.0 * k), 0.5), 2),
        hyperbola_arc(k, arc_points, label="gamma_edge_arc"),
        _segment("gamma_edge_upper", (0.5, 1.0 / (2.0 * k)), (0.0, 1.0 / k), 2),
    ]
