"""Exact-predicate planar geometry.

Points, segments and polylines; random rotation; x-monotone subdivision;
planarization of crossing segment sets; and the trapezoidal decomposition of
non-crossing segments and isolated points with logarithmic point location.

Numeric policy: all stored coordinates are Python floats.  Sign decisions
(orientation, segment-vs-segment comparison at an abscissa) run a floating
point filter first and fall back to exact rational arithmetic on the float
values, so no epsilon ever decides a predicate.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import CrossingDetected, DegenerateCrossing, DegenerateInput, OutOfBounds

__all__ = [
    "Point",
    "Segment",
    "Polyline",
    "Trapezoid",
    "TrapezoidMap",
    "rotate_point",
    "build_trapezoid_map",
    "subdivide_x_monotone",
    "planarize_segments",
    "orient",
    "proper_crossing",
    "segment_intersection",
]


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    """Non-vertical segment, normalized so ax < bx."""

    ax: float
    ay: float
    bx: float
    by: float
    source: object

    @staticmethod
    def make(a, b, source=None) -> "Segment":
        ax, ay = a
        bx, by = b
        if ax == bx:
            if ay == by:
                raise DegenerateInput(f"zero-length segment at {a}")
            raise DegenerateInput(f"vertical segment at x={ax}")
        if ax < bx:
            return Segment(ax, ay, bx, by, source)
        return Segment(bx, by, ax, ay, source)

    @property
    def left(self):
        return (self.ax, self.ay)

    @property
    def right(self):
        return (self.bx, self.by)


class Polyline(NamedTuple):
    pts: tuple
    source: object

    @staticmethod
    def make(pts, source=None) -> "Polyline":
        pts = tuple((float(x), float(y)) for x, y in pts)
        if len(pts) < 2:
            raise DegenerateInput("polyline needs at least 2 points")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise DegenerateInput("repeated consecutive polyline point")
        return Polyline(pts, source)


def rotate_point(p, theta):
    """Rotate p about the origin by theta; never mutates stored data."""
    c = math.cos(theta)
    s = math.sin(theta)
    x, y = p
    return (x * c - y * s, x * s + y * c)


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

_ORIENT_EPS = 3.3306690738754716e-16  # (3 + 16u) * u, u = 2^-53


def orient(ax, ay, bx, by, cx, cy):
    """Sign of cross(b - a, c - a): +1 if c is left of a->b (above, for a
    left-to-right segment), -1 if right, 0 if collinear."""
    l = (bx - ax) * (cy - ay)
    r = (by - ay) * (cx - ax)
    det = l - r
    bound = _ORIENT_EPS * (abs(l) + abs(r))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    if (cx == ax and cy == ay) or (cx == bx and cy == by):
        return 0
    det = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def _cmp_seg_at_x(s, t, x):
    """Sign of y_s(x) - y_t(x) for normalized segments, exact."""
    f = Fraction
    dsx = f(s[2]) - f(s[0])
    dtx = f(t[2]) - f(t[0])
    ys = f(s[1]) * dsx + (f(x) - f(s[0])) * (f(s[3]) - f(s[1]))
    yt = f(t[1]) * dtx + (f(x) - f(t[0])) * (f(t[3]) - f(t[1]))
    d = ys * dtx - yt * dsx  # both denominators positive
    if d > 0:
        return 1
    if d < 0:
        return -1
    return 0


def cmp_seg_at_x(s, t, x):
    """Sign of y_s(x) - y_t(x); float filter with exact fallback.

    When x is an endpoint abscissa of either segment the comparison reduces
    to a point-vs-segment orientation, which is much cheaper to decide
    exactly than the general rational comparison.
    """
    if x == t[0]:
        return -orient(s[0], s[1], s[2], s[3], x, t[1])
    if x == t[2]:
        return -orient(s[0], s[1], s[2], s[3], x, t[3])
    if x == s[0]:
        return orient(t[0], t[1], t[2], t[3], x, s[1])
    if x == s[2]:
        return orient(t[0], t[1], t[2], t[3], x, s[3])
    ys = s[1] + (x - s[0]) * (s[3] - s[1]) / (s[2] - s[0])
    yt = t[1] + (x - t[0]) * (t[3] - t[1]) / (t[2] - t[0])
    d = ys - yt
    bound = 1e-11 * (abs(ys) + abs(yt) + 1.0)
    if d > bound:
        return 1
    if -d > bound:
        return -1
    return _cmp_seg_at_x(s, t, x)


def _slope_cmp(s, t):
    """Sign of slope(s) - slope(t) for normalized segments."""
    l = (s[3] - s[1]) * (t[2] - t[0])
    r = (t[3] - t[1]) * (s[2] - s[0])
    d = l - r
    bound = _ORIENT_EPS * (abs(l) + abs(r))
    if d > bound:
        return 1
    if -d > bound:
        return -1
    d = (Fraction(s[3]) - Fraction(s[1])) * (Fraction(t[2]) - Fraction(t[0])) - (
        Fraction(t[3]) - Fraction(t[1])
    ) * (Fraction(s[2]) - Fraction(s[0]))
    if d > 0:
        return 1
    if d < 0:
        return -1
    return 0


def proper_crossing(s, t):
    """True iff open interiors of s and t intersect in exactly one point."""
    # Disjoint coordinate ranges cannot cross; plain float comparisons are
    # exact, so this rejection is safe.
    if s[2] <= t[0] or t[2] <= s[0]:
        return False
    if min(s[1], s[3]) >= max(t[1], t[3]) or min(t[1], t[3]) >= max(s[1], s[3]):
        return False
    o1 = orient(s[0], s[1], s[2], s[3], t[0], t[1])
    o2 = orient(s[0], s[1], s[2], s[3], t[2], t[3])
    if o1 * o2 >= 0:
        return False
    o3 = orient(t[0], t[1], t[2], t[3], s[0], s[1])
    o4 = orient(t[0], t[1], t[2], t[3], s[2], s[3])
    return o3 * o4 < 0


def segment_intersection(s, t):
    """Exact rational crossing point of two properly crossing segments,
    rounded to floats."""
    f = Fraction
    d1x, d1y = f(s[2]) - f(s[0]), f(s[3]) - f(s[1])
    d2x, d2y = f(t[2]) - f(t[0]), f(t[3]) - f(t[1])
    den = d1x * d2y - d1y * d2x
    if den == 0:
        raise DegenerateCrossing("parallel segments do not cross properly")
    u = ((f(t[0]) - f(s[0])) * d2y - (f(t[1]) - f(s[1])) * d2x) / den
    return (float(f(s[0]) + u * d1x), float(f(s[1]) + u * d1y))


# ---------------------------------------------------------------------------
# Trapezoid map
# ---------------------------------------------------------------------------

_LEAF, _XNODE, _YNODE = 0, 1, 2


class Trapezoid:
    """One sector: bounded above/below by a segment (None = bbox side) and
    left/right by the vertical walls through leftp/rightp."""

    __slots__ = ("top", "bottom", "leftp", "rightp", "leaf", "id")

    def __init__(self, top, bottom, leftp, rightp):
        self.top = top
        self.bottom = bottom
        self.leftp = leftp
        self.rightp = rightp
        self.leaf = None
        self.id = -1

    @property
    def leftx(self):
        return self.leftp[0]

    @property
    def rightx(self):
        return self.rightp[0]

    def __repr__(self):
        return f"Trapezoid(id={self.id}, x=[{self.leftx:.4g},{self.rightx:.4g}])"


class TrapezoidMap:
    """Trapezoidal decomposition of non-crossing segments plus isolated
    points inside a bounding box, built by randomized incremental insertion.

    Ownership of shared boundaries follows the fixed direction rule: a point
    on a boundary belongs to the sector reached by an infinitesimal move in
    +y, ties broken by a second-order move in +x.  locate() is total on the
    closed bbox under this rule.
    """

    def __init__(self, bbox):
        x0, y0, x1, y1 = bbox
        if not (x0 < x1 and y0 < y1):
            raise DegenerateInput("empty bounding box")
        self.bbox = (float(x0), float(y0), float(x1), float(y1))
        root = Trapezoid(None, None, (float(x0), float(y0)), (float(x1), float(y1)))
        leaf = [_LEAF, root]
        root.leaf = leaf
        self._root = leaf
        self._live = {root}
        self._seg_coords = set()
        # Wall fans: leftp -> live trapezoids bounded on the left by that
        # point's wall.  Lets walks advance by scanning a handful of
        # candidates instead of re-descending the search structure.
        self._fans = {root.leftp: [root]}
        self.trapezoids = []
        self.segments = []
        self.points = []  # every distinct inserted point (endpoints + isolated)
        self._finalized = False

    def _fan_add(self, tr):
        self._fans.setdefault(tr.leftp, []).append(tr)

    def _fan_del(self, tr):
        fan = self._fans.get(tr.leftp)
        if fan is not None:
            try:
                fan.remove(tr)
            except ValueError:
                pass

    def _start_trap(self, seg, above=True):
        """First trapezoid of a walk along seg."""
        if self._finalized:
            if (seg[0], seg[1]) in self._fans:
                t = self._start_at_vertex(seg, above)
                if t is not None:
                    return t
            else:
                return self.owner_trap((seg[0], seg[1]))
        fan = self._fans.get((seg[0], seg[1]))
        if fan is not None:
            c = self._scan_fan(fan, seg, seg[0], above)
            if c is not None:
                return c
        return self._locate_on(seg, seg[0], self_above=above)

    def _advance(self, seg, w, above=True):
        """Next trapezoid after crossing the wall at point w along seg."""
        fan = self._fans.get(w)
        if fan is not None:
            c = self._scan_fan(fan, seg, w[0], above)
            if c is not None:
                return c
        return self._locate_on(seg, w[0], self_above=above)

    def _scan_fan(self, fan, seg, x, above):
        """Pick the fan member containing seg just right of x.

        Float filters reject clear misses; near-ties delegate to the exact
        containment predicate candidate by candidate.
        """
        s0 = seg[0]
        s1 = seg[1]
        s2 = seg[2]
        s3 = seg[3]
        if x == s0:
            ys = s1
        elif x == s2:
            ys = s3
        else:
            ys = s1 + (x - s0) * (s3 - s1) / (s2 - s0)
        for c in fan:
            top = c.top
            if top is not None:
                yt = top[1] + (x - top[0]) * (top[3] - top[1]) / (top[2] - top[0])
                d = ys - yt
                if d > 1e-11 * (abs(ys) + abs(yt) + 1.0):
                    continue
                if -d <= 1e-11 * (abs(ys) + abs(yt) + 1.0):
                    if self._contains_walk_point(c, seg, x, above):
                        return c
                    continue
            bot = c.bottom
            if bot is not None:
                yb = bot[1] + (x - bot[0]) * (bot[3] - bot[1]) / (bot[2] - bot[0])
                d = ys - yb
                if -d > 1e-11 * (abs(ys) + abs(yb) + 1.0):
                    continue
                if d <= 1e-11 * (abs(ys) + abs(yb) + 1.0):
                    if self._contains_walk_point(c, seg, x, above):
                        return c
                    continue
            return c
        return None

    # -- queries ------------------------------------------------------------

    def _locate_owner(self, qx, qy):
        """Descend with the ownership perturbation (+y primary, +x secondary).

        x ties go right, on-segment ties go above.
        """
        nd = self._root
        while True:
            k = nd[0]
            if k == _XNODE:
                nd = nd[3] if qx >= nd[1] else nd[2]
            elif k == _YNODE:
                s = nd[1]
                # Endpoint coincidence is exact float equality; skip the
                # orientation fallback for this frequent tie.
                if (qx == s[0] and qy == s[1]) or (qx == s[2] and qy == s[3]):
                    nd = nd[2]
                    continue
                side = orient(s[0], s[1], s[2], s[3], qx, qy)
                nd = nd[2] if side >= 0 else nd[3]
            else:
                return nd[1]

    def _locate_on(self, seg, x, self_above=True):
        """Trapezoid containing the point of `seg` at abscissa `x`, displaced
        infinitesimally to the right along `seg`.

        Used to start and advance insertion/verification walks.  When the
        descent meets `seg` itself the `self_above` flag picks the side.

        A segment ending exactly at the walk point and collinear with `seg`
        cannot discriminate the two branches (the displaced point lies on its
        extension line beyond its span).  Such forks are resolved by
        descending one way, validating the landed trapezoid exactly, then
        retrying the other way, and finally scanning the live trapezoids.
        """
        trap, ok = self._descend_on(seg, x, self_above, True)
        if ok:
            return trap
        trap, ok = self._descend_on(seg, x, self_above, False)
        if ok:
            return trap
        for t in self._live:
            if self._contains_walk_point(t, seg, x, self_above):
                return t
        raise DegenerateInput(f"no trapezoid admits segment {seg} at x={x}")

    def _descend_on(self, seg, x, self_above, amb_above):
        s0, s1, s2, s3 = seg[0], seg[1], seg[2], seg[3]
        # When x is one of seg's endpoints the walk point is that endpoint;
        # endpoint coincidence with another segment is then a cheap tuple
        # comparison instead of an exact arithmetic fallback.
        if x == s0:
            qx, qy = s0, s1
            at_endpoint = True
        elif x == s2:
            qx, qy = s2, s3
            at_endpoint = True
        else:
            at_endpoint = False
            sdyx = (s3 - s1) / (s2 - s0)
        ambiguous = False
        nd = self._root
        while True:
            k = nd[0]
            if k == _XNODE:
                nd = nd[3] if x >= nd[1] else nd[2]
            elif k == _YNODE:
                t = nd[1]
                t0 = t[0]
                t1 = t[1]
                t2 = t[2]
                t3 = t[3]
                if t0 == s0 and t1 == s1 and t2 == s2 and t3 == s3:
                    nd = nd[2] if self_above else nd[3]
                    continue
                if at_endpoint:
                    if (qx == t0 and qy == t1) or (qx == t2 and qy == t3):
                        c = 0
                    else:
                        c = cmp_seg_at_x(seg, t, x)
                elif x != t0 and x != t2:
                    ys = s1 + (x - s0) * sdyx
                    yt = t1 + (x - t0) * (t3 - t1) / (t2 - t0)
                    d = ys - yt
                    bound = 1e-11 * (abs(ys) + abs(yt) + 1.0)
                    if d > bound:
                        c = 1
                    elif -d > bound:
                        c = -1
                    else:
                        c = _cmp_seg_at_x(seg, t, x)
                else:
                    c = cmp_seg_at_x(seg, t, x)
                if c == 0:
                    # The walk point lies on t: order the two segments by
                    # slope immediately to the right of the common point.
                    c = _slope_cmp(seg, t)
                    if c == 0:
                        if at_endpoint and qx == t2 and qy == t3:
                            ambiguous = True
                            c = 1 if amb_above else -1
                        else:
                            raise DegenerateInput(
                                "collinear overlapping segments"
                            )
                nd = nd[2] if c > 0 else nd[3]
            else:
                trap = nd[1]
                if not ambiguous:
                    return trap, True
                return trap, self._contains_walk_point(trap, seg, x, self_above)

    def _contains_walk_point(self, trap, seg, x, self_above=True):
        """Exact test: does trap (open interior, or the matching side when
        trap is bounded by seg itself) contain the point of seg at abscissa x
        displaced infinitesimally to the right along seg."""
        if not (trap.leftp[0] <= x < trap.rightp[0]):
            return False
        scoord = (seg[0], seg[1], seg[2], seg[3])
        top = trap.top
        if top is not None:
            if (top[0], top[1], top[2], top[3]) == scoord:
                if self_above:
                    return False
            else:
                c = cmp_seg_at_x(seg, top, x)
                if c > 0 or (c == 0 and _slope_cmp(seg, top) >= 0):
                    return False
        bot = trap.bottom
        if bot is not None:
            if (bot[0], bot[1], bot[2], bot[3]) == scoord:
                if not self_above:
                    return False
            else:
                c = cmp_seg_at_x(seg, bot, x)
                if c < 0 or (c == 0 and _slope_cmp(seg, bot) <= 0):
                    return False
        return True

    def locate(self, q):
        """Sector id owning q under the ownership rule; q must be in bbox."""
        x0, y0, x1, y1 = self.bbox
        qx, qy = q
        if not (x0 <= qx <= x1 and y0 <= qy <= y1):
            raise OutOfBounds(f"{q} outside bbox {self.bbox}")
        return self.owner_trap((qx, qy)).id

    def owner_sector_of_vertex(self, p):
        return self.locate(p)

    def owner_sector_of_segment(self, seg):
        """A segment belongs to the sector owning its left endpoint."""
        return self.locate((seg[0], seg[1]))

    # -- construction -------------------------------------------------------

    def insert_segment(self, seg):
        if self._finalized:
            raise DegenerateInput("map is immutable once finalized")
        ax, ay, bx, by, _src = seg
        x0, y0, x1, y1 = self.bbox
        if not (x0 < ax and bx < x1 and y0 < min(ay, by) and max(ay, by) < y1):
            raise OutOfBounds(f"segment {seg} not strictly inside bbox")
        if (ax, ay, bx, by) in self._seg_coords:
            raise DegenerateInput(f"duplicate segment coordinates {seg}")

        # Walk the trapezoids whose interiors the segment crosses.
        t = self._start_trap(seg)
        traps = [t]
        while t.rightp[0] < bx:
            w = t.rightp
            side = orient(ax, ay, bx, by, w[0], w[1])
            if side == 0:
                raise DegenerateInput(f"point {w} lies on segment {seg}")
            t = self._advance(seg, w)
            traps.append(t)

        for t in traps:
            if t.top is not None and proper_crossing(seg, t.top):
                raise CrossingDetected((seg, t.top))
            if t.bottom is not None and proper_crossing(seg, t.bottom):
                raise CrossingDetected((seg, t.bottom))

        p = (ax, ay)
        q = (bx, by)
        first, last = traps[0], traps[-1]
        p_new = p != first.leftp
        q_new = q != last.rightp
        if p_new and not first.leftx < ax:
            raise DegenerateInput(f"duplicate x-coordinate at {p}")
        if q_new and not bx < last.rightx:
            raise DegenerateInput(f"duplicate x-coordinate at {q}")
        self._check_interior(first, p, strict=p_new)
        self._check_interior(last, q, strict=q_new)

        live = self._live
        outer_a = outer_b = None
        if p_new:
            outer_a = Trapezoid(first.top, first.bottom, first.leftp, p)
            outer_a.leaf = [_LEAF, outer_a]
            live.add(outer_a)
            self._fan_add(outer_a)
            self.points.append(p)
        if q_new:
            outer_b = Trapezoid(last.top, last.bottom, q, last.rightp)
            outer_b.leaf = [_LEAF, outer_b]
            live.add(outer_b)
            self._fan_add(outer_b)
            self.points.append(q)

        # Merge the above/below strips: a strip continues while its bounding
        # segment does.
        up = lo = None
        up_leaves = []
        lo_leaves = []
        for i, tr in enumerate(traps):
            if up is None or tr.top != up.top:
                if up is not None:
                    up.rightp = tr.leftp
                up = Trapezoid(tr.top, seg, p if i == 0 else tr.leftp, q)
                up.leaf = [_LEAF, up]
                live.add(up)
                self._fan_add(up)
            if lo is None or tr.bottom != lo.bottom:
                if lo is not None:
                    lo.rightp = tr.leftp
                lo = Trapezoid(seg, tr.bottom, p if i == 0 else tr.leftp, q)
                lo.leaf = [_LEAF, lo]
                live.add(lo)
                self._fan_add(lo)
            up_leaves.append(up.leaf)
            lo_leaves.append(lo.leaf)

        n_last = len(traps) - 1
        for i, tr in enumerate(traps):
            node = [_YNODE, seg, up_leaves[i], lo_leaves[i]]
            if i == n_last and q_new:
                node = [_XNODE, bx, node, outer_b.leaf]
            if i == 0 and p_new:
                node = [_XNODE, ax, outer_a.leaf, node]
            leaf = tr.leaf
            leaf[:] = node
            tr.leaf = None
            live.discard(tr)
            self._fan_del(tr)
        self._seg_coords.add((ax, ay, bx, by))
        self.segments.append(seg)

    def _check_interior(self, trap, pt, strict):
        """The endpoint must not lie on the trapezoid's top/bottom segment."""
        if not strict:
            return
        x, y = pt
        if trap.top is not None and orient(
            trap.top[0], trap.top[1], trap.top[2], trap.top[3], x, y
        ) == 0:
            raise DegenerateInput(f"endpoint {pt} on segment {trap.top}")
        if trap.bottom is not None and orient(
            trap.bottom[0], trap.bottom[1], trap.bottom[2], trap.bottom[3], x, y
        ) == 0:
            raise DegenerateInput(f"endpoint {pt} on segment {trap.bottom}")

    def insert_point(self, p):
        """Isolated point: one maximal vertical wall through p."""
        if self._finalized:
            raise DegenerateInput("map is immutable once finalized")
        px, py = p
        x0, y0, x1, y1 = self.bbox
        if not (x0 < px < x1 and y0 < py < y1):
            raise OutOfBounds(f"point {p} not strictly inside bbox")
        nd = self._root
        while True:
            k = nd[0]
            if k == _XNODE:
                if px == nd[1]:
                    raise DegenerateInput(f"duplicate x-coordinate at {p}")
                nd = nd[3] if px > nd[1] else nd[2]
            elif k == _YNODE:
                s = nd[1]
                side = orient(s[0], s[1], s[2], s[3], px, py)
                if side == 0:
                    raise DegenerateInput(f"point {p} lies on segment {s}")
                nd = nd[2] if side > 0 else nd[3]
            else:
                break
        tr = nd[1]
        a = Trapezoid(tr.top, tr.bottom, tr.leftp, p)
        b = Trapezoid(tr.top, tr.bottom, p, tr.rightp)
        a.leaf = [_LEAF, a]
        b.leaf = [_LEAF, b]
        leaf = tr.leaf
        leaf[:] = [_XNODE, px, a.leaf, b.leaf]
        tr.leaf = None
        self._live.discard(tr)
        self._fan_del(tr)
        self._live.add(a)
        self._live.add(b)
        self._fan_add(a)
        self._fan_add(b)
        self.points.append(p)

    def finalize(self):
        """Assign sector ids in deterministic geometric order; freeze."""
        if self._finalized:
            return self
        sentinel = (float("inf"),)

        def key(tr):
            return (
                tr.leftp,
                tr.rightp,
                sentinel if tr.top is None else tr.top[:4],
                sentinel if tr.bottom is None else tr.bottom[:4],
            )

        traps = sorted(self._live, key=key)
        by_rightp = {}
        for i, tr in enumerate(traps):
            tr.id = i
            by_rightp.setdefault(tr.rightp, []).append(tr)
        self.trapezoids = traps
        self._by_leftp = self._fans
        self._by_rightp = by_rightp
        # For walks: the fan right of the wall at w splits at height w.y into
        # one piece reachable from below w and one from above (they coincide
        # when w has no right-going segments).  A walk crossing the wall then
        # needs a single orientation test against w.
        fan_low = {}
        fan_high = {}
        for w, members in self._fans.items():
            wx, wy = w
            for m in members:
                bot = m.bottom
                top = m.top
                ob = 1 if bot is None else orient(bot[0], bot[1], bot[2], bot[3], wx, wy)
                ot = -1 if top is None else orient(top[0], top[1], top[2], top[3], wx, wy)
                if ob > 0 and ot <= 0:
                    fan_low[w] = m
                if ot < 0 and ob >= 0:
                    fan_high[w] = m
        self._fan_low = fan_low
        self._fan_high = fan_high
        # Walk starts at a map point w: order w's right-going segments by
        # slope; the piece entered by a segment leaving w is determined by
        # where its slope falls in that order.
        seg_right = {}
        for s in self.segments:
            seg_right.setdefault((s[0], s[1]), []).append(s)
        member_above = {}
        for w, members in self._fans.items():
            for m in members:
                bot = m.bottom
                if bot is not None and bot[0] == w[0] and bot[1] == w[1]:
                    member_above[(bot[0], bot[1], bot[2], bot[3])] = m
        fan_start = {}
        for w, rights in seg_right.items():
            rights.sort(key=lambda s: (s[3] - s[1]) / (s[2] - s[0]))
            fan_start[w] = (
                [(s[3] - s[1]) / (s[2] - s[0]) for s in rights],
                rights,
                [member_above.get((s[0], s[1], s[2], s[3])) for s in rights],
            )
        self._fan_start = fan_start
        self._finalized = True
        return self

    def _start_at_vertex(self, seg, above):
        """Walk start when seg's left endpoint is a map point, resolved by
        slope position among the point's right-going segments."""
        w = (seg[0], seg[1])
        entry = self._fan_start.get(w)
        if entry is None:
            return self._fan_low.get(w)  # no right-going segments: one piece
        slopes, rights, above_members = entry
        sl = (seg[3] - seg[1]) / (seg[2] - seg[0])
        pieces_below = self._fan_low.get(w)
        for i, s in enumerate(rights):
            d = sl - slopes[i]
            band = 1e-12 * (abs(sl) + abs(slopes[i]) + 1.0)
            if d < -band:
                return pieces_below
            if d <= band:
                if s[0] == seg[0] and s[1] == seg[1] and s[2] == seg[2] and s[3] == seg[3]:
                    return above_members[i] if above else pieces_below
                c = _slope_cmp(seg, s)
                if c < 0:
                    return pieces_below
                if c == 0:
                    raise DegenerateInput("collinear overlapping segments")
            pieces_below = above_members[i]
        return pieces_below

    def owner_trap(self, p):
        """Trapezoid owning point p under the (+y, +x) rule.

        For map points this reads the wall fan directly; arbitrary points
        fall back to the search structure.
        """
        cands = self._by_leftp.get(p) if self._finalized else None
        if cands:
            px, py = p
            for c in cands:
                bot = c.bottom
                if bot is not None and orient(
                    bot[0], bot[1], bot[2], bot[3], px, py
                ) < 0:
                    continue
                top = c.top
                if top is not None and orient(
                    top[0], top[1], top[2], top[3], px, py
                ) >= 0:
                    continue
                return c
        return self._locate_owner(p[0], p[1])

    # -- scans --------------------------------------------------------------

    def traps_crossed(self, seg, above=True, start=None):
        """Trapezoids met when sweeping along seg (one side on coincidence).

        After finalize the sweep advances through wall fans in O(1) per step;
        during construction it descends the search structure.  `start` may
        carry the known first trapezoid (e.g. the owner of seg's left
        endpoint when that endpoint is interior to it).
        """
        ax, ay, bx, by, _src = seg
        t = start if start is not None else self._start_trap(seg, above)
        out = [t]
        if not self._finalized:
            while t.rightp[0] < bx:
                t = self._advance(seg, t.rightp, above)
                out.append(t)
            return out
        fan_low = self._fan_low
        fan_high = self._fan_high
        while t.rightp[0] < bx:
            w = t.rightp
            side = orient(ax, ay, bx, by, w[0], w[1])
            if side > 0:
                nxt = fan_low.get(w)
            elif side < 0:
                nxt = fan_high.get(w)
            else:
                raise DegenerateInput(f"wall point {w} lies on segment {seg}")
            if nxt is None:
                nxt = self._advance(seg, w, above)
            t = nxt
            out.append(t)
        return out

    def sectors_touching_segment(self, seg, start=None):
        """Ids of sectors whose closure the segment intersects, swept along
        both sides so segments coincident with map edges count both strips.

        A single sweep never revisits a trapezoid, so the common (non-map
        segment) case returns without deduplication.  `start` may carry the
        owner trapezoid of the left endpoint when that endpoint is interior.
        """
        first = self.traps_crossed(seg, above=True, start=start)
        if (seg[0], seg[1], seg[2], seg[3]) not in self._seg_coords:
            # Not a map segment: the two sweeps coincide.
            return [t.id for t in first]
        ids = {t.id for t in first}
        for t in self.traps_crossed(seg, above=False, start=start):
            ids.add(t.id)
        return list(ids)

    def is_map_point(self, p):
        """True when p coincides with an inserted point (a wall origin)."""
        return p in self._fans

    def sector_count(self):
        return len(self.trapezoids)


def build_trapezoid_map(segments, points, bbox, seed=0):
    """Trapezoid map of non-crossing `segments` plus isolated `points`.

    Insertion order is a seeded random permutation.  Raises DegenerateInput
    when two distinct input points share an x-coordinate (callers re-rotate)
    and CrossingDetected when two segments properly cross.
    """
    segs = []
    for s in segments:
        if isinstance(s, Segment):
            segs.append(s)
        else:
            segs.append(Segment.make(*s) if len(s) == 3 else Segment(*s))
    endpoint_set = set()
    for s in segs:
        endpoint_set.add((s.ax, s.ay))
        endpoint_set.add((s.bx, s.by))
    iso = []
    iso_seen = set()
    for p in points:
        p = (float(p[0]), float(p[1]))
        if p in endpoint_set or p in iso_seen:
            continue
        iso_seen.add(p)
        iso.append(p)
    all_pts = list(endpoint_set) + iso
    all_pts.sort()
    for a, b in zip(all_pts, all_pts[1:]):
        if a[0] == b[0]:
            raise DegenerateInput(f"points {a} and {b} share x-coordinate")

    m = TrapezoidMap(bbox)
    rng = random.Random(seed)
    order = list(range(len(segs)))
    rng.shuffle(order)
    for i in order:
        m.insert_segment(segs[i])
    iso_order = list(range(len(iso)))
    rng.shuffle(iso_order)
    for i in iso_order:
        m.insert_point(iso[i])
    return m.finalize()


# ---------------------------------------------------------------------------
# Polylines and planarization
# ---------------------------------------------------------------------------


def subdivide_x_monotone(pl: Polyline, strict=False):
    """Split a polyline at interior vertices where the x-direction reverses.

    With strict=True every interior vertex splits, so each piece is a single
    segment.  Pieces concatenate to the input point-for-point.
    """
    pts = pl.pts
    if strict:
        return [
            Polyline((pts[i], pts[i + 1]), pl.source) for i in range(len(pts) - 1)
        ]
    pieces = []
    start = 0
    prev_sign = 0
    for i in range(len(pts) - 1):
        dx = pts[i + 1][0] - pts[i][0]
        sign = 1 if dx > 0 else (-1 if dx < 0 else 0)
        if sign != 0:
            if prev_sign != 0 and sign != prev_sign:
                pieces.append(Polyline(pts[start : i + 1], pl.source))
                start = i
            prev_sign = sign
    pieces.append(Polyline(pts[start:], pl.source))
    return pieces


def planarize_segments(segments):
    """Split a segment set at all pairwise proper crossings.

    Returns (pieces, crossing_points).  Raises DegenerateCrossing when the
    input is not in general position (endpoint on another segment, collinear
    overlap, three segments through one crossing, coincident crossings);
    callers respond by re-rotating.
    """
    segs = [s if isinstance(s, Segment) else Segment(*s) for s in segments]
    cuts = [[] for _ in segs]
    crossings = []
    seen_pts = {}
    for i in range(len(segs)):
        s = segs[i]
        for j in range(i + 1, len(segs)):
            t = segs[j]
            if max(s.ax, t.ax) >= min(s.bx, t.bx):
                continue  # x-spans do not overlap in the open sense
            o1 = orient(s.ax, s.ay, s.bx, s.by, t.ax, t.ay)
            o2 = orient(s.ax, s.ay, s.bx, s.by, t.bx, t.by)
            o3 = orient(t.ax, t.ay, t.bx, t.by, s.ax, s.ay)
            o4 = orient(t.ax, t.ay, t.bx, t.by, s.bx, s.by)
            if 0 in (o1, o2, o3, o4):
                shared = {(s.ax, s.ay), (s.bx, s.by)} & {(t.ax, t.ay), (t.bx, t.by)}
                if shared:
                    continue  # common endpoint is not a crossing
                if (o1 == 0 and o2 == 0) or (o3 == 0 and o4 == 0):
                    raise DegenerateCrossing(f"collinear overlap: {s} / {t}")
                # An endpoint on the other's supporting line is degenerate
                # only when it falls strictly inside that segment's span;
                # beyond the span the pair cannot cross at all.
                if (o1 == 0 and s.ax < t.ax < s.bx) or (
                    o2 == 0 and s.ax < t.bx < s.bx
                ) or (o3 == 0 and t.ax < s.ax < t.bx) or (
                    o4 == 0 and t.ax < s.bx < t.bx
                ):
                    raise DegenerateCrossing(f"endpoint of one segment on another")
                continue
            if o1 * o2 < 0 and o3 * o4 < 0:
                w = segment_intersection(s, t)
                if w in seen_pts:
                    raise DegenerateCrossing(f"three segments through {w}")
                seen_pts[w] = (i, j)
                crossings.append(w)
                cuts[i].append(w)
                cuts[j].append(w)
    pieces = []
    for i, s in enumerate(segs):
        if not cuts[i]:
            pieces.append(s)
            continue
        pts = sorted(cuts[i])
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise DegenerateCrossing(f"coincident crossings on {s}")
        chain = [(s.ax, s.ay)] + pts + [(s.bx, s.by)]
        for a, b in zip(chain, chain[1:]):
            if a[0] >= b[0]:
                raise DegenerateCrossing(f"crossing ordering degenerate on {s}")
            pieces.append(Segment(a[0], a[1], b[0], b[1], s.source))
    return pieces, crossings
