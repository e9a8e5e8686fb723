"""Planar measure kernel for convex polygons, rotated rectangles and disks"""

import math
from typing import Callable, List, Optional, Sequence, Union
from warnings import warn

import numpy as np

from rectbasis.data.results import Measurement
from rectbasis.data.shapes import (
    ORIGIN,
    BBox,
    ConvexPolygon,
    ConvexRegion,
    Disk,
    HalfRect,
    Region,
    RotatedRect,
    common_frame,
    rotate_xy,
    shoelace,
)
from rectbasis.errors import CapacityError, InvalidFamilyError, InvalidInputError

EXACT_CAPACITY = 24
"""Largest number of polygons accepted by the inclusion-exclusion subset walk"""

CHAIN_PATH_MIN = 7
"""Smallest chain family measured through consecutive pair intersections"""

DEGENERACY_RTOL = 1e-14

MC_MIN_SAMPLES = 10_000
MC_BATCH = 250_000

Seed = Union[int, np.random.SeedSequence]


def to_polygon(r: Union[RotatedRect, HalfRect]) -> ConvexPolygon:
    """Polygon form of a rotated rectangle, starting at its anchor vertex

    :param r: rotated rectangle or half rectangle
    :return: counter-clockwise polygon in global coordinates
    """
    return ConvexPolygon.from_xy(r.vertices_in(0.0))


def clip(xy: np.ndarray, planes: np.ndarray) -> Optional[np.ndarray]:
    """Successive half-plane clipping of a convex polygon

    Crossing points are interpolated from the vertex closer to the clipping line.

    :param xy: counter-clockwise vertices, shape ``(n, 2)``
    :param planes: half-planes ``(nx, ny, c)`` meaning ``nx * x + ny * y >= c``
    :return: clipped vertices, or ``None`` if nothing with positive extent remains
    """
    pts = [(float(x), float(y)) for x, y in xy]
    for nx, ny, c in planes:
        d = [nx * x + ny * y - c for x, y in pts]
        if min(d) >= 0.0:
            continue
        if max(d) <= 0.0:
            return None
        out = []
        n = len(pts)
        for i in range(n):
            (px, py), dp = pts[i], d[i]
            (qx, qy), dq = pts[(i + 1) % n], d[(i + 1) % n]
            if dp >= 0.0:
                out.append((px, py))
            if (dp > 0.0 and dq < 0.0) or (dp < 0.0 and dq > 0.0):
                if abs(dp) <= abs(dq):
                    s = dp / (dp - dq)
                    out.append((px + s * (qx - px), py + s * (qy - py)))
                else:
                    s = dq / (dq - dp)
                    out.append((qx + s * (px - qx), qy + s * (py - qy)))
        if len(out) < 3:
            return None
        pts = out
    return np.array(pts, dtype=float)


def _degeneracy_threshold(regions: Sequence[ConvexRegion]) -> float:
    return DEGENERACY_RTOL * min((r.area / r.perimeter) ** 2 for r in regions)


def _dedupe(xy: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(xy - xy[0])))
    step = np.hypot(*(np.roll(xy, -1, axis=0) - xy).T)
    return xy[step > 1e-15 * scale]


def intersect_convex(a: ConvexRegion, b: ConvexRegion) -> Optional[ConvexPolygon]:
    """Intersection of two convex regions

    Computed in the natural frame of ``a``; results with area below the degeneracy
    threshold are reported as empty.

    :param a: first region
    :param b: second region
    :return: intersection polygon in global coordinates, or ``None`` if empty
    """
    frame = a.frame
    xy = clip(a.vertices_in(frame), b.halfplanes_in(frame))
    if xy is None or shoelace(xy) <= _degeneracy_threshold([a, b]):
        return None
    if frame != 0.0:
        xy = rotate_xy(xy, frame)
    xy = _dedupe(xy)
    if len(xy) < 3:
        return None
    return ConvexPolygon.from_xy(xy)


def area(p: Optional[Region]) -> float:
    """Area of a region, zero for the empty marker"""
    if p is None:
        return 0.0
    return max(0.0, p.area)


def pair_intersection_area(
    a: ConvexRegion, b: ConvexRegion, frame: Optional[float] = None
) -> float:
    """Area of the intersection of two convex regions, measured in the natural
    frame of ``a`` unless another frame is given"""
    if frame is None:
        frame = a.frame
    xy = clip(a.vertices_in(frame), b.halfplanes_in(frame))
    if xy is None:
        return 0.0
    value = shoelace(xy)
    return value if value > _degeneracy_threshold([a, b]) else 0.0


def _chain_order(regions: Sequence[Region]) -> Optional[List[int]]:
    """Indices sorting a same-shape origin-anchored family by decreasing angle, or
    ``None`` if the family is not such a chain"""
    if len(regions) < 2 or not all(type(r) is RotatedRect for r in regions):
        return None
    first = regions[0]
    for r in regions:
        if r.anchor != ORIGIN or r.L != first.L or r.ell != first.ell:
            return None
        if not 0.0 <= r.theta <= math.pi / 4.0:
            return None
    order = sorted(range(len(regions)), key=lambda i: -regions[i].theta)
    thetas = [regions[i].theta for i in order]
    if any(t1 <= t2 for t1, t2 in zip(thetas, thetas[1:])):
        return None
    return order


def chain_intersection_area(rects: Sequence[RotatedRect]) -> float:
    """Area of the intersection of a chain of same-shape rotated rectangles

    :param rects: at least two rectangles sharing ``(L, ell)`` with strictly
        decreasing angles in ``[0, pi/4]``
    :return: area of the full intersection
    """
    if len(rects) < 2:
        raise InvalidFamilyError(
            f"Chain requires at least 2 rectangles, got {len(rects)}"
        )
    first = rects[0]
    for r in rects:
        if not isinstance(r, RotatedRect):
            raise InvalidFamilyError(f"Chain member {r!r} is not a rotated rectangle")
        if r.L != first.L or r.ell != first.ell:
            raise InvalidFamilyError(
                f"Chain member (L={r.L}, ell={r.ell}) differs from "
                f"(L={first.L}, ell={first.ell})"
            )
        if not 0.0 <= r.theta <= math.pi / 4.0:
            raise InvalidFamilyError(f"Chain angle {r.theta} outside of [0, pi/4]")
    if any(r1.theta <= r2.theta for r1, r2 in zip(rects, rects[1:])):
        raise InvalidFamilyError("Chain angles are not strictly decreasing")
    frame = rects[0].frame
    xy: Optional[np.ndarray] = rects[0].vertices_in(frame)
    for r in rects[1:]:
        xy = clip(xy, r.halfplanes_in(frame))
        if xy is None:
            return 0.0
    value = shoelace(xy)
    return value if value > _degeneracy_threshold(rects) else 0.0


def _subset_area_sums(regions: Sequence[ConvexRegion]) -> np.ndarray:
    """Sums ``A_s`` of ``area(intersection of S)`` over all subsets of size ``s``

    Depth-first subset walk in rank order, clipping in the natural frame of the
    first region of each subset; subsets whose intersection is empty are pruned
    together with all their supersets.
    """
    n = len(regions)
    threshold = _degeneracy_threshold(regions)
    buckets: List[List[float]] = [[] for _ in range(n + 1)]

    def descend(
        xy: np.ndarray, planes: List[np.ndarray], start: int, size: int
    ) -> None:
        for i in range(start, n):
            clipped = clip(xy, planes[i])
            if clipped is None:
                continue
            value = shoelace(clipped)
            if value <= threshold:
                continue
            buckets[size + 1].append(value)
            descend(clipped, planes, i + 1, size + 1)

    for root, region in enumerate(regions):
        frame = region.frame
        xy = region.vertices_in(frame)
        value = shoelace(xy)
        if value <= threshold:
            continue
        buckets[1].append(value)
        planes = [r.halfplanes_in(frame) for r in regions]
        descend(xy, planes, root + 1, 1)
    return np.array([math.fsum(b) for b in buckets])


def _chain_levelsets(regions: Sequence[RotatedRect], order: List[int]) -> np.ndarray:
    """``|{chi >= m}|`` for ``m = 1..n`` of a chain family

    Points of a chain family are covered by runs of consecutive rectangles, so
    ``{chi >= m}`` is the union of the windows ``R_i & R_{i+m-1}`` and consecutive
    windows overlap in ``R_i & R_{i+m}``.
    """
    rects = [regions[i] for i in order]
    n = len(rects)

    def pair(i: int, j: int) -> float:
        if i == j:
            return rects[i].area
        return pair_intersection_area(rects[i], rects[j])

    measures = np.zeros(n)
    for m in range(1, n + 1):
        windows = [pair(i, i + m - 1) for i in range(n - m + 1)]
        overlaps = [pair(i, i + m) for i in range(n - m)]
        measures[m - 1] = max(0.0, math.fsum(windows) - math.fsum(overlaps))
    return measures


def _check_capacity(regions: Sequence[Region]) -> None:
    if len(regions) > EXACT_CAPACITY:
        raise CapacityError(
            f"{len(regions)} polygons exceed the exact capacity of {EXACT_CAPACITY}"
        )
    for r in regions:
        if not isinstance(r, ConvexRegion):
            raise InvalidInputError(f"Region {r!r} is not a convex polygonal region")


def levelset_measures(
    regions: Sequence[ConvexRegion], use_chain: Optional[bool] = None
) -> np.ndarray:
    """Measures ``|{chi >= m}|`` for ``m = 1..n``, where ``chi`` counts covering
    regions

    :param regions: at most :data:`EXACT_CAPACITY` convex regions
    :param use_chain: force (``True``) or disable (``False``) the chain path;
        by default chains of at least :data:`CHAIN_PATH_MIN` rectangles use it
    :return: array of length ``n``
    """
    _check_capacity(regions)
    n = len(regions)
    if n == 0:
        return np.zeros(0)
    order = _chain_order(regions)
    if use_chain is None:
        use_chain = order is not None and n >= CHAIN_PATH_MIN
    if use_chain:
        if order is None:
            raise InvalidFamilyError("Regions do not form a same-shape chain")
        return _chain_levelsets(regions, order)
    sums = _subset_area_sums(regions)
    measures = np.zeros(n)
    for m in range(1, n + 1):
        terms = [
            (-1) ** (s - m) * math.comb(s - 1, m - 1) * sums[s] for s in range(m, n + 1)
        ]
        measures[m - 1] = max(0.0, math.fsum(terms))
    return measures


def levelset_measure(regions: Sequence[ConvexRegion], m: int) -> float:
    """Measure of ``{x : chi(x) >= m}``

    :param regions: at most :data:`EXACT_CAPACITY` convex regions
    :param m: depth, at least 1
    """
    if m < 1:
        raise InvalidInputError(f"Level {m} is below 1")
    if m > len(regions):
        _check_capacity(regions)
        return 0.0
    return float(levelset_measures(regions)[m - 1])


def depth_measures(regions: Sequence[ConvexRegion]) -> np.ndarray:
    """Measures ``|{chi = m}|`` for ``m = 1..n``"""
    at_least = levelset_measures(regions)
    return at_least - np.append(at_least[1:], 0.0)


def union_area(
    regions: Sequence[ConvexRegion],
    method: str = "inclusion_exclusion",
    samples: int = 1_000_000,
    seed: Seed = 0,
) -> Measurement:
    """Area of a union of convex regions

    :param regions: convex regions
    :param method: ``"inclusion_exclusion"`` (exact) or ``"monte_carlo"``
    :param samples: Monte-Carlo sample count
    :param seed: Monte-Carlo seed
    :return: area with its error bound
    """
    if method == "inclusion_exclusion":
        if len(regions) == 0:
            return Measurement(0.0)
        return Measurement(float(levelset_measures(regions)[0]))
    if method == "monte_carlo":
        if len(regions) == 0:
            return Measurement(0.0, method="monte-carlo", seed=_seed_value(seed))
        frame = common_frame(regions)

        def indicator(xy: np.ndarray) -> np.ndarray:
            return np.any([r.contains(xy, frame) for r in regions], axis=0)

        return mc_measure(indicator, _union_bbox(regions, frame), samples, seed)
    raise InvalidInputError(f"Unknown union method '{method}'")


def _disk_edge_area(a: np.ndarray, b: np.ndarray, r: float) -> float:
    """Signed area of the disk ``B(0, r)`` intersected with triangle ``(0, a, b)``"""
    d = b - a
    qa = float(d @ d)
    if qa == 0.0:
        return 0.0
    qb = float(a @ d)
    qc = float(a @ a) - r * r
    disc = qb * qb - qa * qc
    ts = [0.0]
    if disc > 0.0:
        root = math.sqrt(disc)
        q = -(qb + math.copysign(root, qb))
        roots = sorted((q / qa, qc / q))
        ts.extend(t for t in roots if 0.0 < t < 1.0)
    ts.append(1.0)
    total = 0.0
    for t0, t1 in zip(ts, ts[1:]):
        p, q_ = a + t0 * d, a + t1 * d
        mid = a + 0.5 * (t0 + t1) * d
        cross = float(p[0] * q_[1] - p[1] * q_[0])
        if float(mid @ mid) <= r * r:
            total += 0.5 * cross
        else:
            total += 0.5 * r * r * math.atan2(cross, float(p @ q_))
    return total


def disk_polygon_area(d: Disk, p: ConvexRegion) -> float:
    """Area of a disk intersected with a convex region (arc integration)

    :param d: disk
    :param p: convex region
    :return: area, at most ``min(pi * r**2, area(p))``
    """
    frame = p.frame
    xy = p.vertices_in(frame) - d.center_in(frame)
    n = len(xy)
    value = math.fsum(
        _disk_edge_area(xy[i], xy[(i + 1) % n], d.radius) for i in range(n)
    )
    return min(max(0.0, value), d.area, p.area)


def _seed_value(seed: Seed) -> Optional[int]:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy
        return int(entropy) if isinstance(entropy, int) else None
    return int(seed)


def _union_bbox(regions: Sequence[Region], frame: float) -> BBox:
    boxes = np.array([r.bbox(frame) for r in regions])
    return (
        float(boxes[:, 0].min()),
        float(boxes[:, 1].min()),
        float(boxes[:, 2].max()),
        float(boxes[:, 3].max()),
    )


def _check_bbox(bbox: BBox) -> float:
    xmin, ymin, xmax, ymax = bbox
    if not all(math.isfinite(v) for v in bbox) or xmax <= xmin or ymax <= ymin:
        raise InvalidInputError(f"Bounding box {bbox} is degenerate")
    return (xmax - xmin) * (ymax - ymin)


def _sample(bbox: BBox, n: int, rng: np.random.Generator) -> np.ndarray:
    xmin, ymin, xmax, ymax = bbox
    return np.column_stack((rng.uniform(xmin, xmax, n), rng.uniform(ymin, ymax, n)))


def _batches(samples: int) -> List[int]:
    sizes = [MC_BATCH] * (samples // MC_BATCH)
    if samples % MC_BATCH:
        sizes.append(samples % MC_BATCH)
    return sizes


def _estimate(hits: int, box_area: float, samples: int, seed: Seed) -> Measurement:
    p = hits / samples
    if 0 < hits < 100:
        warn(f"Monte-Carlo estimate based on only {hits} hits")
    return Measurement(
        value=box_area * p,
        stderr=box_area * math.sqrt(p * (1.0 - p) / samples),
        method="monte-carlo",
        seed=_seed_value(seed),
        samples=samples,
        resolution=box_area / samples,
    )


def mc_measure(
    indicator: Callable[[np.ndarray], np.ndarray],
    bbox: BBox,
    samples: int = 1_000_000,
    seed: Seed = 0,
) -> Measurement:
    """Monte-Carlo estimate of the measure of a set inside a bounding box

    :param indicator: vectorized membership test for points of shape ``(n, 2)``
    :param bbox: bounding box ``(xmin, ymin, xmax, ymax)`` containing the set
    :param samples: number of uniform samples, at least 10 000
    :param seed: random seed
    :return: unbiased estimate with its standard error
    """
    box_area = _check_bbox(bbox)
    if samples < MC_MIN_SAMPLES:
        raise InvalidInputError(
            f"Monte-Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )
    rng = np.random.default_rng(seed)
    hits = 0
    for n in _batches(samples):
        hits += int(np.count_nonzero(indicator(_sample(bbox, n, rng))))
    return _estimate(hits, box_area, samples, seed)


def mc_levelset_measures(
    regions: Sequence[ConvexRegion], samples: int = 1_000_000, seed: Seed = 0
) -> List[Measurement]:
    """Monte-Carlo estimates of ``|{chi >= m}|`` for ``m = 1..n``

    Depths of at least two are sampled inside the bounding box of the pairwise
    intersections, which contains every such point.
    """
    n = len(regions)
    if n == 0:
        return []
    frame = common_frame(regions)
    first, second = np.random.SeedSequence(_seed_value(seed)).spawn(2)

    def depth(xy: np.ndarray) -> np.ndarray:
        return np.sum([r.contains(xy, frame) for r in regions], axis=0)

    union_bbox = _union_bbox(regions, frame)
    estimates = [mc_measure(lambda xy: depth(xy) >= 1, union_bbox, samples, first)]
    pieces = []
    for i in range(n):
        for j in range(i + 1, n):
            xy = clip(regions[i].vertices_in(frame), regions[j].halfplanes_in(frame))
            if xy is not None and shoelace(xy) > 0.0:
                pieces.append(xy)
    if not pieces:
        empty = Measurement(0.0, method="monte-carlo")
        return estimates + [empty] * (n - 1)
    stacked = np.vstack(pieces)
    bbox = (
        float(stacked[:, 0].min()),
        float(stacked[:, 1].min()),
        float(stacked[:, 0].max()),
        float(stacked[:, 1].max()),
    )
    box_area = _check_bbox(bbox)
    rng = np.random.default_rng(second)
    counts = np.zeros(n + 1, dtype=np.int64)
    for size in _batches(samples):
        counts += np.bincount(depth(_sample(bbox, size, rng)), minlength=n + 1)
    at_least = np.cumsum(counts[::-1])[::-1]
    for m in range(2, n + 1):
        estimates.append(_estimate(int(at_least[m]), box_area, samples, second))
    return estimates


def halfrects_disjoint_criterion(
    L: float, ell: float, theta: float, vartheta: float
) -> bool:
    """Whether ``tan(theta - vartheta) >= 1 / sqrt((L / ell)**2 / 4 - 1)`` with
    ``0 < 2 * ell < L``, which makes the far halves of the rotated intervals
    disjoint"""
    if not 0.0 < 2.0 * ell < L:
        return False
    delta = abs(theta - vartheta)
    if not 0.0 < delta <= math.pi / 2.0:
        return False
    if delta == math.pi / 2.0:
        return True
    return math.tan(delta) >= 1.0 / math.sqrt(0.25 * (L / ell) ** 2 - 1.0)


def halfrect_gap(L: float, ell: float) -> float:
    """Smallest angle gap satisfying :func:`halfrects_disjoint_criterion`"""
    if not 0.0 < 2.0 * ell < L:
        raise InvalidInputError(f"Interval (L={L}, ell={ell}) violates 0 < 2 ell < L")
    return math.atan2(2.0 * ell, math.sqrt(L * L - 4.0 * ell * ell))


def pair_intersection_bound(ell: float, theta: float, vartheta: float) -> float:
    """Upper bound ``ell**2 / tan(theta - vartheta)`` on the intersection of two
    origin-anchored rotated intervals of width ``ell``"""
    delta = abs(theta - vartheta)
    if delta == 0.0:
        return math.inf
    return ell * ell / math.tan(delta)
