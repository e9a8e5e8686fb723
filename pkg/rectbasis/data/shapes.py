import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from rectbasis.errors import InvalidInputError

BBox = Tuple[float, float, float, float]


def rotate_xy(xy: np.ndarray, angle: float) -> np.ndarray:
    """Rotates points counter-clockwise about the origin

    :param xy: points, shape ``(..., 2)``
    :param angle: rotation angle, in radians
    :return: rotated points
    """
    c, s = math.cos(angle), math.sin(angle)
    xy = np.asarray(xy, dtype=float)
    x, y = xy[..., 0], xy[..., 1]
    return np.stack((c * x - s * y, s * x + c * y), axis=-1)


@dataclass(frozen=True)
class Point:
    """Point in the plane"""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"Point ({self.x}, {self.y}) is not finite")

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def rotated(self, angle: float) -> "Point":
        """Point rotated counter-clockwise about the origin"""
        x, y = rotate_xy(self.xy, angle)
        return Point(float(x), float(y))


ORIGIN = Point(0.0, 0.0)


def shoelace(xy: np.ndarray) -> float:
    """Signed area of a polygon, accumulated relative to its first vertex"""
    if len(xy) < 3:
        return 0.0
    rel = xy - xy[0]
    x, y = rel[:, 0], rel[:, 1]
    return 0.5 * math.fsum(x[1:-1] * y[2:] - x[2:] * y[1:-1])


class Region(ABC):
    """Bounded measurable planar set"""

    @property
    @abstractmethod
    def area(self) -> float:
        """Lebesgue measure"""
        raise NotImplementedError()

    @abstractmethod
    def contains(self, xy: np.ndarray, frame: float = 0.0) -> np.ndarray:
        """Membership test for points expressed in the given rotated frame

        :param xy: points, shape ``(n, 2)``, in frame coordinates
        :param frame: frame rotation angle, in radians
        :return: boolean mask, shape ``(n,)``
        """
        raise NotImplementedError()

    @abstractmethod
    def bbox(self, frame: float = 0.0) -> BBox:
        """Axis-aligned bounding box ``(xmin, ymin, xmax, ymax)`` in the given frame"""
        raise NotImplementedError()


class ConvexRegion(Region):
    """Convex polygonal region described by vertices and half-planes"""

    @property
    def frame(self) -> float:
        """Rotation of the frame in which the region is axis-aligned"""
        return 0.0

    @abstractmethod
    def vertices_in(self, frame: float = 0.0) -> np.ndarray:
        """Counter-clockwise vertices, shape ``(n, 2)``, in the given frame"""
        raise NotImplementedError()

    @abstractmethod
    def halfplanes_in(self, frame: float = 0.0) -> np.ndarray:
        """Half-planes ``(nx, ny, c)`` meaning ``nx * x + ny * y >= c``, in the
        given frame"""
        raise NotImplementedError()

    @property
    def area(self) -> float:
        return shoelace(self.vertices_in(self.frame))

    @property
    def perimeter(self) -> float:
        xy = self.vertices_in(self.frame)
        return float(np.sum(np.hypot(*(np.roll(xy, -1, axis=0) - xy).T)))

    def contains(self, xy: np.ndarray, frame: float = 0.0) -> np.ndarray:
        planes = self.halfplanes_in(frame)
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        return np.all(xy @ planes[:, :2].T >= planes[:, 2], axis=1)

    def bbox(self, frame: float = 0.0) -> BBox:
        xy = self.vertices_in(frame)
        xmin, ymin = xy.min(axis=0)
        xmax, ymax = xy.max(axis=0)
        return float(xmin), float(ymin), float(xmax), float(ymax)


@dataclass(frozen=True)
class ConvexPolygon(ConvexRegion):
    """Convex polygon with counter-clockwise vertices in global coordinates"""

    vertices: Tuple[Point, ...]
    """Ordered vertices (counter-clockwise)"""

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise InvalidInputError(
                f"Polygon requires at least 3 vertices, got {len(self.vertices)}"
            )
        xy = self.xy
        a = shoelace(xy)
        if not a > 0.0:
            raise InvalidInputError(
                f"Polygon vertices are not counter-clockwise (signed area {a})"
            )
        edges = np.roll(xy, -1, axis=0) - xy
        following = np.roll(edges, -1, axis=0)
        turns = edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]
        scale = float(np.max(np.abs(xy - xy[0]))) ** 2
        if np.any(turns < -1e-9 * scale):
            raise InvalidInputError("Polygon is not convex")

    @classmethod
    def from_xy(cls, xy: np.ndarray) -> "ConvexPolygon":
        return cls(tuple(Point(float(x), float(y)) for x, y in np.asarray(xy)))

    @property
    def xy(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.vertices], dtype=float)

    def vertices_in(self, frame: float = 0.0) -> np.ndarray:
        if frame == 0.0:
            return self.xy
        return rotate_xy(self.xy, -frame)

    def halfplanes_in(self, frame: float = 0.0) -> np.ndarray:
        xy = self.vertices_in(frame)
        edges = np.roll(xy, -1, axis=0) - xy
        normals = np.stack((-edges[:, 1], edges[:, 0]), axis=1)
        offsets = np.sum(normals * xy, axis=1)
        return np.column_stack((normals, offsets))


class OrientedBox(ConvexRegion):
    """Axis-aligned box ``[x0, x1] x [y0, y1]`` in a frame rotated by ``theta``
    about ``anchor``"""

    theta: float
    """Angle of the local x-axis, in radians"""

    anchor: Point
    """Image of the local origin"""

    @property
    @abstractmethod
    def box(self) -> Tuple[float, float, float, float]:
        """Local extent ``(x0, x1, y0, y1)``"""
        raise NotImplementedError()

    @property
    def frame(self) -> float:
        return self.theta

    @property
    def area(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)

    @property
    def perimeter(self) -> float:
        x0, x1, y0, y1 = self.box
        return 2.0 * ((x1 - x0) + (y1 - y0))

    def _anchor_in(self, frame: float) -> np.ndarray:
        if self.anchor == ORIGIN:
            return np.zeros(2)
        return rotate_xy(self.anchor.xy, -frame)

    def vertices_in(self, frame: float = 0.0) -> np.ndarray:
        x0, x1, y0, y1 = self.box
        local = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
        return rotate_xy(local, self.theta - frame) + self._anchor_in(frame)

    def halfplanes_in(self, frame: float = 0.0) -> np.ndarray:
        x0, x1, y0, y1 = self.box
        delta = self.theta - frame
        u = np.array([math.cos(delta), math.sin(delta)])
        v = np.array([-math.sin(delta), math.cos(delta)])
        a = self._anchor_in(frame)
        ua, va = float(u @ a), float(v @ a)
        return np.array(
            [
                [u[0], u[1], ua + x0],
                [-u[0], -u[1], -(ua + x1)],
                [v[0], v[1], va + y0],
                [-v[0], -v[1], -(va + y1)],
            ]
        )


@dataclass(frozen=True)
class RotatedRect(OrientedBox):
    """Rectangle of length ``L`` and width ``ell`` whose long side leaves the
    anchor at angle ``theta``"""

    L: float
    """Long side length"""

    ell: float
    """Short side length"""

    theta: float
    """Angle of the long side with the x-axis, in radians"""

    anchor: Point = ORIGIN
    """Anchor vertex"""

    def __post_init__(self) -> None:
        if not (self.L > 0.0 and self.ell > 0.0):
            raise InvalidInputError(
                f"Rectangle sides must be positive, got L={self.L}, ell={self.ell}"
            )
        if not (math.isfinite(self.L) and math.isfinite(self.ell)):
            raise InvalidInputError("Rectangle sides must be finite")
        if not math.isfinite(self.theta):
            raise InvalidInputError(f"Rectangle angle {self.theta} is not finite")

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return 0.0, self.L, 0.0, self.ell


@dataclass(frozen=True)
class HalfRect(OrientedBox):
    """Far half ``[L/2, L] x [0, ell]`` of a rotated rectangle"""

    parent: RotatedRect

    @property
    def theta(self) -> float:
        return self.parent.theta

    @property
    def anchor(self) -> Point:
        return self.parent.anchor

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return 0.5 * self.parent.L, self.parent.L, 0.0, self.parent.ell


@dataclass(frozen=True)
class StretchedRect(OrientedBox):
    """Rectangle with the parent's center, width and direction whose length is
    multiplied by ``factor``"""

    parent: RotatedRect
    factor: float = 3.0

    def __post_init__(self) -> None:
        if not self.factor >= 1.0:
            raise InvalidInputError(f"Stretch factor {self.factor} is below 1")

    @property
    def theta(self) -> float:
        return self.parent.theta

    @property
    def anchor(self) -> Point:
        return self.parent.anchor

    @property
    def box(self) -> Tuple[float, float, float, float]:
        center, half = 0.5 * self.parent.L, 0.5 * self.factor * self.parent.L
        return center - half, center + half, 0.0, self.parent.ell


@dataclass(frozen=True)
class Disk(Region):
    """Closed disk"""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InvalidInputError(f"Disk radius {self.radius} is not positive")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def center_in(self, frame: float = 0.0) -> np.ndarray:
        if frame == 0.0:
            return self.center.xy
        return rotate_xy(self.center.xy, -frame)

    def contains(self, xy: np.ndarray, frame: float = 0.0) -> np.ndarray:
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        d = xy - self.center_in(frame)
        return np.hypot(d[:, 0], d[:, 1]) <= self.radius

    def bbox(self, frame: float = 0.0) -> BBox:
        cx, cy = self.center_in(frame)
        r = self.radius
        return float(cx - r), float(cy - r), float(cx + r), float(cy + r)


def common_frame(regions: Sequence[Region]) -> float:
    """Frame in which a family is evaluated: the smallest box angle, else 0"""
    angles = [r.theta for r in regions if isinstance(r, OrientedBox)]
    if angles and len(angles) == len(regions):
        return min(angles)
    return 0.0
