"""
Convex polygons, their sides, and similarity gauges.

Points in the plane are represented by Python complex numbers. A polygon is
given by its vertices z_0, ..., z_{n-1} in counterclockwise order; side i runs
from z_i to z_{i+1} (indices modulo n) and is parametrized over [0, 1] by

    psi_i(tau) = tau * z_{i+1} + (1 - tau) * z_i.

The direction angle alpha_i = arg(z_{i+1} - z_i) and the length |Gamma_i|
determine everything else: the pullbacks of dz and dz-bar, and the outward
normal -i * exp(i * alpha_i).

A similarity gauge z -> exp(i theta) (z - t) / c repositions a polygon. The
kernel exp(i lambda z - i beta**2 conj(z) / lambda) is unchanged by rotations
and translations, and a dilation by 1/c is absorbed by rescaling beta to
c * beta.
"""

from __future__ import annotations

import cmath
import dataclasses
import enum
import hashlib
import json
import math
from typing import Any, Dict, Iterable, Sequence, Tuple, Union

from polyspectral.errors import (
    ClockwiseOrder,
    DegenerateSide,
    GeometryViolation,
    NonConvex,
    TooFewVertices,
)

#: Relative tolerance used by the convexity test, in units of scale**2.
CONVEXITY_TOLERANCE = 1e-12

PointLike = Union[complex, float, Sequence[float]]


def as_point(p: PointLike) -> complex:
    """Convert an (x, y) pair or a number to a complex point."""
    if isinstance(p, (complex, float, int)):
        return complex(p)
    x, y = p
    return complex(float(x), float(y))


@dataclasses.dataclass(frozen=True)
class Side:
    """One side of a polygon, oriented from `origin` to `end`."""

    #: First endpoint z_i, image of tau = 0.
    origin: complex

    #: Second endpoint z_{i+1}, image of tau = 1.
    end: complex

    @property
    def alpha(self) -> float:
        """Direction angle arg(z_{i+1} - z_i), in (-pi, pi]."""
        return cmath.phase(self.end - self.origin)

    @property
    def length(self) -> float:
        """Side length |Gamma_i|."""
        return abs(self.end - self.origin)

    @property
    def direction(self) -> complex:
        """Unit tangent exp(i alpha_i)."""
        return (self.end - self.origin) / self.length

    @property
    def normal(self) -> complex:
        """Outward unit normal for a counterclockwise polygon."""
        return -1j * self.direction

    @property
    def midpoint(self) -> complex:
        """Point psi_i(1/2)."""
        return 0.5 * (self.origin + self.end)

    def psi(self, tau: Any) -> Any:
        """Parametrization tau -> tau z_{i+1} + (1 - tau) z_i (vectorized)."""
        return self.origin + tau * (self.end - self.origin)

    def distance_to(self, z: complex) -> float:
        """Euclidean distance from z to the closed segment."""
        d = self.end - self.origin
        tau = ((z - self.origin) * d.conjugate()).real / abs(d) ** 2
        tau = min(max(tau, 0.0), 1.0)
        return abs(z - self.psi(tau))

    def height_of(self, z: complex) -> float:
        """Signed distance of z from the side's line, positive on the left."""
        return ((z - self.origin) * self.direction.conjugate()).imag


def pullback_form_factors(side: Side) -> Tuple[complex, complex]:
    """
    Pullbacks of dz and dz-bar under the side parametrization.

    Returns
    -------
    dz_factor, dzbar_factor
        exp(i alpha) |Gamma| and exp(-i alpha) |Gamma|, so that
        psi^*(dz) = dz_factor * dtau.
    """
    d = side.end - side.origin
    return d, d.conjugate()


def outward_normal(side: Side) -> complex:
    """Outward unit normal -i exp(i alpha) of a counterclockwise side."""
    return side.normal


@dataclasses.dataclass(frozen=True)
class Polygon:
    """
    A strictly convex polygon with counterclockwise vertices.

    Use `build_polygon` to construct validated instances.
    """

    vertices: Tuple[complex, ...]

    @property
    def n(self) -> int:
        """Number of vertices (and sides)."""
        return len(self.vertices)

    @property
    def sides(self) -> Tuple[Side, ...]:
        """Sides Gamma_0, ..., Gamma_{n-1}."""
        v = self.vertices
        return tuple(Side(v[i], v[(i + 1) % len(v)]) for i in range(len(v)))

    def side(self, i: int) -> Side:
        """Side i, with the index taken modulo n."""
        return self.sides[i % self.n]

    @property
    def alphas(self) -> Tuple[float, ...]:
        """Direction angles of all sides."""
        return tuple(s.alpha for s in self.sides)

    @property
    def lengths(self) -> Tuple[float, ...]:
        """Lengths of all sides."""
        return tuple(s.length for s in self.sides)

    @property
    def centroid(self) -> complex:
        """Vertex average; an interior point of a convex polygon."""
        return sum(self.vertices) / self.n

    @property
    def diameter(self) -> float:
        """Largest distance between two vertices."""
        v = self.vertices
        return max(abs(a - b) for a in v for b in v)

    def signed_area(self) -> float:
        """Shoelace area, positive for counterclockwise order."""
        v = self.vertices
        total = 0.0
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            total += a.real * b.imag - b.real * a.imag
        return 0.5 * total

    def contains(self, z: complex) -> bool:
        """True if z lies strictly inside the polygon."""
        return all(side.height_of(z) > 0.0 for side in self.sides)

    def distance_to_boundary(self, z: complex) -> float:
        """Distance from z to the boundary."""
        return min(side.distance_to(z) for side in self.sides)

    def interior_angle(self, i: int) -> float:
        """Interior angle at vertex z_i, between sides i - 1 and i."""
        turn = self.side(i).alpha - self.side(i - 1).alpha
        turn = math.remainder(turn, 2 * math.pi)
        return math.pi - turn

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary {"vertices": [[x, y], ...]}."""
        return {"vertices": [[z.real, z.imag] for z in self.vertices]}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> Polygon:
        """Build and validate a polygon from its JSON dictionary."""
        return build_polygon(data["vertices"])

    def fingerprint(self) -> str:
        """Short deterministic hash of the vertex list."""
        text = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]


def build_polygon(vertices: Iterable[PointLike]) -> Polygon:
    """
    Validate a vertex list and build a Polygon.

    Parameters
    ----------
    vertices
        Points as complex numbers or (x, y) pairs, in counterclockwise order.

    Raises
    ------
    TooFewVertices
        If fewer than three vertices are given.
    DegenerateSide
        If two consecutive vertices coincide.
    ClockwiseOrder
        If the signed area is not positive.
    NonConvex
        If some pair of consecutive edges fails the strict convexity test.
    """
    points = tuple(as_point(p) for p in vertices)
    n = len(points)
    if n < 3:
        raise TooFewVertices(f"a polygon needs at least 3 vertices, got {n}")

    scale = max(abs(a - b) for a in points for b in points)
    edges = [points[(i + 1) % n] - points[i] for i in range(n)]
    for i, edge in enumerate(edges):
        if abs(edge) <= 1e-14 * scale:
            raise DegenerateSide(f"side {i} has zero length")

    polygon = Polygon(points)
    if polygon.signed_area() <= 0.0:
        raise ClockwiseOrder("vertices must be listed counterclockwise")

    threshold = CONVEXITY_TOLERANCE * scale**2
    for i in range(n):
        a, b = edges[i - 1], edges[i]
        cross = a.real * b.imag - a.imag * b.real
        if cross <= threshold:
            raise NonConvex(f"polygon is not strictly convex at vertex {i}")
    return polygon


@dataclasses.dataclass(frozen=True)
class SimilarityGauge:
    """The map z -> exp(i theta) (z - translation) / scale."""

    #: Rotation angle theta, in radians.
    theta: float = 0.0

    #: Translation t, applied before rotating.
    translation: complex = 0j

    #: Scale c > 0; lengths are divided by c.
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError(f"gauge scale must be positive, got {self.scale}")

    def apply(self, z: Any) -> Any:
        """Image of a point (or array of points)."""
        return cmath.exp(1j * self.theta) * (z - self.translation) / self.scale

    def inverse(self) -> SimilarityGauge:
        """The inverse gauge."""
        rotation = cmath.exp(1j * self.theta)
        return SimilarityGauge(
            theta=-self.theta,
            translation=-rotation * self.translation / self.scale,
            scale=1.0 / self.scale,
        )

    def rescale_beta(self, beta: float) -> float:
        """PDE parameter in the gauge frame, c * beta."""
        return self.scale * beta

    def apply_polygon(self, polygon: Polygon) -> Polygon:
        """Image polygon (similarities preserve orientation and convexity)."""
        return build_polygon([self.apply(z) for z in polygon.vertices])


class GaugeMode(enum.Enum):
    """Target positions for `gauge_align`."""

    #: Side i becomes the interval (0, 1), traversed from 1 to 0.
    SIDE_ON_UNIT_INTERVAL = "side-on-unit-interval"

    #: Vertex z_i becomes the point i, the rest of the polygon lies below 0.
    VERTEX_AT_I = "vertex-at-i"


def gauge_align(
    polygon: Polygon, i: int, mode: GaugeMode, beta: float
) -> Tuple[SimilarityGauge, Polygon, float]:
    """
    Reposition a polygon relative to side or vertex i.

    Parameters
    ----------
    polygon
        The polygon to move.
    i
        Side index (SIDE_ON_UNIT_INTERVAL) or vertex index (VERTEX_AT_I).
    mode
        Target position.
    beta
        PDE parameter in the original frame.

    Returns
    -------
    gauge, image, beta_prime
        The similarity used, the image polygon and the rescaled parameter.

    Raises
    ------
    GeometryViolation
        If the image fails the lower half-plane condition.
    """
    if mode is GaugeMode.SIDE_ON_UNIT_INTERVAL:
        side = polygon.side(i)
        theta = math.remainder(math.pi - side.alpha, 2 * math.pi)
        gauge = SimilarityGauge(theta=theta, translation=side.end, scale=side.length)
        skip = {i % polygon.n, (i + 1) % polygon.n}
    elif mode is GaugeMode.VERTEX_AT_I:
        vertex = polygon.vertices[i % polygon.n]
        bisector = polygon.side(i).direction - polygon.side(i - 1).direction
        rotation = -1j / (bisector / abs(bisector))
        drops = [
            -(rotation * (z - vertex)).imag
            for j, z in enumerate(polygon.vertices)
            if j != i % polygon.n
        ]
        scale = 0.5 * min(drops)
        if scale <= 0.0:
            raise GeometryViolation(f"vertex {i} is not a convex corner")
        gauge = SimilarityGauge(
            theta=cmath.phase(rotation),
            translation=vertex - scale * 1j / rotation,
            scale=scale,
        )
        skip = {i % polygon.n}
    else:
        raise ValueError(f"unknown gauge mode {mode!r}")

    image = gauge.apply_polygon(polygon)
    for j, z in enumerate(image.vertices):
        if j not in skip and not z.imag < 0.0:
            raise GeometryViolation(
                f"vertex {j} is not in the lower half-plane after alignment"
            )
    return gauge, image, gauge.rescale_beta(beta)
