"""Structured triangulations of the unit square with tagged boundary parts.

Nodes are numbered row by row, ``index = j * (n + 1) + i`` for grid position
``(x, y) = (i / n, j / n)``.  Every grid cell is split along the diagonal from
its lower-left to its upper-right corner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

SIDES = ("bottom", "right", "top", "left")
TAGS = ("Gamma1", "Gamma2", "Gamma3", "GammaC", "GammaN_free")

_GEOM_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    """Part of one side of the unit square.

    ``start`` and ``stop`` are the side parameter: x for bottom/top, y for
    left/right.
    """

    side: str
    start: float = 0.0
    stop: float = 1.0

    def __post_init__(self):
        if self.side not in SIDES:
            raise ConfigurationError(f"unknown side {self.side!r}, expected one of {SIDES}")
        if not (0.0 <= self.start < self.stop <= 1.0):
            raise ConfigurationError(
                f"segment on {self.side} needs 0 <= start < stop <= 1, got [{self.start}, {self.stop}]"
            )

    @property
    def length(self) -> float:
        return self.stop - self.start

    def contains(self, point, tol=_GEOM_TOL) -> bool:
        side = side_of_point(point, tol)
        if self.side not in side:
            return False
        t = side_parameter(self.side, point)
        return self.start - tol <= t <= self.stop + tol


@dataclass(frozen=True)
class BoundarySpec:
    """Assignment of boundary tags to segments of the unit-square boundary."""

    segments: dict = field(default_factory=dict)

    def __post_init__(self):
        for tag, segs in self.segments.items():
            if tag not in TAGS:
                raise ConfigurationError(f"unknown boundary tag {tag!r}, expected one of {TAGS}")
        flat = [(tag, s) for tag, segs in self.segments.items() for s in segs]
        for a in range(len(flat)):
            for b in range(a + 1, len(flat)):
                (ta, sa), (tb, sb) = flat[a], flat[b]
                if sa.side == sb.side and min(sa.stop, sb.stop) - max(sa.start, sb.start) > _GEOM_TOL:
                    raise ConfigurationError(f"segments of {ta} and {tb} overlap on side {sa.side}")
        if not self.segments.get("GammaC"):
            raise ConfigurationError("GammaC must have positive length")

    def tag_length(self, tag) -> float:
        return sum(s.length for s in self.segments.get(tag, ()))

    def tag_at(self, point):
        for tag, segs in self.segments.items():
            for s in segs:
                if s.contains(point):
                    return tag
        return None

    def covers_boundary(self) -> bool:
        return abs(sum(s.length for segs in self.segments.values() for s in segs) - 4.0) <= 1e-12

    @classmethod
    def wall_left(cls):
        """Wall on the left side, horizontal traction on the right side."""
        return cls(
            {
                "GammaC": (Segment("bottom"),),
                "Gamma3": (Segment("left"),),
                "Gamma1": (Segment("right"),),
                "Gamma2": (Segment("top"),),
            }
        )

    @classmethod
    def wall_right(cls):
        """Mirror image of :meth:`wall_left`."""
        return cls(
            {
                "GammaC": (Segment("bottom"),),
                "Gamma3": (Segment("right"),),
                "Gamma1": (Segment("left"),),
                "Gamma2": (Segment("top"),),
            }
        )

    @classmethod
    def single_tag(cls, tag="GammaC"):
        """Whole boundary under one tag."""
        return cls({tag: tuple(Segment(s) for s in SIDES)})


def side_of_point(point, tol=_GEOM_TOL):
    """Names of the sides a point lies on (two at corners)."""
    x, y = point
    out = []
    if abs(y) <= tol:
        out.append("bottom")
    if abs(x - 1.0) <= tol:
        out.append("right")
    if abs(y - 1.0) <= tol:
        out.append("top")
    if abs(x) <= tol:
        out.append("left")
    return out


def side_parameter(side, point) -> float:
    return float(point[0] if side in ("bottom", "top") else point[1])


@dataclass(frozen=True)
class Mesh:
    """Triangulation with tagged boundary edges.

    Attributes:
        nodes: (N, 2) coordinates in meters.
        triangles: (T, 3) node indices, counterclockwise.
        boundary_edges: tuple of ``(i, j, tag)``; ``tag`` is None until
            :func:`tag_boundary` has been applied.
        n: number of divisions per side.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: tuple
    n: int

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_dofs(self) -> int:
        return 2 * len(self.nodes)

    @property
    def tags(self):
        return sorted({t for _, _, t in self.boundary_edges if t is not None})

    def edges_with_tag(self, tag):
        return [(i, j) for i, j, t in self.boundary_edges if t == tag]

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def to_text(self) -> str:
        """Plain node/element listing, one entry per line."""
        lines = [f"nodes {self.num_nodes}"]
        lines += [f"{k} {x:.17g} {y:.17g}" for k, (x, y) in enumerate(self.nodes)]
        lines.append(f"triangles {len(self.triangles)}")
        lines += [f"{k} {a} {b} {c}" for k, (a, b, c) in enumerate(self.triangles)]
        lines.append(f"boundary_edges {len(self.boundary_edges)}")
        lines += [f"{i} {j} {t if t is not None else '-'}" for i, j, t in self.boundary_edges]
        return "\n".join(lines) + "\n"


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def build_unit_square_mesh(n: int) -> Mesh:
    """Uniform right-triangle mesh of [0, 1]^2 with ``n`` cells per side."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of divisions must be a positive integer, got {n!r}")
    n = int(n)
    t = np.arange(n + 1) / n
    xx, yy = np.meshgrid(t, t)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    a = (j * (n + 1) + i).ravel()
    b, c, d = a + 1, a + n + 2, a + n + 1
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = np.column_stack([a, b, c])
    triangles[1::2] = np.column_stack([a, c, d])

    k = np.arange(n)
    edges = []
    # counterclockwise walk around the boundary
    edges += [(int(q), int(q + 1), None) for q in k]
    edges += [(int(q * (n + 1) + n), int((q + 1) * (n + 1) + n), None) for q in k]
    edges += [(int(n * (n + 1) + q + 1), int(n * (n + 1) + q), None) for q in k[::-1]]
    edges += [(int((q + 1) * (n + 1)), int(q * (n + 1)), None) for q in k[::-1]]
    return Mesh(_frozen(nodes), _frozen(triangles), tuple(edges), n)


def tag_boundary(mesh: Mesh, spec: BoundarySpec) -> Mesh:
    """Return a copy of ``mesh`` whose boundary edges carry the tag of the
    segment containing their midpoint."""
    tagged = []
    for i, j, _ in mesh.boundary_edges:
        mid = 0.5 * (mesh.nodes[i] + mesh.nodes[j])
        tag = spec.tag_at(mid)
        if tag is None:
            raise ConfigurationError(
                f"boundary edge ({i}, {j}) with midpoint ({mid[0]:g}, {mid[1]:g}) matches no segment"
            )
        tagged.append((i, j, tag))
    return Mesh(mesh.nodes, mesh.triangles, tuple(tagged), mesh.n)


def boundary_nodes(mesh: Mesh, tag) -> np.ndarray:
    """Nodes of the edges tagged ``tag`` in order of increasing arclength."""
    edges = mesh.edges_with_tag(tag)
    if not edges:
        raise KeyError(f"no boundary edges tagged {tag!r}")
    nbrs = {}
    for i, j in edges:
        nbrs.setdefault(i, []).append(j)
        nbrs.setdefault(j, []).append(i)
    ends = [v for v, nb in nbrs.items() if len(nb) == 1]
    if len(ends) not in (0, 2):
        raise ConfigurationError(f"edges tagged {tag!r} do not form a single chain")
    if ends:
        start = min(ends, key=lambda v: _walk_key(mesh, v))
    else:
        start = min(nbrs, key=lambda v: _walk_key(mesh, v))
    order = [start]
    prev, cur = None, start
    while True:
        nxt = sorted((v for v in nbrs[cur] if v != prev), key=lambda v: _walk_key(mesh, v))
        if not nxt or nxt[0] == start:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    if len(order) != len(nbrs):
        raise ConfigurationError(f"edges tagged {tag!r} do not form a single chain")
    return np.asarray(order, dtype=np.int64)


def _walk_key(mesh, v):
    # lowest side parameter first; bottom/left sides before top/right
    x, y = mesh.nodes[v]
    return (x + y, y)


def edge_lengths(mesh: Mesh, ordered_nodes) -> np.ndarray:
    p = mesh.nodes[np.asarray(ordered_nodes)]
    return np.linalg.norm(np.diff(p, axis=0), axis=1)

