"""Standard polynomially convex model sets and their closed-form Siciak
extremal functions.

Only the standard catalogue is supported (disc, segment, box, polydisc and
products of these): these are the sets whose extremal function has an
elementary closed form, and they are the only sets the experiment pipelines
accept as "polynomially convex by declaration".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StandardShape",
    "Disc",
    "Segment",
    "Box",
    "Polydisc",
    "ProductShape",
    "siciak_phi",
    "continuity_probe",
    "shape_from_json",
]


class StandardShape:
    """Base class for the standard set catalogue; dim = complex dimension."""

    dim = 1

    def phi_many(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def diameter(self) -> float:  # pragma: no cover
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover
        raise NotImplementedError


def _phi_unit_segment(w: np.ndarray) -> np.ndarray:
    # |w + sqrt(w^2 - 1)| with the branch of modulus >= 1; the two branch
    # values have product of modulus exactly 1, so the max is the right one.
    s = np.sqrt(w * w - 1.0)
    return np.maximum(np.abs(w + s), np.abs(w - s))


@dataclass(frozen=True)
class Disc(StandardShape):
    center: complex = 0.0
    radius: float = 1.0
    dim = 1

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")

    def phi_many(self, pts):
        z = np.asarray(pts, dtype=complex).reshape(-1)
        return np.maximum(1.0, np.abs(z - self.center) / self.radius)

    def diameter(self):
        return 2.0 * self.radius

    def to_json(self):
        c = complex(self.center)
        return {"kind": "disc", "center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class Segment(StandardShape):
    """Closed segment between two endpoints of C (typically a real interval)."""

    a: complex = -1.0
    b: complex = 1.0
    dim = 1

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("segment endpoints must differ")

    def phi_many(self, pts):
        z = np.asarray(pts, dtype=complex).reshape(-1)
        w = (2.0 * z - self.a - self.b) / (self.b - self.a)
        return _phi_unit_segment(w)

    def diameter(self):
        return float(abs(self.b - self.a))

    def to_json(self):
        a, b = complex(self.a), complex(self.b)
        return {"kind": "segment", "a": [a.real, a.imag], "b": [b.real, b.imag]}


@dataclass(frozen=True)
class Box(StandardShape):
    """Product of real intervals, one per complex coordinate."""

    intervals: tuple

    def __post_init__(self):
        for lo, hi in self.intervals:
            if not lo < hi:
                raise ValueError("box intervals must be nondegenerate")

    @property
    def dim(self):
        return len(self.intervals)

    def phi_many(self, pts):
        z = np.atleast_2d(np.asarray(pts, dtype=complex))
        vals = np.ones(z.shape[0])
        for i, (lo, hi) in enumerate(self.intervals):
            w = (2.0 * z[:, i] - lo - hi) / (hi - lo)
            vals = np.maximum(vals, _phi_unit_segment(w))
        return vals

    def diameter(self):
        return float(np.sqrt(sum((hi - lo) ** 2 for lo, hi in self.intervals)))

    def to_json(self):
        return {"kind": "box", "intervals": [list(iv) for iv in self.intervals]}


@dataclass(frozen=True)
class Polydisc(StandardShape):
    """Polydisc centred at the origin with the given multiradius."""

    radii: tuple

    def __post_init__(self):
        if any(r <= 0 for r in self.radii):
            raise ValueError("polydisc radii must be positive")

    @property
    def dim(self):
        return len(self.radii)

    def phi_many(self, pts):
        z = np.atleast_2d(np.asarray(pts, dtype=complex))
        vals = np.ones(z.shape[0])
        for i, r in enumerate(self.radii):
            vals = np.maximum(vals, np.abs(z[:, i]) / r)
        return np.maximum(1.0, vals)

    def diameter(self):
        return float(2.0 * np.sqrt(sum(r * r for r in self.radii)))

    def to_json(self):
        return {"kind": "polydisc", "radii": list(self.radii)}


@dataclass(frozen=True)
class ProductShape(StandardShape):
    """Product of lower-dimensional standard shapes, coordinates concatenated."""

    factors: tuple

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    def phi_many(self, pts):
        z = np.atleast_2d(np.asarray(pts, dtype=complex))
        vals = np.ones(z.shape[0])
        ofs = 0
        for f in self.factors:
            vals = np.maximum(vals, f.phi_many(z[:, ofs : ofs + f.dim]))
            ofs += f.dim
        return vals

    def diameter(self):
        return float(np.sqrt(sum(f.diameter() ** 2 for f in self.factors)))

    def to_json(self):
        return {"kind": "product", "factors": [f.to_json() for f in self.factors]}


def shape_from_json(data: dict) -> StandardShape:
    kind = data.get("kind")
    if kind == "disc":
        c = data.get("center", [0.0, 0.0])
        c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
        return Disc(c, float(data["radius"]))
    if kind == "segment":
        def _c(v):
            return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return Segment(_c(data["a"]), _c(data["b"]))
    if kind == "box":
        return Box(tuple(tuple(iv) for iv in data["intervals"]))
    if kind == "polydisc":
        return Polydisc(tuple(data["radii"]))
    if kind == "product":
        return ProductShape(tuple(shape_from_json(f) for f in data["factors"]))
    raise ValueError(f"unknown shape kind {kind!r}")


def siciak_phi(shape: StandardShape, z) -> float:
    """Extremal function value at a point; always >= 1 and == 1 on the set."""
    pts = np.atleast_2d(np.asarray(z, dtype=complex))
    if pts.shape[1] != shape.dim:
        raise ValueError(f"point dimension {pts.shape[1]} != shape dimension {shape.dim}")
    return float(shape.phi_many(pts)[0])


def continuity_probe(shape: StandardShape, grid_points: np.ndarray, grid_mesh: float, h: float) -> float:
    """Max |phi(p) - phi(q)| over grid pairs at distance <= h.

    A numeric modulus-of-continuity estimate: for the standard catalogue it
    tends to 0 with h.  Requires h >= 2 * grid mesh so that every point has
    neighbours inside its h-ball.
    """
    if h < 2.0 * grid_mesh:
        raise ValueError(f"need h >= 2 * grid mesh ({2 * grid_mesh:.3e}), got {h:.3e}")
    pts = np.atleast_2d(np.asarray(grid_points, dtype=complex))
    vals = shape.phi_many(pts)
    re = np.column_stack([pts.real, pts.imag])
    from scipy.spatial import cKDTree

    tree = cKDTree(re)
    osc = 0.0
    for i, nbrs in enumerate(tree.query_ball_point(re, h)):
        if nbrs:
            local = vals[nbrs]
            osc = max(osc, float(np.abs(local - vals[i]).max()))
    return osc
