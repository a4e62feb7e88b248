"""Piecewise linear convex functions with compact polytopal domain.

A function is stored as its domain together with the minimal family of
affine pieces (g, b); the function value is max_k (g . x + b_k) on the
domain and +infinity outside.  Pieces kept are exactly those active on a
region of full dimension inside the domain, so two functions are equal
iff their canonical data are equal.

The link to convex bodies goes both ways: body_of builds the compact
body enclosed by the graph and its reflection through the max level,
floor_of reads the lower boundary function off a body.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .bodies import GeometryError, Polytope
from .linalg import Vec, dot, smul, sub

Piece = tuple[Vec, Fraction]


class EpiMinNotConvex(GeometryError):
    """Pointwise minimum of the two functions is not convex."""


def _as_piece(g: Sequence, b) -> Piece:
    return tuple(Fraction(x) for x in g), Fraction(b)


def _project_piece(piece: Piece, domain: Polytope) -> Piece:
    """Kill the gradient component orthogonal to the domain's affine hull,
    keeping the values on the domain; canonical for flat domains."""
    g, b = piece
    verts = list(domain.vertices)
    base = verts[0]
    basis = []
    for p in verts[1:]:
        cand = basis + [sub(p, base)]
        if linalg.mat_rank(cand) == len(cand):
            basis.append(sub(p, base))
    if len(basis) == domain.ambient_dim:
        return piece
    # orthogonalize the basis, project g onto its span
    ortho: list[Vec] = []
    for u in basis:
        v = list(u)
        for w in ortho:
            coef = dot(v, w) / linalg.norm_sq(w)
            v = [a - coef * x for a, x in zip(v, w)]
        ortho.append(tuple(v))
    gp = [Fraction(0)] * domain.ambient_dim
    for w in ortho:
        coef = dot(g, w) / linalg.norm_sq(w)
        gp = [a + coef * x for a, x in zip(gp, w)]
    gp = tuple(gp)
    resid = sub(g, gp)
    return gp, b + dot(resid, base)


@dataclass(frozen=True, eq=False)
class PLConvexFunction:
    domain: Polytope
    pieces: tuple[Piece, ...]

    # ---- constructors -------------------------------------------------

    @staticmethod
    def empty(n: int) -> "PLConvexFunction":
        return PLConvexFunction(Polytope.empty(n), ())

    @staticmethod
    def constant(domain: Polytope, c) -> "PLConvexFunction":
        return PLConvexFunction.from_pieces(
            domain, [((0,) * domain.ambient_dim, c)]
        )

    @staticmethod
    def affine(domain: Polytope, g: Sequence, b) -> "PLConvexFunction":
        return PLConvexFunction.from_pieces(domain, [(g, b)])

    @staticmethod
    def from_pieces(
        domain: Polytope, pieces: Iterable[tuple[Sequence, object]]
    ) -> "PLConvexFunction":
        if domain.is_empty:
            return PLConvexFunction.empty(domain.ambient_dim)
        raw = [_as_piece(g, b) for g, b in pieces]
        if not raw:
            raise GeometryError("a function needs at least one piece")
        k = domain.intrinsic_dim
        if k < domain.ambient_dim:
            raw = [_project_piece(p, domain) for p in raw]
        if k == 0:
            x0 = domain.vertices[0]
            val = max(dot(g, x0) + b for g, b in raw)
            zero = (Fraction(0),) * domain.ambient_dim
            return PLConvexFunction(domain, ((zero, val),))
        raw = sorted(set(raw))
        kept = []
        for i, (g, b) in enumerate(raw):
            region = domain
            for j, (h, c) in enumerate(raw):
                if i == j:
                    continue
                # keep where g.x + b >= h.x + c
                region = region.clip(sub(h, g), b - c)
                if region.is_empty or region.intrinsic_dim < k:
                    break
            if not region.is_empty and region.intrinsic_dim == k:
                kept.append((g, b))
        return PLConvexFunction(domain, tuple(kept))

    @staticmethod
    def lower_envelope(lifted_points: Iterable[Sequence]) -> "PLConvexFunction":
        """The function whose graph is the lower boundary of the convex
        hull of the given (x, t) points."""
        pts = [tuple(Fraction(v) for v in p) for p in lifted_points]
        if not pts:
            raise GeometryError("no points")
        hull = Polytope.construct(pts, len(pts[0]))
        return PLConvexFunction.floor_of(hull)

    @staticmethod
    def floor_of(body: Polytope) -> "PLConvexFunction":
        """Lower boundary function: x maps to min{t : (x, t) in body}."""
        if body.is_empty:
            return PLConvexFunction.empty(body.ambient_dim - 1)
        n = body.ambient_dim - 1
        dom = Polytope.construct([v[:-1] for v in body.vertices], n) if n >= 1 else None
        if n < 1:
            raise GeometryError("need ambient dimension at least 2")
        if body.intrinsic_dim == 0:
            return PLConvexFunction.constant(dom, body.vertices[0][-1])
        pieces = []
        for m, c in body.proper_halfspaces:
            if m[-1] < 0:
                mt = Fraction(m[-1])
                g = tuple(-Fraction(x) / mt for x in m[:-1])
                pieces.append((g, c / mt))
        for m, c in body.equality_planes:
            if m[-1] != 0:
                mt = Fraction(m[-1])
                g = tuple(-Fraction(x) / mt for x in m[:-1])
                pieces.append((g, c / mt))
        if not pieces:
            # vertical segment: bottom vertex value
            lo = min(v[-1] for v in body.vertices)
            return PLConvexFunction.constant(dom, lo)
        return PLConvexFunction.from_pieces(dom, pieces)

    # ---- canonical structure ------------------------------------------

    @property
    def n(self) -> int:
        return self.domain.ambient_dim

    @property
    def is_empty(self) -> bool:
        return self.domain.is_empty

    def __eq__(self, other) -> bool:
        if not isinstance(other, PLConvexFunction):
            return NotImplemented
        return self.domain == other.domain and set(self.pieces) == set(other.pieces)

    def __hash__(self) -> int:
        return hash((self.domain, frozenset(self.pieces)))

    def __repr__(self) -> str:
        return f"PLConvexFunction(n={self.n}, npieces={len(self.pieces)})"

    @cached_property
    def cells(self) -> tuple[tuple[Vec, Fraction, Polytope], ...]:
        """Maximal regions of affineness with their gradient and offset."""
        if self.is_empty:
            return ()
        k = self.domain.intrinsic_dim
        out = []
        for g, b in self.pieces:
            region = self.domain
            for h, c in self.pieces:
                if (h, c) == (g, b):
                    continue
                region = region.clip(sub(h, g), b - c)
            assert not region.is_empty and region.intrinsic_dim == k
            out.append((g, b, region))
        return tuple(out)

    @cached_property
    def complex_vertices(self) -> tuple[Vec, ...]:
        pts = set(self.domain.vertices)
        for _, _, region in self.cells:
            pts.update(region.vertices)
        return tuple(sorted(pts))

    @cached_property
    def min_value(self) -> Fraction:
        return min(self.evaluate(v) for v in self.complex_vertices)

    @cached_property
    def max_value(self) -> Fraction:
        return max(self.evaluate(v) for v in self.domain.vertices)

    # ---- evaluation ---------------------------------------------------

    def evaluate(self, x: Sequence) -> Fraction | None:
        """Exact value, or None outside the domain."""
        if self.is_empty:
            return None
        p = tuple(Fraction(v) for v in x)
        if not self.domain.contains(p):
            return None
        return max(dot(g, p) + b for g, b in self.pieces)

    @cached_property
    def _float_pieces(self) -> tuple[np.ndarray, np.ndarray]:
        G = np.array([[float(x) for x in g] for g, _ in self.pieces], dtype=float)
        B = np.array([float(b) for _, b in self.pieces], dtype=float)
        return G, B

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Float values on rows of points; +inf outside the domain."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_empty:
            return np.full(len(pts), np.inf)
        G, B = self._float_pieces
        vals = np.max(pts @ G.T + B, axis=1)
        A, b = self.domain.float_halfspaces
        inside = np.all(pts @ A.T <= b + 1e-12 * np.maximum(1.0, np.abs(b)), axis=1)
        return np.where(inside, vals, np.inf)

    def sublevel_set(self, s) -> Polytope:
        if self.is_empty:
            return Polytope.empty(self.n)
        s = Fraction(s)
        out = self.domain
        for g, b in self.pieces:
            if all(x == 0 for x in g):
                if b > s:
                    return Polytope.empty(self.n)
                continue
            out = out.clip(g, s - b)
            if out.is_empty:
                break
        return out

    # ---- the dictionary -----------------------------------------------

    def body_of(self) -> Polytope:
        """Compact body between the graph and its reflection through twice
        the maximum level."""
        if self.is_empty:
            return Polytope.empty(self.n + 1)
        M = self.max_value
        pts = []
        for v in self.complex_vertices:
            t = self.evaluate(v)
            pts.append(v + (t,))
            pts.append(v + (2 * M - t,))
        return Polytope.construct(pts, self.n + 1)

    def graph_hull(self) -> Polytope:
        if self.is_empty:
            return Polytope.empty(self.n + 1)
        pts = [v + (self.evaluate(v),) for v in self.complex_vertices]
        return Polytope.construct(pts, self.n + 1)

    def fenchel_conjugate(self) -> "MaxAffine":
        """Exact convex conjugate; finite and piecewise linear on all of
        space because the domain is compact."""
        if self.is_empty:
            raise GeometryError("conjugate of the empty function")
        hull = self.graph_hull()
        lifted = set(hull.vertices)
        pieces = []
        for v in self.complex_vertices:
            t = self.evaluate(v)
            if v + (t,) in lifted:
                pieces.append((v, -t))
        return MaxAffine(tuple(sorted(pieces)))

    # ---- epi operations -----------------------------------------------

    def epi_translate(self, shift: Sequence, c) -> "PLConvexFunction":
        """u(x - shift) + c."""
        if self.is_empty:
            return self
        t = tuple(Fraction(v) for v in shift)
        c = Fraction(c)
        dom = self.domain.translate(t)
        pieces = [(g, b - dot(g, t) + c) for g, b in self.pieces]
        return PLConvexFunction(dom, tuple(sorted(pieces)))

    def epi_scale(self, t) -> "PLConvexFunction":
        """Epigraph scaling: the epigraph is multiplied by t > 0, giving
        x maps to t u(x / t)."""
        t = Fraction(t)
        if t <= 0:
            raise GeometryError("epi scale factor must be positive")
        if self.is_empty:
            return self
        dom = self.domain.scale(t)
        pieces = [(g, t * b) for g, b in self.pieces]
        return PLConvexFunction(dom, tuple(sorted(pieces)))

    def pointwise_max(self, other: "PLConvexFunction") -> "PLConvexFunction":
        if self.is_empty or other.is_empty:
            return PLConvexFunction.empty(self.n)
        dom = self.domain.intersect(other.domain)
        if dom.is_empty:
            return PLConvexFunction.empty(self.n)
        return PLConvexFunction.from_pieces(
            dom, list(self.pieces) + list(other.pieces)
        )

    def _ceiling_body(self, level: Fraction) -> Polytope:
        """The epigraph truncated at a level at or above the maximum:
        hull of the graph and the domain lifted to the level."""
        pts = [v + (self.evaluate(v),) for v in self.complex_vertices]
        pts += [v + (level,) for v in self.domain.vertices]
        return Polytope.construct(pts, self.n + 1)

    def pointwise_min(self, other: "PLConvexFunction") -> "PLConvexFunction":
        """Pointwise minimum; raises EpiMinNotConvex unless the result is
        convex (equivalently the union of the epigraphs is convex).

        The epigraph union splits at any common ceiling T >= both maxima:
        above T it is (dom union) x [T, oo), below T it is the union of
        the two truncated epigraph bodies, and segments crossing level T
        stay inside whenever both halves are convex.  Both halves are
        tested exactly; comparing the convex envelope against each input
        separately would wrongly reject overlapping domains, where an
        input may sit strictly above the (still convex) minimum."""
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        if not self.domain.is_union_convex(other.domain):
            raise EpiMinNotConvex("domain union is not convex")
        # strictly above both maxima so the truncated bodies are full-dim
        level = max(self.max_value, other.max_value) + 1
        if not self._ceiling_body(level).is_union_convex(
                other._ceiling_body(level)):
            raise EpiMinNotConvex("epigraph union is not convex")
        cand_pts = [v + (self.evaluate(v),) for v in self.complex_vertices]
        cand_pts += [v + (other.evaluate(v),) for v in other.complex_vertices]
        return PLConvexFunction.lower_envelope(cand_pts)

    def min_exists_with(self, other: "PLConvexFunction") -> bool:
        try:
            self.pointwise_min(other)
            return True
        except EpiMinNotConvex:
            return False

    # ---- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "domain": self.domain.to_dict(),
            "pieces": [{"a": [str(x) for x in g], "b": str(b)}
                       for g, b in self.pieces],
        }

    @staticmethod
    def from_dict(data: dict) -> "PLConvexFunction":
        dom = Polytope.from_dict(data["domain"])
        pieces = [
            (tuple(Fraction(s) for s in p["a"]), Fraction(p["b"]))
            for p in data["pieces"]
        ]
        if dom.is_empty:
            return PLConvexFunction.empty(int(data["n"]))
        return PLConvexFunction.from_pieces(dom, pieces)


@dataclass(frozen=True, eq=False)
class MaxAffine:
    """Finite maximum of affine functions on all of space, exact."""

    pieces: tuple[Piece, ...]

    def evaluate(self, y: Sequence) -> Fraction:
        p = tuple(Fraction(v) for v in y)
        return max(dot(g, p) + b for g, b in self.pieces)

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        G = np.array([[float(x) for x in g] for g, _ in self.pieces])
        B = np.array([float(b) for _, b in self.pieces])
        return np.max(pts @ G.T + B, axis=1)

    def restrict(self, domain: Polytope) -> PLConvexFunction:
        return PLConvexFunction.from_pieces(domain, self.pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaxAffine):
            return NotImplemented
        return set(self.pieces) == set(other.pieces)

    def __hash__(self) -> int:
        return hash(frozenset(self.pieces))


def epi_distance(u: PLConvexFunction, v: PLConvexFunction) -> float:
    """Sublevel set metric: the largest Hausdorff distance between the
    sublevel sets over a fixed geometric grid of levels anchored one
    below the smaller minimum, each term capped at one.  Empty against
    nonempty counts as one."""
    if u.is_empty and v.is_empty:
        return 0.0
    if u.is_empty or v.is_empty:
        return 1.0
    m = min(u.min_value, v.min_value)
    worst = 0.0
    for k in range(32):
        t = m - 1 + Fraction(3, 1024) * 2 ** k
        A = u.sublevel_set(t)
        B = v.sublevel_set(t)
        if A.is_empty and B.is_empty:
            continue
        if A.is_empty or B.is_empty:
            rho = 1.0
        else:
            rho = min(A.hausdorff_distance(B), 1.0)
        worst = max(worst, rho)
    return worst
