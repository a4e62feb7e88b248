"""Regions cut out of the unit sphere by polyhedral cones.

A patch is built from exact rational cone generators.  The case analysis
(lineality space, pointed part, extreme rays in cyclic order) is exact;
measures and integrals of continuous functions over the patch are floats.
Each patch also carries an exact halfspace description of its cone:
bounding normals m with the meaning m·x ≤ 0.

Patch kinds by linear span s and lineality l of the cone, ambient d:
    points    s=1        one direction (l=0) or an antipodal pair (l=1)
    arc       s=2, d any wedge arc, half circle (l=1), full circle (l=2)
    polygon   s=3, l=0   convex spherical polygon, area by Girard
    lune      s=3, l=1   region between two meridian half planes
    cap       s=3, l=2   hemisphere
    sphere    s=3, l=3   everything
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .bodies import GeometryError, _hull_2d, _orthogonal_complement
from .linalg import Vec, dot, mat_rank, primitive, solve

_GL_NODES = {}


def _gl(n: int):
    if n not in _GL_NODES:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_NODES[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_NODES[n]


def _unit(v) -> np.ndarray:
    a = np.asarray([float(x) for x in v], dtype=float)
    return a / np.linalg.norm(a)


def in_cone(x: Sequence[Fraction], gens: Sequence[Vec]) -> bool:
    """Exact membership of x in the conical hull of the generators."""
    x = tuple(Fraction(v) for v in x)
    if all(v == 0 for v in x):
        return True
    d = len(x)
    for r in range(1, d + 1):
        for sel in itertools.combinations(gens, r):
            if mat_rank(sel) < r:
                continue
            gram = [[dot(a, b) for b in sel] for a in sel]
            rhs = [dot(a, x) for a in sel]
            lam = solve(gram, rhs)
            if lam is None or any(l < 0 for l in lam):
                continue
            rec = [sum(lam[i] * sel[i][k] for i in range(r)) for k in range(d)]
            if tuple(rec) == x:
                return True
    return False


def clip_cone(rays: Sequence[Vec], normal: Sequence) -> list[Vec]:
    """Generators of cone(rays) ∩ {x : normal·x ≤ 0} (double description step)."""
    nrm = tuple(Fraction(x) for x in normal)
    out = [r for r in rays if dot(nrm, r) <= 0]
    below = [r for r in rays if dot(nrm, r) < 0]
    above = [r for r in rays if dot(nrm, r) > 0]
    for a in below:
        for b in above:
            w = tuple(dot(nrm, b) * x - dot(nrm, a) * y for x, y in zip(a, b))
            if any(v != 0 for v in w):
                out.append(w)
    return out


def _dedupe_rays(gens: Sequence[Vec]) -> list[tuple[int, ...]]:
    seen = []
    for g in gens:
        if all(x == 0 for x in g):
            continue
        p = primitive(g)
        if p not in seen:
            seen.append(p)
    return seen


def _extreme_pair(pointed: list[Vec]) -> tuple[Vec, Vec]:
    """The two extreme rays of a pointed rank-2 cone, exact."""
    if len(pointed) == 2:
        return pointed[0], pointed[1]
    for a, b in itertools.combinations(pointed, 2):
        if mat_rank([a, b]) < 2:
            continue
        if all(in_cone(g, [a, b]) for g in pointed):
            return a, b
    raise GeometryError("no extreme pair found; cone not pointed of rank 2?")


def _perp_within(m_from: Vec, toward: Vec) -> Vec:
    """Component of toward orthogonal to m_from, exact (nonzero for rank 2)."""
    coef = dot(toward, m_from) / linalg.norm_sq(m_from)
    return tuple(t - coef * f for t, f in zip(toward, m_from))


def _interior_direction(pointed: list[Vec]) -> Vec:
    cands = [tuple(sum(g[k] for g in pointed) for k in range(3))]
    fsum = np.sum([_unit(g) for g in pointed], axis=0)
    if np.linalg.norm(fsum) > 1e-12:
        cands.append(tuple(Fraction(x).limit_denominator(10 ** 6)
                           for x in fsum / np.linalg.norm(fsum)))
    for i, j in itertools.combinations(range(len(pointed)), 2):
        cands.append(tuple(x + y for x, y in zip(pointed[i], pointed[j])))
    cands.append(_interior_direction_lp(pointed))
    for w in cands:
        if all(v == 0 for v in w):
            continue
        if all(dot(w, g) > 0 for g in pointed):
            return tuple(Fraction(x) for x in w)
    raise GeometryError("no strict interior direction found for pointed cone")


def _interior_direction_lp(pointed: list[Vec]) -> Vec:
    """Feasible point of {w : w . g >= 1 for the unit generators}, so the
    float answer has margin near 1 and survives exact re-verification."""
    from scipy.optimize import linprog

    units = np.array([_unit(g) for g in pointed])
    res = linprog(
        c=np.zeros(3),
        A_ub=-units,
        b_ub=-np.ones(len(pointed)),
        bounds=[(-1e9, 1e9)] * 3,
        method="highs",
    )
    if not res.success:
        return (Fraction(0),) * 3
    return tuple(Fraction(float(x)) for x in res.x)


def _extreme_cycle_3d(pointed: list[Vec]) -> list[Vec]:
    """Extreme rays of a pointed full rank cone, in cyclic order, exact."""
    w = _interior_direction(pointed)
    section = []
    for g in pointed:
        t = dot(w, g)
        section.append(tuple(x / t for x in g))
    basis = _orthogonal_complement([w], 3)
    coords = [(dot(basis[0], q), dot(basis[1], q)) for q in section]
    cyc = _hull_2d(coords)
    lookup = {c: pointed[i] for i, c in enumerate(coords)}
    return [lookup[c] for c in cyc]


@dataclass(frozen=True)
class SphericalPatch:
    kind: str
    dim: int
    measure: float
    data: tuple
    rays: tuple[Vec, ...] = ()
    bounding: tuple[tuple[int, ...], ...] = ()

    @staticmethod
    def from_generators(gens: Sequence[Sequence], d: int) -> "SphericalPatch":
        rays = _dedupe_rays([tuple(Fraction(x) for x in g) for g in gens])
        if not rays:
            raise GeometryError("cone has no nonzero generators")
        rays_f = [tuple(Fraction(x) for x in r) for r in rays]
        # lineality space: spanned by the rays whose negation stays inside
        lin_rays = [r for r in rays_f if in_cone([-x for x in r], rays_f)]
        lin_basis: list[Vec] = []
        for r in lin_rays:
            cand = lin_basis + [r]
            if mat_rank(cand) == len(cand):
                lin_basis.append(r)
        l = len(lin_basis)
        # pointed part: project the remaining rays off the lineality space
        ortho: list[Vec] = []
        for u in lin_basis:
            v = list(u)
            for w in ortho:
                coef = dot(v, w) / linalg.norm_sq(w)
                v = [a - coef * b for a, b in zip(v, w)]
            ortho.append(tuple(v))
        pointed: list[Vec] = []
        for r in rays_f:
            v = list(r)
            for w in ortho:
                coef = dot(v, w) / linalg.norm_sq(w)
                v = [a - coef * b for a, b in zip(v, w)]
            if any(x != 0 for x in v):
                pointed.append(tuple(v))
        pointed = [tuple(Fraction(x) for x in p) for p in _dedupe_rays(pointed)]
        p = mat_rank(pointed) if pointed else 0
        s = l + p

        if d == 2:
            kind, measure, data, span_facets = SphericalPatch._build_2d(
                l, p, pointed, lin_basis)
        else:
            kind, measure, data, span_facets = SphericalPatch._build_3d(
                l, p, s, pointed, lin_basis)

        span_basis = list(lin_basis) + list(pointed)
        bounding = [primitive(m) for m in span_facets]
        if span_basis and mat_rank(span_basis) < d:
            for m in _orthogonal_complement(span_basis, d):
                pm = primitive(m)
                bounding.append(pm)
                bounding.append(tuple(-x for x in pm))
        return SphericalPatch(kind, d, measure, data,
                              tuple(rays_f), tuple(bounding))

    # ---- assembly ------------------------------------------------------

    @staticmethod
    def _build_2d(l, p, pointed, lin_basis):
        if l == 2:
            e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
            return "arc", 2 * math.pi, (e1, e2, 0.0, 2 * math.pi), []
        if l == 1:
            if p == 0:
                u = _unit(lin_basis[0])
                return "points", 2.0, (u, -u), []
            # half plane: semicircle centered on the pointed direction
            a = _unit(pointed[0])
            t = _unit(lin_basis[0])
            return "arc", math.pi, (t, a, 0.0, math.pi), \
                [tuple(-x for x in pointed[0])]
        if p == 1:
            a = pointed[0]
            return "points", 1.0, (_unit(a),), [tuple(-x for x in a)]
        ea, eb = _extreme_pair(pointed)
        ua, ub = _unit(ea), _unit(eb)
        ang = math.acos(max(-1.0, min(1.0, float(ua @ ub))))
        sgn = 1.0 if (ua[0] * ub[1] - ua[1] * ub[0]) > 0 else -1.0
        e2 = np.array([-ua[1] * sgn, ua[0] * sgn])
        facets = [tuple(-x for x in _perp_within(ea, eb)),
                  tuple(-x for x in _perp_within(eb, ea))]
        return "arc", ang, (ua, e2, 0.0, ang), facets

    @staticmethod
    def _build_3d(l, p, s, pointed, lin_basis):
        if s == 1:
            if l == 1:
                u = _unit(lin_basis[0])
                return "points", 2.0, (u, -u), []
            a = pointed[0]
            return "points", 1.0, (_unit(a),), [tuple(-x for x in a)]
        if l == 3:
            return "sphere", 4 * math.pi, (), []
        if l == 2 and p == 0:
            # the cone is a plane: great circle
            e1 = _unit(lin_basis[0])
            e2f = np.array([float(x) for x in lin_basis[1]])
            e2 = e2f - (e2f @ e1) * e1
            e2 /= np.linalg.norm(e2)
            return "arc", 2 * math.pi, (e1, e2, 0.0, 2 * math.pi), []
        if l == 2:
            # half space: the pointed remainder is orthogonal to the plane
            a = pointed[0]
            return "cap", 2 * math.pi, (_unit(a),), [tuple(-x for x in a)]
        if s == 2:
            if l == 1:
                # half great circle from -t through a to t
                t = _unit(lin_basis[0])
                a = _unit(pointed[0])
                return "arc", math.pi, (t, a, 0.0, math.pi), \
                    [tuple(-x for x in pointed[0])]
            ea, eb = _extreme_pair(pointed)
            ua, ub = _unit(ea), _unit(eb)
            ang = math.acos(max(-1.0, min(1.0, float(ua @ ub))))
            e2 = ub - float(ub @ ua) * ua
            e2 /= np.linalg.norm(e2)
            facets = [tuple(-x for x in _perp_within(ea, eb)),
                      tuple(-x for x in _perp_within(eb, ea))]
            return "arc", ang, (ua, e2, 0.0, ang), facets
        if l == 1:
            # lune between the meridian planes through the wedge edges
            ea, eb = _extreme_pair(pointed)
            axis = _unit(lin_basis[0])
            ua, ub = _unit(ea), _unit(eb)
            theta = math.acos(max(-1.0, min(1.0, float(ua @ ub))))
            e2 = ub - float(ub @ ua) * ua
            e2 /= np.linalg.norm(e2)
            facets = [tuple(-x for x in _perp_within(ea, eb)),
                      tuple(-x for x in _perp_within(eb, ea))]
            return "lune", 2 * theta, (axis, ua, e2, theta), facets
        # pointed full dimensional cone: spherical polygon
        cyc = _extreme_cycle_3d(pointed)
        w = _interior_direction(pointed)
        facets = []
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            nu = linalg.cross3(a, b)
            if dot(nu, w) > 0:
                nu = tuple(-x for x in nu)
            facets.append(nu)
        verts = [_unit(v) for v in cyc]
        return "polygon", _girard_area(verts), tuple(verts), facets

    # ---- queries -------------------------------------------------------

    def contains_direction(self, u: np.ndarray, tol: float = 1e-9) -> bool:
        """Whether the float direction u lies in the cone (boundary included)."""
        for m in self.bounding:
            mf = np.array([float(x) for x in m])
            if float(mf @ u) > tol * np.linalg.norm(mf):
                return False
        return True

    # ---- integration ---------------------------------------------------

    def integrate(self, f: Callable[[np.ndarray], float], tol: float = 1e-11) -> float:
        if self.kind == "points":
            return float(sum(f(u) for u in self.data))
        if self.kind == "arc":
            e1, e2, p0, p1 = self.data
            g = lambda phi: f(math.cos(phi) * e1 + math.sin(phi) * e2)
            return _adaptive_1d(g, p0, p1, tol)
        if self.kind == "cap":
            axis = self.data[0]
            b1, b2 = _orthonormal_complement_f(axis)
            return _sphere_band(f, axis, b1, b2, 0.0, math.pi / 2, 0.0, 2 * math.pi, tol)
        if self.kind == "sphere":
            axis = np.array([0.0, 0.0, 1.0])
            b1, b2 = _orthonormal_complement_f(axis)
            return _sphere_band(f, axis, b1, b2, 0.0, math.pi, 0.0, 2 * math.pi, tol)
        if self.kind == "lune":
            axis, e1, e2, theta = self.data
            return _sphere_band(f, axis, e1, e2, 0.0, math.pi, 0.0, theta, tol)
        if self.kind == "polygon":
            verts = self.data
            total = 0.0
            for i in range(1, len(verts) - 1):
                total += _spherical_tri_integral(
                    verts[0], verts[i], verts[i + 1], f, tol / max(1, len(verts) - 2)
                )
            return total
        raise GeometryError(f"unknown patch kind {self.kind}")


def _girard_area(verts: list[np.ndarray]) -> float:
    k = len(verts)
    total = 0.0
    for i in range(k):
        a = verts[(i - 1) % k]
        v = verts[i]
        b = verts[(i + 1) % k]
        ta = a - float(a @ v) * v
        tb = b - float(b @ v) * v
        ta /= np.linalg.norm(ta)
        tb /= np.linalg.norm(tb)
        total += math.acos(max(-1.0, min(1.0, float(ta @ tb))))
    return total - (k - 2) * math.pi


def _orthonormal_complement_f(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = int(np.argmin(np.abs(axis)))
    e = np.zeros(3)
    e[k] = 1.0
    b1 = np.cross(axis, e)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(axis, b1)
    return b1, b2


def _adaptive_1d(g, a: float, b: float, tol: float, depth: int = 0) -> float:
    xs, ws = _gl(12)

    def quad(lo, hi):
        return (hi - lo) * float(np.sum(ws * np.array([g(lo + (hi - lo) * x) for x in xs])))

    mid = 0.5 * (a + b)
    whole = quad(a, b)
    halves = quad(a, mid) + quad(mid, b)
    if abs(whole - halves) < tol * (1.0 + abs(halves)) or depth > 18:
        return halves
    return _adaptive_1d(g, a, mid, tol / 2, depth + 1) + \
        _adaptive_1d(g, mid, b, tol / 2, depth + 1)


def _sphere_band(f, axis, b1, b2, psi0, psi1, phi0, phi1, tol) -> float:
    def g(psi):
        def h(phi):
            u = math.cos(psi) * axis + math.sin(psi) * (
                math.cos(phi) * b1 + math.sin(phi) * b2)
            return f(u)
        return math.sin(psi) * _adaptive_1d(h, phi0, phi1, tol)
    return _adaptive_1d(g, psi0, psi1, tol)


def _flat_tri_quad(v0, v1, v2, g, n: int) -> float:
    xs, ws = _gl(n)
    e1, e2 = v1 - v0, v2 - v0
    if len(e1) == 2:
        area2 = abs(e1[0] * e2[1] - e1[1] * e2[0])
    else:
        area2 = np.linalg.norm(np.cross(e1, e2))
    total = 0.0
    for i, s in enumerate(xs):
        for j, r in enumerate(xs):
            pt = v0 + s * ((1 - r) * (v1 - v0) + r * (v2 - v0))
            total += ws[i] * ws[j] * s * g(pt)
    return area2 * total


def _spherical_tri_integral(v0, v1, v2, f, tol: float, depth: int = 0) -> float:
    """Integral of f over the spherical triangle via radial projection of
    the flat triangle with the same vertices."""
    nu = np.cross(v1 - v0, v2 - v0)
    norm = np.linalg.norm(nu)
    if norm < 1e-30:
        return 0.0
    nu = nu / norm
    if float(nu @ v0) < 0:
        nu = -nu

    def g(pt):
        r = np.linalg.norm(pt)
        return f(pt / r) * float(pt @ nu) / r ** 3

    coarse = _flat_tri_quad(v0, v1, v2, g, 8)
    m01 = 0.5 * (v0 + v1)
    m12 = 0.5 * (v1 + v2)
    m20 = 0.5 * (v2 + v0)
    fine = (
        _flat_tri_quad(v0, m01, m20, g, 8)
        + _flat_tri_quad(m01, v1, m12, g, 8)
        + _flat_tri_quad(m20, m12, v2, g, 8)
        + _flat_tri_quad(m01, m12, m20, g, 8)
    )
    if abs(fine - coarse) < tol * (1.0 + abs(fine)) or depth > 7:
        return fine
    return (
        _spherical_tri_integral(v0, m01, m20, f, tol / 4, depth + 1)
        + _spherical_tri_integral(m01, v1, m12, f, tol / 4, depth + 1)
        + _spherical_tri_integral(m20, m12, v2, f, tol / 4, depth + 1)
        + _spherical_tri_integral(m01, m12, m20, f, tol / 4, depth + 1)
    )
