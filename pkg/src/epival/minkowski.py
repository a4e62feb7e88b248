"""Reconstruction of a polytope from its surface area measure.

Dimension 2 is a direct edge walk: sort the normals by angle, lay the
edges end to end, close the tiny float gap.  Dimension 3 solves the
variational form of the problem: maximize the enclosed volume over
support offsets h on the slice {target . h = const}, where cube root
of volume is concave, so projected gradient ascent cannot stall even
while some facets are still empty.  A bordered Newton polish on the
stationarity system A(h) = lam * target then converges quadratically
using the analytic area Jacobian

    dA_i/dh_j = len(i, j) / sin(i, j)          for adjacent facets
    dA_i/dh_i = -sum_j len(i, j) * cos(i, j) / sin(i, j)

whose kernel is exactly the translations.  Facet polygons are computed
by clipping each facet's plane against all the other halfspaces, which
keeps every edge length tagged by the neighbor that produced it.  The
input measure must be positive and closed; both failure modes get
their own exception.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .bodies import GeometryError, Polytope
from .measures import SphereMeasure


class UnbalancedInput(ValueError):
    """The weighted normals do not sum to zero within tolerance."""


class DegenerateNormals(ValueError):
    """Nonpositive weights, or directions that do not span the space."""


def _merged_atoms(mu: SphereMeasure, direction_tol: float = 1e-9):
    units: list[np.ndarray] = []
    raw: list[float] = []
    for n, w in mu.atoms:
        n = np.asarray(n, dtype=float)
        nn = np.linalg.norm(n)
        if nn < 1e-12:
            raise DegenerateNormals("zero direction atom")
        units.append(n / nn)
        raw.append(float(w))
    # lexicographic sort so duplicates land next to each other; a short
    # backward scan over entries with a close leading coordinate then
    # merges them without the quadratic all-pairs comparison
    order = sorted(range(len(units)), key=lambda k: tuple(units[k]))
    normals: list[np.ndarray] = []
    weights: list[float] = []
    for k in order:
        n, w = units[k], raw[k]
        hit = False
        for idx in range(len(normals) - 1, -1, -1):
            if n[0] - normals[idx][0] > direction_tol:
                break
            if np.linalg.norm(normals[idx] - n) < direction_tol:
                weights[idx] += w
                hit = True
                break
        if not hit:
            normals.append(n)
            weights.append(w)
    keep = [k for k, w in enumerate(weights) if abs(w) > 1e-14]
    return [normals[k] for k in keep], [weights[k] for k in keep]


def _balance(normals, weights, balance_tol: float):
    """Project the weights onto the closedness constraint, least squares."""
    V = np.array(normals).T
    w = np.array(weights, dtype=float)
    r = V @ w
    total = float(np.sum(np.abs(w))) or 1.0
    if np.linalg.norm(r) > balance_tol * total:
        raise UnbalancedInput(
            f"closedness residual {np.linalg.norm(r):.3e} exceeds "
            f"{balance_tol:.1e} of total mass")
    delta = -V.T @ np.linalg.solve(V @ V.T, r)
    return w + delta


def minkowski_solve(mu: SphereMeasure, dim: int | None = None,
                    balance_tol: float = 1e-6,
                    area_tol: float = 1e-9,
                    max_iter: int = 200) -> Polytope:
    """The polytope whose surface area measure is mu, up to translation."""
    if dim is None:
        dim = mu.dim
    if dim == 2:
        return _solve_2d(mu, balance_tol)
    if dim == 3:
        return _solve_3d(mu, balance_tol, area_tol, max_iter)
    raise GeometryError(f"dimension {dim} not supported")


# ---------------------------------------------------------------------------
# dimension 2: the edge walk


def _solve_2d(mu: SphereMeasure, balance_tol: float) -> Polytope:
    normals, weights = _merged_atoms(mu)
    if any(w <= 0 for w in weights):
        raise DegenerateNormals("surface area measure must be positive")
    if len(normals) < 3:
        raise DegenerateNormals("need at least three distinct edge normals")
    w = _balance(normals, weights, balance_tol)
    order = np.argsort([math.atan2(n[1], n[0]) for n in normals])
    pts = [np.zeros(2)]
    for k in order:
        n = normals[k]
        edge = w[k] * np.array([-n[1], n[0]])
        pts.append(pts[-1] + edge)
    gap = pts[-1]
    m = len(pts) - 1
    verts = [p - (i / m) * gap for i, p in enumerate(pts[:-1])]
    return Polytope.construct(
        [tuple(Fraction(float(x)) for x in v) for v in verts], 2)


# ---------------------------------------------------------------------------
# dimension 3: damped Newton on support offsets


def _clip_chain(edges, a, b, c, tag):
    """Intersect a convex edge chain in the plane with a*s + b*t <= c.

    Edges are ((P, Q), tag) pairs in cyclic order; the cut is closed with
    one new edge carrying the clip's tag.  Returns None when empty.
    """
    kept = []
    for (P, Q), et in edges:
        fP = a * P[0] + b * P[1] - c
        fQ = a * Q[0] + b * Q[1] - c
        if fP <= 0 and fQ <= 0:
            kept.append(((P, Q), et))
        elif fP <= 0 < fQ:
            t = fP / (fP - fQ)
            X = (P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1]))
            kept.append(((P, X), et))
        elif fQ <= 0 < fP:
            t = fP / (fP - fQ)
            X = (P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1]))
            kept.append(((X, Q), et))
    if not kept:
        return None
    out = []
    k = len(kept)
    for idx in range(k):
        (P, Q), et = kept[idx]
        out.append(((P, Q), et))
        R = kept[(idx + 1) % k][0][0]
        if abs(Q[0] - R[0]) + abs(Q[1] - R[1]) > 1e-13:
            out.append(((Q, R), tag))
    return out


def _facet_geometry(normals: np.ndarray, h: np.ndarray):
    """Areas, adjacency Jacobian, and float vertices at support vector h.

    Each facet polygon is built by clipping its own plane with all other
    halfspaces, so edge lengths come out tagged by the neighbor that cut
    them and the Jacobian assembles directly."""
    m = len(normals)
    L = 100.0 * (1.0 + float(np.max(np.abs(h))))
    for _ in range(3):
        out = _facet_geometry_at(normals, h, L)
        if out != "box":
            return out
        L *= 100.0
    return None


def _facet_geometry_at(normals: np.ndarray, h: np.ndarray, L: float):
    m = len(normals)
    areas = np.zeros(m)
    J = np.zeros((m, m))
    verts3: list[np.ndarray] = []
    any_nonempty = False
    for i in range(m):
        ni = normals[i]
        e1 = np.cross(ni, [1.0, 0.0, 0.0])
        if np.linalg.norm(e1) < 0.1:
            e1 = np.cross(ni, [0.0, 1.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(ni, e1)
        p0 = h[i] * ni
        corners = [(-L, -L), (L, -L), (L, L), (-L, L)]
        edges = [((corners[k], corners[(k + 1) % 4]), None) for k in range(4)]
        sins = {}
        for j in range(m):
            if j == i or edges is None:
                continue
            a = float(normals[j] @ e1)
            b = float(normals[j] @ e2)
            c = float(h[j] - normals[j] @ p0)
            s = math.hypot(a, b)
            if s < 1e-12:
                if c < -1e-9:
                    edges = None
                continue
            sins[j] = s
            edges = _clip_chain(edges, a / s, b / s, c / s, j)
        if edges is None:
            continue
        if any(et is None for _, et in edges):
            return "box"  # seed box too small for this support vector
        any_nonempty = True
        area2 = 0.0
        for (P, Q), et in edges:
            area2 += P[0] * Q[1] - P[1] * Q[0]
            verts3.append(p0 + P[0] * e1 + P[1] * e2)
            ell = math.hypot(Q[0] - P[0], Q[1] - P[1])
            if ell < 1e-12:
                continue
            cos = float(ni @ normals[et])
            J[i, et] += ell / sins[et]
            J[i, i] -= ell * cos / sins[et]
        areas[i] = 0.5 * abs(area2)
    if not any_nonempty:
        return None
    J = 0.5 * (J + J.T)
    tol = 1e-9 * max(1.0, L / 100.0)
    clusters: list[list[np.ndarray]] = []
    for v in verts3:
        for cl in clusters:
            if np.linalg.norm(v - cl[0]) < tol:
                cl.append(v)
                break
        else:
            clusters.append([v])
    V = np.array([np.mean(cl, axis=0) for cl in clusters])
    return areas, J, V


def _solve_3d(mu: SphereMeasure, balance_tol: float, area_tol: float,
              max_iter: int) -> Polytope:
    normals, weights = _merged_atoms(mu)
    if any(w <= 0 for w in weights):
        raise DegenerateNormals("surface area measure must be positive")
    N = np.array(normals)
    if len(normals) < 4 or np.linalg.matrix_rank(N, tol=1e-9) < 3:
        raise DegenerateNormals("normals do not span space")
    target = _balance(normals, weights, balance_tol)
    scale = float(np.max(target))
    m = len(normals)

    # Maximize volume over the slice {target . h = const}.  By
    # Brunn-Minkowski V^(1/3) is concave there, and the projected
    # gradient pulls in any facet plane that has drifted off the body,
    # so ascent cannot stall the way a raw area Newton does.
    h = np.ones(m)
    geo = _facet_geometry(N, h)
    if geo is None:
        raise DegenerateNormals("unit support polytope is empty")
    areas, J, V = geo
    tt = float(target @ target)
    alpha = 1.0
    for _ in range(400):
        vol = float(h @ areas) / 3.0
        lam = float(target @ areas) / tt
        g = areas - lam * target
        if float(np.linalg.norm(g)) <= 1e-3 * max(lam, 1e-12) * math.sqrt(tt):
            break
        moved = False
        for _ in range(60):
            trial = h + alpha * g
            t_geo = _facet_geometry(N, trial)
            if t_geo is not None:
                t_areas, t_J, t_V = t_geo
                if float(trial @ t_areas) / 3.0 > vol:
                    h, areas, J, V = trial, t_areas, t_J, t_V
                    alpha *= 2.0
                    moved = True
                    break
            alpha *= 0.5
        if not moved:
            break

    # Newton polish on the stationarity system A(h) = lam * target with
    # the slice constraint bordered in; translations span the kernel and
    # the least squares solve ignores them.
    lam = float(target @ areas) / tt
    c = float(target @ h)
    best = float(np.max(np.abs(areas - lam * target)))
    for _ in range(max_iter):
        if best <= area_tol * max(1.0, lam * scale):
            break
        M = np.zeros((m + 1, m + 1))
        M[:m, :m] = J
        M[:m, m] = -target
        M[m, :m] = target
        rhs = np.concatenate([lam * target - areas, [c - float(target @ h)]])
        step = np.linalg.lstsq(M, rhs, rcond=None)[0]
        improved = False
        frac = 1.0
        for _ in range(40):
            trial = h + frac * step[:m]
            t_lam = lam + frac * step[m]
            t_geo = _facet_geometry(N, trial)
            if t_geo is not None:
                t_areas, t_J, t_V = t_geo
                err = float(np.max(np.abs(t_areas - t_lam * target)))
                if err < best:
                    h, areas, J, V, lam, best = trial, t_areas, t_J, t_V, t_lam, err
                    improved = True
                    break
            frac *= 0.5
        if not improved:
            break

    if lam <= 0:
        raise GeometryError("area iteration collapsed")
    h /= math.sqrt(lam)
    geo = _facet_geometry(N, h)
    if geo is None:
        raise GeometryError("area iteration collapsed")
    areas, J, V = geo
    final = float(np.max(np.abs(areas - target)))
    if final > 1e-7 * max(1.0, scale):
        raise GeometryError(f"area iteration stalled at residual {final:.3e}")

    return Polytope.construct(
        [tuple(Fraction(float(x)) for x in v) for v in V], 3)
