"""Compact convex bodies behind support and membership oracles, plus the
local classifiers for extreme points: standard position, the lower boundary
function F, decay-rate certification, simplex-boundedness, isolation, and
inscribed balls.  Closed forms for the p-power bodies

    K_p = {(x, y) : |x|^p <= y <= 1}

live at the bottom of the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull

from .numkernel import EPS, column_rank

# rounding slack for containment tests, in units of the magnitudes compared
ROUND_SLACK = 64 * EPS

YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"


class GeometryError(ValueError):
    pass


class NotSupportingError(GeometryError):
    pass


class NotOnBoundaryError(GeometryError):
    pass


class NotExtremeError(GeometryError):
    pass


class PreconditionError(GeometryError):
    pass


# --- direction grids --------------------------------------------------------

def circle_directions(n: int = 720) -> np.ndarray:
    a = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(a), np.sin(a)])


def fibonacci_sphere(n: int = 2000) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    rho = np.sqrt(1 - z * z)
    phi = np.pi * (1 + 5 ** 0.5) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def direction_grid(dim: int, n2d: int = 720, nsphere: int = 2000, seed: int = 0) -> np.ndarray:
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        return circle_directions(n2d)
    if dim == 3:
        return fibonacci_sphere(nsphere)
    G = np.random.default_rng(seed).standard_normal((nsphere, dim))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def radius_grid(r0: float = 0.25, steps: int = 24) -> np.ndarray:
    return r0 * 0.5 ** np.arange(steps + 1)


# --- bodies -----------------------------------------------------------------

class ConvexBody:
    """Base class.  Subclasses implement ``support`` and ``_constraints``.

    ``_constraints(pts)`` returns (margins, scales), both of shape (m, k): each
    column is one inequality margin >= 0, and scales bound the magnitudes
    whose difference forms the margin (used for rounding slack).
    """

    kind = "abstract"
    dim = 2
    extreme_descriptor: Optional[str] = None

    def support(self, c) -> np.ndarray:
        raise NotImplementedError

    def _constraints(self, pts: np.ndarray):
        raise NotImplementedError

    def margin(self, pts) -> np.ndarray:
        P = np.atleast_2d(np.asarray(pts, dtype=float))
        m, _ = self._constraints(P)
        return m.min(axis=1)

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        P = np.atleast_2d(np.asarray(pts, dtype=float))
        m, s = self._constraints(P)
        return np.all(m >= -(tol + ROUND_SLACK * s), axis=1)

    def contains_point(self, x, tol: float = 0.0) -> tuple[bool, float]:
        return bool(self.contains(x, tol)[0]), float(self.margin(x)[0])

    def scale(self) -> float:
        """Rough coordinate magnitude of the body."""
        E = np.eye(self.dim)
        return float(max(1.0, np.max(np.abs(self.support(np.vstack([E, -E]))))))

    def descriptor(self) -> dict:
        raise NotImplementedError

    def isolated_at(self, lam: np.ndarray) -> tuple[str, dict]:
        return INCONCLUSIVE, {"reason": "no extreme-point descriptor for this body"}


class KpBody(ConvexBody):
    kind = "kp"
    dim = 2
    extreme_descriptor = "graph {(x, |x|^p): |x| <= 1}"

    def __init__(self, p: float):
        if not p > 1:
            raise ValueError("K_p needs p > 1")
        self.p = float(p)

    def support(self, c) -> np.ndarray:
        C = np.atleast_2d(np.asarray(c, dtype=float))
        a, b = np.abs(C[:, 0]), C[:, 1]
        out = a + b
        low = b < 0
        if np.any(low):
            al, bl = a[low], -b[low]
            ratio = al / (self.p * bl)
            s = np.where(ratio >= 1, 1.0, np.power(np.minimum(ratio, 1.0), 1.0 / (self.p - 1)))
            out[low] = al * s - bl * s ** self.p
        return out

    def _constraints(self, P):
        x, y = P[:, 0], P[:, 1]
        xp = np.abs(x) ** self.p
        m = np.column_stack([y - xp, 1 - y])
        s = np.column_stack([np.abs(y) + xp, 1 + np.abs(y)])
        return m, s

    def descriptor(self):
        return {"kind": "kp", "p": self.p}

    def isolated_at(self, lam):
        x, y = float(lam[0]), float(lam[1])
        if abs(x) > 1 + 1e-12 or abs(y - abs(x) ** self.p) > 1e-9 * max(1.0, abs(y)):
            raise NotExtremeError(f"{tuple(lam)} is not on the lower graph of K_p")
        # nearby graph points are extreme and accumulate at lam
        hs = 2.0 ** -np.arange(10, 40, 5)
        xs = np.clip(x - np.sign(x or 1.0) * hs, -1, 1)
        pts = np.column_stack([xs, np.abs(xs) ** self.p])
        dist = np.linalg.norm(pts - np.array([x, y]), axis=1)
        return NO, {"reason": "extreme points of the lower graph accumulate", "neighbor_distances": dist.tolist()}


class EuclideanBall(ConvexBody):
    kind = "disk"
    extreme_descriptor = "sphere"

    def __init__(self, center, radius: float = 1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.size

    def support(self, c):
        C = np.atleast_2d(np.asarray(c, dtype=float))
        return C @ self.center + self.radius * np.linalg.norm(C, axis=1)

    def _constraints(self, P):
        dist = np.linalg.norm(P - self.center, axis=1)
        s = self.radius + dist + np.linalg.norm(self.center)
        return (self.radius - dist)[:, None], s[:, None]

    def descriptor(self):
        return {"kind": "disk", "center": self.center.tolist(), "radius": self.radius}

    def isolated_at(self, lam):
        d = float(np.linalg.norm(np.asarray(lam) - self.center))
        if abs(d - self.radius) > 1e-9 * max(1.0, self.radius):
            raise NotExtremeError("point is not on the sphere")
        return NO, {"reason": "every boundary point of a ball is extreme; none is isolated"}


class LqBall(ConvexBody):
    kind = "lq_ball"

    def __init__(self, q: float, center, radius: float = 1.0):
        self.q = float(q)
        if not self.q >= 1:
            raise ValueError("need q >= 1")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.size
        self.extreme_descriptor = "sphere" if 1 < self.q < np.inf else "polytope vertices"

    @property
    def dual_q(self) -> float:
        if self.q == 1:
            return np.inf
        if self.q == np.inf:
            return 1.0
        return self.q / (self.q - 1)

    def support(self, c):
        C = np.atleast_2d(np.asarray(c, dtype=float))
        return C @ self.center + self.radius * np.linalg.norm(C, ord=self.dual_q, axis=1)

    def _constraints(self, P):
        dist = np.linalg.norm(P - self.center, ord=self.q, axis=1)
        s = self.radius + dist + np.linalg.norm(self.center)
        return (self.radius - dist)[:, None], s[:, None]

    def descriptor(self):
        return {"kind": "lq_ball", "q": self.q, "center": self.center.tolist(), "radius": self.radius}

    def isolated_at(self, lam):
        u = (np.asarray(lam, dtype=float) - self.center) / self.radius
        if abs(np.linalg.norm(u, ord=self.q) - 1) > 1e-9:
            raise NotExtremeError("point is not on the boundary of the ball")
        if 1 < self.q < np.inf:
            return NO, {"reason": "strictly convex boundary: every boundary point is extreme, none isolated"}
        if self.q == 1:
            vertex = np.sum(np.abs(u) > 1e-12) == 1
        else:
            vertex = bool(np.all(np.abs(np.abs(u) - 1) <= 1e-12))
        if not vertex:
            raise NotExtremeError("point lies on a face but is not a vertex")
        return YES, {"reason": "polytope vertex"}


class Polytope(ConvexBody):
    kind = "polytope"
    extreme_descriptor = "vertex list"

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        hull = ConvexHull(V)
        self.vertices = V[hull.vertices]
        self.dim = V.shape[1]
        self._eq = hull.equations

    def support(self, c):
        C = np.atleast_2d(np.asarray(c, dtype=float))
        return np.max(C @ self.vertices.T, axis=1)

    def _constraints(self, P):
        N, b = self._eq[:, :-1], self._eq[:, -1]
        NP = P @ N.T
        return -(NP + b), np.abs(NP) + np.abs(b)

    def descriptor(self):
        return {"kind": "polytope", "vertices": self.vertices.tolist()}

    def isolated_at(self, lam):
        lam = np.asarray(lam, dtype=float)
        d = np.min(np.linalg.norm(self.vertices - lam, axis=1))
        if d <= 1e-9 * self.scale():
            return YES, {"reason": "polytope vertex", "vertex_distance": float(d)}
        raise NotExtremeError("point is not a vertex of the polytope")


class GraphBody(ConvexBody):
    """{(x, y) : |x| <= radius, F(x) <= y <= top} for a convex F >= 0 with F(0) = 0."""

    kind = "graph_body"

    def __init__(self, F: Callable, radius: float = 1.0, top: float = 1.0, dim: int = 2, name: str = "custom"):
        self.F, self.radius, self.top, self.dim, self.name = F, float(radius), float(top), dim, name

    def _F(self, X):
        return np.asarray(self.F(X), dtype=float).reshape(-1)

    def support(self, c):
        C = np.atleast_2d(np.asarray(c, dtype=float))
        out = np.empty(len(C))
        for i, row in enumerate(C):
            a, b = row[:-1], row[-1]
            na = np.linalg.norm(a)
            if b >= 0:
                out[i] = self.radius * na + b * self.top
                continue
            if self.dim == 2:
                res = optimize.minimize_scalar(
                    lambda x: -(a[0] * x + b * self._F(np.array([[x]]))[0]),
                    bounds=(-self.radius, self.radius), method="bounded", options={"xatol": 1e-14})
                out[i] = -res.fun
            else:
                def obj(z):
                    z = z if np.linalg.norm(z) <= self.radius else z * self.radius / np.linalg.norm(z)
                    return -(a @ z + b * self._F(z[None, :])[0])
                best = max(-optimize.minimize(obj, x0, method="Nelder-Mead").fun
                           for x0 in [np.zeros(self.dim - 1), 0.5 * self.radius * a / max(na, 1e-300)])
                out[i] = best
        return out

    def _constraints(self, P):
        X, y = P[:, :-1], P[:, -1]
        r = np.linalg.norm(X, axis=1)
        inside = r <= self.radius
        Fx = np.full(len(P), np.inf)
        if np.any(inside):
            Fx[inside] = self._F(X[inside])
        Fm = np.where(np.isfinite(Fx), Fx, 0.0)
        m = np.column_stack([np.where(inside, y - Fm, -1.0), self.top - y, self.radius - r])
        s = np.column_stack([np.abs(y) + np.abs(Fm), self.top + np.abs(y), self.radius + r])
        return m, s

    def descriptor(self):
        return {"kind": "graph_body", "name": self.name, "radius": self.radius, "top": self.top, "dim": self.dim}


class TransformedBody(ConvexBody):
    """The image {Q (x - origin) : x in base}, Q orthogonal."""

    def __init__(self, base: ConvexBody, origin, Q):
        self.base = base
        self.origin = np.asarray(origin, dtype=float)
        self.Q = np.asarray(Q, dtype=float)
        self.dim = base.dim
        self.kind = base.kind
        self.extreme_descriptor = base.extreme_descriptor

    def to_base(self, Y) -> np.ndarray:
        return self.origin + np.atleast_2d(Y) @ self.Q

    def support(self, c):
        C = np.atleast_2d(np.asarray(c, dtype=float)) @ self.Q
        return self.base.support(C) - C @ self.origin

    def _constraints(self, P):
        m, s = self.base._constraints(self.to_base(P))
        return m, s

    def descriptor(self):
        return {"kind": "transformed", "base": self.base.descriptor(),
                "origin": self.origin.tolist(), "Q": self.Q.tolist()}

    def isolated_at(self, lam):
        return self.base.isolated_at(self.to_base(lam)[0])


def body_from_json(obj: dict) -> ConvexBody:
    kind = obj.get("kind")
    try:
        if kind == "kp":
            return KpBody(obj["p"])
        if kind == "disk":
            return EuclideanBall(obj.get("center", [0.0, 0.0]), obj.get("radius", 1.0))
        if kind == "lq_ball":
            q = obj["q"]
            q = np.inf if q in ("inf", "Infinity") else float(q)
            return LqBall(q, obj["center"], obj.get("radius", 1.0))
        if kind == "polytope":
            return Polytope(obj["vertices"])
    except KeyError as exc:
        raise GeometryError(f"body descriptor of kind {kind!r} is missing {exc}") from exc
    raise GeometryError(f"unknown body kind {kind!r}")


# --- standard position and the lower boundary function ----------------------

def _rotation_to_minus_last(u: np.ndarray) -> np.ndarray:
    """Proper rotation Q with Q u = -e_g."""
    g = u.size
    target = np.zeros(g)
    target[-1] = -1.0
    v = u - target
    if np.linalg.norm(v) < 1e-15:
        return np.eye(g)
    H = np.eye(g) - 2.0 * np.outer(v, v) / (v @ v)
    F = np.eye(g)
    F[0, 0] = -1.0
    return F @ H


@dataclass
class StandardPosition:
    body: TransformedBody
    lam: np.ndarray
    direction: np.ndarray
    Q: np.ndarray
    contains_margin: float
    halfspace_margin: float
    shadow_margin: float

    @property
    def g(self) -> int:
        return self.body.dim

    def evidence(self) -> dict:
        return {
            "lambda": self.lam.tolist(),
            "supporting_direction": self.direction.tolist(),
            "rotation": self.Q.tolist(),
            "contains_margin": self.contains_margin,
            "halfspace_margin": self.halfspace_margin,
            "shadow_margin": self.shadow_margin,
        }


def standard_position(K: ConvexBody, lam, direction, n2d: int = 720, nsphere: int = 2000,
                      support_tol: float = 1e-9) -> StandardPosition:
    """Move lam to the origin and the outward normal ``direction`` to -e_g."""
    lam = np.asarray(lam, dtype=float)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    if K.dim < 2:
        raise GeometryError("standard position needs dimension >= 2")
    inside, cmargin = K.contains_point(lam)
    if not inside:
        raise NotOnBoundaryError(f"point {lam.tolist()} is not in the body (margin {cmargin:.3e})")
    gap = float(K.support(u)[0] - u @ lam)
    if gap > support_tol * max(1.0, float(np.linalg.norm(lam))):
        raise NotSupportingError(f"direction does not support the body at the point (gap {gap:.3e})")
    Q = _rotation_to_minus_last(u)
    body = TransformedBody(K, lam, Q)
    W = direction_grid(K.dim - 1, n2d, nsphere)
    shadow = float(np.min(body.support(np.column_stack([W, np.zeros(len(W))]))))
    if shadow <= 0:
        raise GeometryError("the origin is not interior to the shadow of the body")
    return StandardPosition(body, lam, u, Q, cmargin, -gap, shadow)


def defining_function(S: StandardPosition, x, rel_tol: float = 1e-12) -> np.ndarray:
    """F(x) = min{y >= 0 : (x, y) in K} by vectorized bisection against ``contains``."""
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape[1] != S.g - 1:
        X = X.reshape(-1, S.g - 1)
    m = len(X)
    body = S.body
    top = float(body.support(np.eye(S.g)[-1])[0])
    ys = np.unique(np.concatenate([top * np.linspace(0, 1, 257), top * 2.0 ** (-np.arange(1, 1200) / 4)]))
    hi = np.full(m, np.nan)
    lo = np.zeros(m)
    for i in range(m):
        pts = np.column_stack([np.repeat(X[i:i + 1], len(ys), axis=0), ys])
        ok = body.contains(pts)
        if not ok.any():
            raise GeometryError(f"x = {X[i].tolist()} is outside the shadow of the body")
        j = int(np.argmax(ok))
        hi[i] = ys[j]
        lo[i] = ys[j - 1] if j > 0 else 0.0
    zero = hi == 0.0
    for _ in range(2000):
        active = (~zero) & (hi - lo > rel_tol * hi)
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = active & ((mid <= lo) | (mid >= hi))
        active &= ~stuck
        if not active.any():
            break
        ok = body.contains(np.column_stack([X[active], mid[active]]))
        idx = np.flatnonzero(active)
        hi[idx[ok]] = mid[idx[ok]]
        lo[idx[~ok]] = mid[idx[~ok]]
    return hi


# --- decay-rate certification -----------------------------------------------

def _rounding_noise(S: StandardPosition, pts: np.ndarray) -> np.ndarray:
    """Absolute uncertainty of a containment verdict at each point (in y)."""
    m, s = S.body.base._constraints(S.body.to_base(pts))
    binding = s[np.arange(len(s)), np.argmin(m, axis=1)]
    return ROUND_SLACK * binding + 4 * EPS * float(np.linalg.norm(S.lam))


def subquadratic_certify(S: StandardPosition, r0: float = 0.25, steps: int = 24, directions=None,
                         exact: bool = False, resolution: float = 1e3) -> dict:
    """Does F(x)/|x|^2 blow up at the origin?

    rho_k = min_u F(r_k u)/r_k^2 on r_k = r0 2^-k.  The sweep stops at the
    first radius where F is below ``resolution`` times the rounding noise of
    the containment test.  yes: rho nondecreasing on the last half and
    growing by 4x; no: rho on the last half stays within 10% of its mid
    value; otherwise inconclusive.
    """
    base = S.body.base
    if exact:
        if base.kind != "kp" or np.any(S.lam != 0) or not np.allclose(S.Q, np.eye(2)):
            raise GeometryError("exact mode is only available for K_p at the origin")
        return {"verdict": YES if base.p < 2 else NO, "mode": "exact", "p": base.p}
    if steps < 4:
        raise GeometryError("radius grid is degenerate")
    U = np.asarray(directions, dtype=float) if directions is not None else direction_grid(S.g - 1)
    radii = radius_grid(r0, steps)
    rho, used = [], []
    for r in radii:
        Fv = defining_function(S, r * U)
        noise = _rounding_noise(S, np.column_stack([r * U, Fv]))
        if np.any(Fv < resolution * noise) and len(rho) > 0:
            break
        rho.append(float(np.min(Fv)) / r ** 2)
        used.append(float(r))
    rho_arr = np.array(rho)
    out = {"mode": "numeric", "radii": used, "rho": rho, "dropped_steps": len(radii) - len(used)}
    K = len(rho_arr) - 1
    if K < 8:
        out["verdict"] = INCONCLUSIVE
        out["reason"] = "too few resolvable radii"
        return out
    mid = math.ceil(K / 2)
    tail = rho_arr[mid:]
    nondecreasing = bool(np.all(np.diff(tail) >= -1e-9 * np.abs(tail[:-1])))
    growth = float(tail[-1] / tail[0]) if tail[0] > 0 else np.inf
    out.update({"growth": growth, "mid_index": mid})
    if nondecreasing and growth >= 4:
        out["verdict"] = YES
    elif np.max(tail) <= 1.1 * tail[0]:
        out["verdict"] = NO
        out["fitted_constant"] = float(tail[-1])
    else:
        out["verdict"] = INCONCLUSIVE
    return out


# --- normal cone based classifiers ------------------------------------------

def support_gaps(K: ConvexBody, lam, directions) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return K.support(directions) - directions @ lam


def simplex_bounded(K: ConvexBody, lam, tol_active: float = 1e-13, directions=None) -> dict:
    """Vertex of some polytope containing K <=> full-dimensional normal cone at lam.

    A grid direction c is active when h_K(c) - <c, lam> <= tol_active (scaled
    by |lam|).  yes: active set spans R^g; no: it does not, and every inactive
    direction clears 10 tol_active; otherwise inconclusive.
    """
    lam = np.asarray(lam, dtype=float)
    if not K.contains_point(lam)[0]:
        raise NotExtremeError("point is not in the body")
    C = direction_grid(K.dim) if directions is None else np.asarray(directions, dtype=float)
    gaps = support_gaps(K, lam, C)
    tol = tol_active * max(1.0, float(np.linalg.norm(lam)))
    active = gaps <= tol
    rank = column_rank(C[active].T).rank if active.any() else 0
    inactive_min = float(np.min(gaps[~active])) if (~active).any() else np.inf
    evidence = {
        "criterion": "normal cone full-dimensional",
        "active_directions": C[active].tolist(),
        "active_rank": rank,
        "min_inactive_gap": inactive_min,
        "tol_active": tol,
    }
    if rank == K.dim:
        return {"verdict": YES, **evidence}
    if inactive_min >= 10 * tol:
        return {"verdict": NO, **evidence}
    return {"verdict": INCONCLUSIVE, **evidence}


def isolated_extreme(K: ConvexBody, lam) -> dict:
    lam = np.asarray(lam, dtype=float)
    verdict, ev = K.isolated_at(lam)
    return {"verdict": verdict, **ev}


def outward_normal(K: ConvexBody, lam, directions=None) -> np.ndarray:
    """Unit outward normal at lam: grid argmin of the support gap, refined locally."""
    lam = np.asarray(lam, dtype=float)
    C = direction_grid(K.dim) if directions is None else directions
    gaps = support_gaps(K, lam, C)
    c0 = C[int(np.argmin(gaps))]
    if gaps.min() == 0.0:
        return c0
    if K.dim == 2:
        a0 = math.atan2(c0[1], c0[0])
        step = 2 * np.pi / len(C)
        f = lambda a: float(K.support(np.array([math.cos(a), math.sin(a)]))[0]
                            - (math.cos(a) * lam[0] + math.sin(a) * lam[1]))
        res = optimize.minimize_scalar(f, bounds=(a0 - step, a0 + step), method="bounded",
                                       options={"xatol": 1e-15})
        return np.array([math.cos(res.x), math.sin(res.x)])

    def f(z):
        c = z / np.linalg.norm(z)
        return float(K.support(c)[0] - c @ lam)
    res = optimize.minimize(f, c0, method="Nelder-Mead", options={"xatol": 1e-14, "fatol": 1e-16})
    return res.x / np.linalg.norm(res.x)


def _tangent_frame(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of u, as rows."""
    g = u.size
    _, _, Vh = np.linalg.svd(u[None, :])
    return Vh[1:]


def ball_boundary_samples(lam, u, r: float, n_tangent: int = 72, n_uniform: int = 720,
                          n_geometric: int = 1600) -> np.ndarray:
    """Points of the sphere of radius r tangent to the body at lam (inward normal -u).

    Parametrized from the touching point to avoid cancellation:
    lam + r(-u (1 - cos t) + w sin t), dense geometrically near t = 0.
    """
    lam = np.asarray(lam, dtype=float)
    frame = _tangent_frame(u)
    g = u.size
    if g == 2:
        W = np.vstack([frame[0], -frame[0]])
    else:
        sub = direction_grid(g - 1, n2d=n_tangent, nsphere=n_tangent)
        W = sub @ frame
    theta = np.concatenate([np.linspace(0, np.pi, n_uniform + 1)[1:],
                            np.pi * 2.0 ** (-np.arange(1, n_geometric + 1) / 4)])
    one_minus_cos = 2 * np.sin(theta / 2) ** 2
    sin = np.sin(theta)
    pts = (lam[None, None, :] + r * (-u[None, None, :] * one_minus_cos[None, :, None]
                                      + W[:, None, :] * sin[None, :, None]))
    return pts.reshape(-1, g)


def inscribed_ball_excluder(K: ConvexBody, lam, radii=None, normal=None, tol_active: float = 1e-13,
                            directions=None) -> dict:
    """Search for a closed ball inside K that touches lam.

    yes: a ball was certified (lam is then excluded from absolute extremality
    over the maximal matrix convex set); no: no grid radius passed.
    """
    lam = np.asarray(lam, dtype=float)
    C = direction_grid(K.dim) if directions is None else np.asarray(directions, dtype=float)
    gaps = support_gaps(K, lam, C)
    tol = tol_active * max(1.0, float(np.linalg.norm(lam)))
    active = gaps <= tol
    if active.any() and column_rank(C[active].T).rank >= 2:
        return {"verdict": NO, "reason": "several supporting directions at the point", "radii_tested": []}
    u = outward_normal(K, lam, C) if normal is None else np.asarray(normal, float) / np.linalg.norm(normal)
    if radii is None:
        # start from half the width of K along the normal
        half_width = 0.5 * float(K.support(u)[0] + K.support(-u)[0])
        radii = radius_grid(half_width, 24)
    tested = []
    for r in radii:
        pts = ball_boundary_samples(lam, u, float(r))
        ok = K.contains(pts)
        tested.append(float(r))
        if ok.all():
            return {"verdict": YES, "radius": float(r), "center": (lam - r * u).tolist(),
                    "normal": u.tolist(), "radii_tested": tested}
    return {"verdict": NO, "reason": "no grid radius passed", "normal": u.tolist(), "radii_tested": tested}


@dataclass
class ExtremePointReport:
    point: list
    isolated: str
    simplex_bounded: str
    inscribed_ball_excluded: str
    subquadratic_certified: str
    evidence: dict = field(default_factory=dict)

    def chain_consistent(self) -> bool:
        if self.isolated == YES and self.simplex_bounded != YES:
            return False
        if self.subquadratic_certified == YES and self.inscribed_ball_excluded == YES:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "flags": {
                "isolated": self.isolated,
                "simplex_bounded": self.simplex_bounded,
                "inscribed_ball_excluded": self.inscribed_ball_excluded,
                "subquadratic_certified": self.subquadratic_certified,
            },
            "chain_consistent": self.chain_consistent(),
            "evidence": self.evidence,
        }


def classify_point(K: ConvexBody, lam, direction=None) -> ExtremePointReport:
    lam = np.asarray(lam, dtype=float)
    u = outward_normal(K, lam) if direction is None else np.asarray(direction, dtype=float)
    try:
        iso = isolated_extreme(K, lam)
    except NotExtremeError as exc:
        iso = {"verdict": INCONCLUSIVE, "reason": str(exc)}
    sb = simplex_bounded(K, lam)
    ball = inscribed_ball_excluder(K, lam, normal=u)
    try:
        sq = subquadratic_certify(standard_position(K, lam, u))
    except GeometryError as exc:
        sq = {"verdict": INCONCLUSIVE, "reason": str(exc)}
    ev = {"isolated": iso, "simplex_bounded": sb, "inscribed_ball": ball, "subquadratic": sq,
          "supporting_direction": np.asarray(u).tolist()}
    return ExtremePointReport(lam.tolist(), iso["verdict"], sb["verdict"], ball["verdict"], sq["verdict"], ev)


# --- K_p closed forms -------------------------------------------------------

def _kp_delta(p: float, c: float) -> float:
    return (p * c) ** (p / (2 - p))


def disk_in_kp_radius(p: float, c: float, samples: int = 10_000) -> dict:
    """Radius c - (pc)^(p/(2-p)) of a disk centred at (0, c) inside K_p, with a sampled check."""
    if not 1 < p < 2:
        raise PreconditionError("need 1 < p < 2")
    if not c > 0:
        raise PreconditionError("need c > 0")
    delta = _kp_delta(p, c)
    if not (delta < c and 2 * c < 1):
        raise PreconditionError(f"c = {c} is not small enough: need (pc)^(p/(2-p)) < c and 2c < 1")
    r = c - delta
    phi = 2 * np.pi * np.arange(samples) / samples
    x = r * np.cos(phi)
    y = c + r * np.sin(phi)
    lower = y - np.abs(x) ** p
    upper = 1 - y
    fgap = y ** (2 / p) + (y - c) ** 2 - r ** 2
    min_margin = float(min(lower.min(), upper.min()))
    return {
        "p": p, "c": c, "r": r, "delta": delta, "samples": samples,
        "min_margin": min_margin, "min_lower_margin": float(lower.min()),
        "min_f_gap": float(fgap.min()),
        "passed": bool(min_margin >= -1e-12),
    }


def scalability_lower_bound(p: float, c: float) -> dict:
    """Lower bound on a scaling constant M from the disks inside K_p.

    Closed form c^2 / (2 (pc)^(p/(2-p))), checked against a bisection for
    the threshold of M >= sqrt((M - c)^2 + r^2) + r in extended precision.
    """
    if not 4 / 3 < p < 2:
        raise PreconditionError("need 4/3 < p < 2")
    disk = disk_in_kp_radius(p, c, samples=16)
    if _kp_delta(p, c) == 0.0:
        raise PreconditionError(f"(pc)^(p/(2-p)) underflows for p = {p}, c = {c}; the bound exceeds double range")
    closed = c * c / (2 * _kp_delta(p, c))

    # c - r = (pc)^(p/(2-p)) is far below c for p near 2, so the threshold of
    # the unsquared inequality is solved with enough digits to resolve it
    digits = 40 + 2 * int(math.ceil(-math.log10(_kp_delta(p, c))))
    with mpmath.workdps(digits):
        P, C = mpmath.mpf(p), mpmath.mpf(c)
        R = C - (P * C) ** (P / (2 - P))

        def original(M):
            return M - mpmath.sqrt((M - C) ** 2 + R * R) - R

        lo = C
        hi = 2 * lo
        while original(hi) <= 0:
            lo, hi = hi, 2 * hi
        for _ in range(400):
            mid = (lo + hi) / 2
            if original(mid) > 0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= hi * mpmath.mpf(10) ** -45:
                break
        M_star = (lo + hi) / 2
        rel = float(abs(M_star - closed) / closed)
        above = bool(original(M_star * (1 + mpmath.mpf("1e-3"))) > 0)
        below = bool(original(M_star * (1 - mpmath.mpf("1e-3"))) < 0)
    return {
        "p": p, "c": c, "r": disk["r"], "M_bound": closed, "M_threshold": float(M_star), "rel_diff": rel,
        "holds_above": above,
        "fails_below": below,
        "agrees": bool(rel <= 1e-9),
    }
