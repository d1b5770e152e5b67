"""Contour, 3-sphere surface and anchored ball-volume quadrature.

All rules are fixed tensor-product rules with deterministic node order.
Integrands are vectorised callables mapping point arrays ``(N, 4)`` to value
arrays ``(N, dim)``; they are evaluated in chunks (optionally on a thread pool
capped by ``SLICEKIT_THREADS``) and reduced in chunk order so results are
reproducible bit for bit.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import H, Quaternion, clifford
from .diffeo import DiffeoMap
from .errors import ContractError, DomainError, EvaluationError

CHUNK = 1 << 15


def worker_count() -> int:
    cpus = os.cpu_count() or 1
    env = os.environ.get("SLICEKIT_THREADS")
    if env:
        try:
            return max(1, min(int(env), cpus))
        except ValueError:
            pass
    return 1


def weighted_sum(integrand: Callable, points, weights, chunk=CHUNK):
    """sum_k integrand(points[k]) * weights[k] with fixed chunk order.

    ``weights`` may be real ``(N,)``; the integrand output is ``(N, dim)``.
    Raises ``EvaluationError`` naming the first node with a non-finite value.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    N = points.shape[0]
    starts = list(range(0, N, chunk))

    def part(s):
        vals = np.asarray(integrand(points[s : s + chunk]), dtype=float)
        bad = ~np.all(np.isfinite(vals), axis=-1)
        if np.any(bad):
            idx = s + int(np.argmax(bad))
            raise EvaluationError(f"non-finite integrand value at node {idx}", index=idx)
        return np.einsum("k,kd->d", weights[s : s + chunk], vals)

    workers = worker_count()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(part, starts))
    else:
        parts = [part(s) for s in starts]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


# -- domains ------------------------------------------------------------------


@dataclass(frozen=True)
class BallDomain:
    """Open 4-ball whose closure stays away from the real axis."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.asarray(self.center, dtype=float).ravel())
        if len(c) != 4:
            raise ContractError("ball centre must be a quaternion")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ContractError("radius must be positive")
        if math.hypot(*c[1:]) - self.radius <= 0:
            raise ContractError("ball closure meets the real axis")

    @property
    def c(self):
        return np.array(self.center)

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return np.sum((p - self.c) ** 2, axis=-1) < self.radius ** 2

    def radial(self, anchor, m):
        """Distance from ``anchor`` to the sphere along unit directions ``m``."""
        d = np.asarray(anchor, dtype=float) - self.c
        b = m @ d
        disc = b * b - (d @ d - self.radius ** 2)
        return -b + np.sqrt(disc)

    def volume(self):
        return math.pi ** 2 * self.radius ** 4 / 2


@dataclass(frozen=True)
class ImageRegion:
    """a(ball): the image of a ball in x-space under a structural map."""

    a: DiffeoMap
    ball: BallDomain

    def contains(self, z):
        z = np.asarray(z, dtype=float)
        ok = self.a.in_codomain(z)
        with np.errstate(all="ignore"):
            x = self.a.apply_inverse(np.where(ok[..., None], z, self.a.apply(self.ball.c)))
        return ok & self.ball.contains(x)

    def radial(self, anchor, m, iters=60):
        """Boundary distance along rays by bisection (region assumed star-shaped)."""
        anchor = np.asarray(anchor, dtype=float)
        if not self.contains(anchor):
            raise ContractError("anchor must lie inside the region")
        surf = SurfaceRule.sphere(self.ball, (12, 12, 12))
        reach = np.max(np.linalg.norm(self.a.apply(surf.points) - anchor, axis=-1))
        lo = np.zeros(m.shape[0])
        hi = np.full(m.shape[0], 1.5 * reach + 1e-9)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            inside = self.contains(anchor + mid[:, None] * m)
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)


# -- contour rule -------------------------------------------------------------


@dataclass(frozen=True)
class ContourRule:
    """Circle u0 + I v0 + radius * exp(I theta) in the slice C_I, N trapezoid nodes."""

    axis: tuple
    center: tuple
    radius: float
    nodes: int = 256

    def __post_init__(self):
        ax = tuple(float(v) for v in np.asarray(self.axis, dtype=float).ravel())
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if abs(math.sqrt(sum(v * v for v in ax)) - 1.0) > 1e-12:
            raise ContractError("slice axis must be a unit vector")
        if self.nodes < 8:
            raise ContractError("contour rule needs at least 8 nodes")
        if not self.radius > 0:
            raise ContractError("radius must be positive")

    @property
    def n(self):
        return len(self.axis)

    def _complex_nodes(self):
        th = 2 * np.pi * np.arange(self.nodes) / self.nodes
        rel = self.radius * np.exp(1j * th)
        return complex(*self.center) + rel, rel

    def _embed(self, z):
        I = np.array(self.axis)
        return np.concatenate([z.real[:, None], z.imag[:, None] * I], axis=-1)

    def points(self):
        z, _ = self._complex_nodes()
        return self._embed(z)

    def ds(self):
        """ds_I = ds / I = (s - centre) d theta, as paravector arrays."""
        _, rel = self._complex_nodes()
        return self._embed(rel * (2 * np.pi / self.nodes))


def contour_integrate(rule: ContourRule, integrand: Callable, algebra=None):
    """Trapezoidal value of the contour integral of ``integrand`` against ds_I.

    ``integrand(s)`` returns either an array ``h`` (giving the integral of
    h(s) ds_I) or a pair ``(L, R)`` (giving the integral of L(s) ds_I R(s)).
    """
    alg = algebra if algebra is not None else (H if rule.n == 3 else clifford(rule.n))
    pts = rule.points()
    ds = alg.embed(rule.ds())
    out = integrand(pts)
    if isinstance(out, tuple):
        L, R = (np.asarray(o, dtype=float) for o in out)
        vals = alg.mul(alg.mul(L, ds), R)
    else:
        vals = alg.mul(np.asarray(out, dtype=float), ds)
    bad = ~np.all(np.isfinite(vals), axis=-1)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise EvaluationError(f"non-finite integrand value at contour node {idx}", index=idx)
    total = vals[0].copy()
    for v in vals[1:]:
        total += v
    return total


# -- sphere rules -------------------------------------------------------------


@lru_cache(maxsize=16)
def sphere_nodes(n1: int, n2: int, n3: int):
    """Unit S^3 nodes and area weights (sum 2 pi^2).

    m = (cos t1, sin t1 cos t2, sin t1 sin t2 cos p, sin t1 sin t2 sin p) with
    dS = sin^2 t1 sin t2 dt1 dt2 dp; Gauss-Legendre in t1, t2, trapezoid in p.
    """
    if min(n1, n2, n3) < 1:
        raise ContractError("sphere rule needs positive node counts")
    x1, w1 = np.polynomial.legendre.leggauss(n1)
    x2, w2 = np.polynomial.legendre.leggauss(n2)
    t1 = 0.5 * np.pi * (x1 + 1)
    t2 = 0.5 * np.pi * (x2 + 1)
    w1 = 0.5 * np.pi * w1 * np.sin(t1) ** 2
    w2 = 0.5 * np.pi * w2 * np.sin(t2)
    p = 2 * np.pi * (np.arange(n3) + 0.5) / n3
    w3 = np.full(n3, 2 * np.pi / n3)
    T1, T2, P = np.meshgrid(t1, t2, p, indexing="ij")
    m = np.stack(
        [
            np.cos(T1),
            np.sin(T1) * np.cos(T2),
            np.sin(T1) * np.sin(T2) * np.cos(P),
            np.sin(T1) * np.sin(T2) * np.sin(P),
        ],
        axis=-1,
    ).reshape(-1, 4)
    w = (w1[:, None, None] * w2[None, :, None] * w3[None, None, :]).ravel()
    m.setflags(write=False)
    w.setflags(write=False)
    return m, w


def _triple(nodes):
    if isinstance(nodes, int):
        return (nodes, nodes, nodes)
    t = tuple(int(v) for v in nodes)
    if len(t) != 3:
        raise ContractError("angular node counts must be an int or a triple")
    return t


@dataclass(frozen=True, eq=False)
class SurfaceRule:
    """Quadrature on a closed hypersurface: points, unit outward normals, area weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    angular: tuple = (32, 32, 32)

    @classmethod
    def sphere(cls, domain: BallDomain, nodes=(32, 32, 32)):
        nodes = _triple(nodes)
        m, w = sphere_nodes(*nodes)
        return cls(domain.c + domain.radius * m, m, domain.radius ** 3 * w, nodes)

    @property
    def size(self):
        return self.points.shape[0]

    def area(self):
        return float(np.sum(self.weights))


def surface_integrate(domain: BallDomain, rule: SurfaceRule | None, integrand: Callable):
    """Integral of integrand(tau, normal) dS over the sphere bounding ``domain``.

    If ``rule`` is None the default 32^3 rule on the sphere is used; a rule
    produced by ``push_forward_surface`` integrates over the image surface.
    """
    rule = rule if rule is not None else SurfaceRule.sphere(domain)
    both = np.concatenate([rule.points, rule.normals], axis=-1)
    val = weighted_sum(lambda pn: integrand(pn[:, :4], pn[:, 4:]), both, rule.weights)
    return Quaternion.from_array(val) if val.shape == (4,) else val


def push_forward_surface(a: DiffeoMap, domain: BallDomain, rule: SurfaceRule | None = None) -> SurfaceRule:
    """Image surface a(dOmega): mapped nodes, cofactor normals and scaled areas.

    The area-weighted normal transforms as det(J) J^-T n dS with J = diag(1, Ja).
    """
    rule = rule if rule is not None else SurfaceRule.sphere(domain)
    a.check_domain(rule.points)
    y = a.apply(rule.points)
    if np.any(np.sum(y[:, 1:] ** 2, axis=-1) == 0):
        raise DomainError("image surface touches the real axis")
    if not np.all(a.in_codomain(y)):
        raise DomainError("image surface leaves the codomain of the map")
    Jinv = a.inv_jacobian(y[:, 1:])
    det = 1.0 / np.linalg.det(Jinv)
    N = np.empty_like(rule.normals)
    N[:, 0] = rule.normals[:, 0]
    N[:, 1:] = np.einsum("kji,kj->ki", Jinv, rule.normals[:, 1:])
    N *= (np.abs(det) * rule.weights)[:, None]
    area = np.linalg.norm(N, axis=-1)
    return SurfaceRule(y, N / area[:, None], area, rule.angular)


# -- volume rules -------------------------------------------------------------


@dataclass(frozen=True)
class VolumeRule:
    """Anchored hyperspherical rule: angular S^3 grid times Gauss-Legendre radial nodes.

    For singular integrands the region is split into a round ball of radius
    ``inner_fraction * min rho(m)`` about the anchor and the remaining shell;
    the shell uses a logarithmic radial substitution.
    """

    angular: tuple = (32, 32, 32)
    radial: int = 24
    inner_fraction: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "angular", _triple(self.angular))
        if self.radial < 1:
            raise ContractError("radial node count must be positive")
        if not 0 < self.inner_fraction < 1:
            raise ContractError("inner_fraction must lie in (0, 1)")

    def refined(self, factor=2):
        return VolumeRule(tuple(factor * v for v in self.angular), factor * self.radial, self.inner_fraction)

    def coarsened(self, factor=2):
        return VolumeRule(tuple(max(1, v // factor) for v in self.angular), max(1, self.radial // factor), self.inner_fraction)


def volume_nodes(region, anchor, rule: VolumeRule, singular=True):
    """Nodes ``(N, 4)`` and weights ``(N,)`` for the integral over ``region``.

    ``region`` provides ``radial(anchor, m)``.  With ``singular`` the inner
    ball about the anchor is integrated separately (symmetric principal-value
    treatment for kernels with a zero-mean r^-4 singularity).
    """
    anchor = np.asarray(anchor, dtype=float)
    m, wa = sphere_nodes(*rule.angular)
    rho = region.radial(anchor, m)
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
        raise ContractError("anchor must lie strictly inside the region")
    xg, wg = np.polynomial.legendre.leggauss(rule.radial)
    t = 0.5 * (xg + 1)
    wt = 0.5 * wg
    pts, wts = [], []
    if singular:
        r_in = rule.inner_fraction * float(np.min(rho))
        r = r_in * t
        wr = r_in * wt * r ** 3
        pts.append(anchor + r[:, None, None] * m[None, :, :])
        wts.append(wr[:, None] * wa[None, :])
        # shell r in [r_in, rho(m)] with r = r_in (rho / r_in)^t
        L = np.log(rho / r_in)
        R = r_in * np.exp(t[:, None] * L[None, :])
        W = wt[:, None] * R ** 4 * L[None, :] * wa[None, :]
        pts.append(anchor + R[:, :, None] * m[None, :, :])
        wts.append(W)
    else:
        R = t[:, None] * rho[None, :]
        W = wt[:, None] * rho[None, :] * R ** 3 * wa[None, :]
        pts.append(anchor + R[:, :, None] * m[None, :, :])
        wts.append(W)
    P = np.concatenate([p.reshape(-1, 4) for p in pts])
    Wt = np.concatenate([w.ravel() for w in wts])
    return P, Wt


def volume_integrate(region, anchor, rule: VolumeRule, integrand: Callable, singular=True):
    P, W = volume_nodes(region, anchor, rule, singular)
    return weighted_sum(integrand, P, W)


def volume_integrate_singular(domain: BallDomain, anchor, rule: VolumeRule | None, integrand: Callable):
    """4-volume integral of ``integrand`` over the ball with nodes anchored at ``anchor``.

    The r^3 Jacobian of hyperspherical coordinates absorbs singularities up to
    order r^-3 at the anchor.
    """
    rule = rule if rule is not None else VolumeRule()
    anchor = np.asarray(anchor, dtype=float)
    d = np.linalg.norm(anchor - domain.c)
    if d >= domain.radius * (1 - 1e-12):
        raise ContractError("anchor must lie strictly inside the domain")
    val = volume_integrate(domain, anchor, rule, integrand, singular=False)
    return Quaternion.from_array(val) if val.shape == (4,) else val


def singular_convergence(domain: BallDomain, anchor, integrand: Callable, rules=None, rtol=1e-6):
    """Integrate on successive rules and report whether the values settle.

    Returns ``(values, converged)``; ``converged`` is False when successive
    differences fail to shrink (e.g. for a non-integrable r^-4 singularity).
    """
    if rules is None:
        rules = [VolumeRule((8, 8, 8), r) for r in (8, 16, 32, 64)]
    vals = [np.asarray(volume_integrate_singular(domain, anchor, r, integrand)) for r in rules]
    diffs = [float(np.linalg.norm(b - a)) for a, b in zip(vals, vals[1:])]
    scale = max(1.0, float(np.linalg.norm(vals[-1])))
    converged = diffs[-1] <= rtol * scale or (len(diffs) > 1 and diffs[-1] <= 0.5 * diffs[-2] and diffs[-1] <= 1e-3 * scale)
    return vals, bool(converged)
