"""Shadowing-built conjugacies.

Two constructions live here.

1. The angle-doubling solid-torus map f(t, z) = (2t, lam_c z + c_off
   e^{2 pi i t}) contracts each disk fiber into the next, and its
   attractor is a dyadic solenoid.  A backward chain of exact rational
   angles determines the attractor point as a geometric series in lam_c
   evaluated at those angles, so the chart converges at machine
   precision with no error amplification: the angles are exact at every
   depth, only the tail of the series is truncated.

2. A perturbed hyperbolic toral map g = A + p is conjugated to its
   linear part by h = id + u with h(Ax) = g(h(x)).  Splitting u into
   expanding/contracting components in adapted coordinates turns the
   functional equation into one backward and one forward geometric
   recursion along the A-orbit of the query point; Picard iteration over
   a finite orbit window solves the coupled system.  Orbits of A are
   kept as exact rationals reduced mod 1, because floating the orbit
   first would amplify roundoff by mu^J.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .linalg import HyperbolicSplitting, IntMatrix, TorusPoint, splitting
from .solenoid import SolenoidPoint, chain_distance_upper, shift

__all__ = [
    "SmaleSystem",
    "smale_step",
    "smale_tangent",
    "solenoid_to_attractor",
    "attractor_to_angles",
    "smale_conjugacy_report",
    "PerturbedToral",
    "default_perturbation",
    "PicardDivergenceError",
    "linearize_at",
    "linearization_residual",
    "perturbed_anosov_conjugacy",
    "perturbed_conjugacy_report",
    "ConjugacyMap",
    "verify_conjugacy",
]


# ---------------------------------------------------------------------------
# Solid-torus attractor


@dataclass(frozen=True)
class SmaleSystem:
    """Solid-torus map (t, z) -> (2t mod 1, lam_c z + c_off e^{2 pi i t}).

    lam_c < 1/2 keeps the two image disks of each fiber disjoint, and
    lam_c + c_off <= 1 keeps the image inside the solid torus.
    """

    lam_c: float = 0.25
    c_off: float = 0.5

    def __post_init__(self):
        if not (0 < self.lam_c < 0.5):
            raise ValueError("fiber contraction must lie in (0, 1/2)")
        if self.lam_c + self.c_off > 1.0:
            raise ValueError("image must stay inside the solid torus")

    def _check_domain(self, z: complex) -> None:
        if abs(z) > 1.0 + 1e-9:
            raise ValueError(f"point with |z| = {abs(z):.6f} lies outside "
                             "the solid torus")

    def step(self, t: float, z: complex) -> tuple[float, complex]:
        self._check_domain(z)
        return (2.0 * t) % 1.0, self.lam_c * z + self.c_off * cmath.exp(2j * math.pi * t)

    def step_inv(self, t: float, z: complex) -> tuple[float, complex]:
        """Inverse on the attractor: of the two angle halvings, exactly one
        leaves a fiber residual of modulus <= lam_c."""
        self._check_domain(z)
        cands = []
        for s in ((t / 2.0) % 1.0, (t / 2.0 + 0.5) % 1.0):
            w = (z - self.c_off * cmath.exp(2j * math.pi * s)) / self.lam_c
            cands.append((abs(w), s, w))
        cands.sort(key=lambda item: item[0])
        return cands[0][1], cands[0][2]

    def jacobian_det(self) -> float:
        """Volume contraction per step: 2 from the angle, lam_c^2 from
        the planar fiber."""
        return 2.0 * self.lam_c ** 2

    def tangent(self, t: float, z: complex) -> np.ndarray:
        """Derivative in (t, Re z, Im z) coordinates."""
        self._check_domain(z)
        tp = 2.0 * math.pi * self.c_off
        return np.array([
            [2.0, 0.0, 0.0],
            [-tp * math.sin(2.0 * math.pi * t), self.lam_c, 0.0],
            [tp * math.cos(2.0 * math.pi * t), 0.0, self.lam_c],
        ])


def smale_step(system: SmaleSystem, t: float, z: complex) -> tuple[float, complex]:
    return system.step(t, z)


def smale_tangent(system: SmaleSystem, t: float, z: complex) -> np.ndarray:
    return system.tangent(t, z)


def solenoid_to_attractor(xi: SolenoidPoint, depth: int = 40,
                          system: SmaleSystem | None = None) -> tuple[float, complex]:
    """Chart a dyadic backward chain onto the solid-torus attractor.

    The image is (t_0, c_off * sum_{r>=1} lam_c^{r-1} e^{2 pi i t_r})
    where t_r is the exact rational angle at depth r.  Truncation error
    is below c_off * lam_c^depth / (1 - lam_c).
    """
    sysm = system or SmaleSystem()
    if xi.matrix.rows != ((2,),):
        raise ValueError("the attractor chart needs a chain for multiplication by 2")
    t0 = float(xi.coordinate(0).coords[0])
    z = 0.0 + 0.0j
    scale = sysm.c_off
    for r in range(1, depth + 1):
        tr = float(xi.coordinate(r).coords[0])
        z += scale * cmath.exp(2j * math.pi * tr)
        scale *= sysm.lam_c
    return t0, z


def attractor_to_angles(t: float, z: complex, depth: int,
                        system: SmaleSystem | None = None) -> list[float]:
    """Read a backward angle chain off an attractor point by iterating the
    branch-selecting inverse; entry r approximates the depth-r angle."""
    sysm = system or SmaleSystem()
    angles = [t % 1.0]
    cur_t, cur_z = t, z
    for _ in range(depth):
        cur_t, cur_z = sysm.step_inv(cur_t, cur_z)
        angles.append(cur_t)
    return angles


def smale_conjugacy_report(points: Sequence[SolenoidPoint], depth: int = 40,
                           system: SmaleSystem | None = None) -> dict:
    """Check the chart intertwines the chain shift with the torus map.

    For each chain xi the residual is the distance between the image of
    the shifted chain and the map applied to the image (angle leg on the
    circle, fiber leg in the plane).  Distinct chains must land on
    distinct points; the smallest image separation is reported.
    """
    sysm = system or SmaleSystem()
    distinct: list[SolenoidPoint] = []
    for xi in points:
        if not any(xi == seen for seen in distinct):
            distinct.append(xi)
    max_residual = 0.0
    images = []
    for xi in distinct:
        t, z = solenoid_to_attractor(xi, depth, sysm)
        ts, zs = solenoid_to_attractor(shift(xi), depth, sysm)
        ft, fz = sysm.step(t, z)
        dt = abs(ts - ft) % 1.0
        dt = min(dt, 1.0 - dt)
        max_residual = max(max_residual, dt + abs(fz - zs))
        images.append((t, z))
    min_sep = math.inf
    min_pair = None
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            dt = abs(images[i][0] - images[j][0]) % 1.0
            dt = min(dt, 1.0 - dt)
            sep = dt + abs(images[i][1] - images[j][1])
            if sep < min_sep:
                min_sep = sep
                min_pair = (i, j)
    source_sep = math.inf
    if min_pair is not None:
        source_sep = chain_distance_upper(distinct[min_pair[0]],
                                          distinct[min_pair[1]])
    return {
        "samples": len(points),
        "distinct": len(distinct),
        "depth": depth,
        "max_residual": max_residual,
        "min_image_separation": min_sep,
        "source_separation_at_min": source_sep,
        "tail_bound": sysm.c_off * sysm.lam_c ** depth / (1.0 - sysm.lam_c),
    }


# ---------------------------------------------------------------------------
# Perturbed hyperbolic toral maps


class PicardDivergenceError(RuntimeError):
    """The perturbation is too strong for the contraction argument."""


def default_perturbation(eps: float) -> Callable[[np.ndarray], np.ndarray]:
    """p(x) = (eps sin(2 pi x_2) / (2 pi), 0, ..., 0): 1-periodic with
    supremum and Lipschitz constant both proportional to eps."""
    def p(x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=float)
        out[0] = eps * math.sin(2.0 * math.pi * x[1]) / (2.0 * math.pi)
        return out
    return p


@dataclass(frozen=True)
class PerturbedToral:
    """g = A + p on the torus, with p 1-periodic and small."""

    matrix: IntMatrix
    p: Callable[[np.ndarray], np.ndarray]
    p_sup: float
    p_lip: float

    def step(self, x: np.ndarray) -> np.ndarray:
        return (self.matrix.numpy() @ x + self.p(x)) % 1.0

    def splitting(self) -> HyperbolicSplitting:
        return splitting(self.matrix)

    def contraction_factor(self) -> float:
        """Picard contraction estimate: Lip(p) times the summed series
        weights of the two geometric recursions, measured after the
        change to adapted coordinates."""
        sp = self.splitting()
        basis_cond = float(np.linalg.norm(sp._to_adapted, 2)
                           * np.linalg.norm(sp._from_adapted, 2))
        series = 1.0 / (sp.mu - 1.0)
        if sp.dim_minus:
            series += 1.0 / (1.0 - sp.lam)
        return self.p_lip * series * basis_cond


def _orbit_window(matrix: IntMatrix, x: Sequence[Fraction], J: int) -> list[np.ndarray]:
    """A-orbit of x over -J..J, reduced mod 1 exactly before floating."""
    fwd = [tuple(Fraction(c) % 1 for c in x)]
    for _ in range(J):
        fwd.append(tuple(c % 1 for c in matrix.apply(fwd[-1])))
    bwd = []
    cur = fwd[0]
    for _ in range(J):
        cur = tuple(c % 1 for c in matrix.apply_inv(cur))
        bwd.append(cur)
    window = list(reversed(bwd)) + fwd
    return [np.array([float(c) for c in pt]) for pt in window]


def linearize_at(system: PerturbedToral, x: Sequence[Fraction], J: int = 60,
                 tol: float = 1e-14, max_sweeps: int = 400) -> dict:
    """Value of the conjugacy h = id + u at a rational torus point.

    The correction u solves u(Ax) - A u(x) = p(h(x)).  In adapted
    coordinates this decouples into a backward recursion for the
    expanding component and a forward recursion for the contracting
    component along the A-orbit window, with zero boundary data;
    truncation enters only through factors mu^-J and lam^J.  Sweeps
    repeat until the update is below ``tol``; a contraction factor near
    or above 1 raises PicardDivergenceError instead of looping.
    """
    factor = system.contraction_factor()
    if factor >= 0.95:
        raise PicardDivergenceError(
            f"perturbation too strong: contraction estimate {factor:.3f} >= "
            f"0.95; the perturbation's Lipschitz constant must shrink by a "
            f"factor of at least {factor / 0.95:.2f}")
    sp = system.splitting()
    bp, bm = sp.adapted_blocks()
    dp = sp.dim_plus
    pts = _orbit_window(system.matrix, x, J)
    n = len(pts)
    k = system.matrix.k
    U = np.zeros((n, k))

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        h_vals = [pts[m] + sp.from_adapted(U[m]) for m in range(n)]
        P = np.array([sp.to_adapted(system.p(h_vals[m])) for m in range(n)])
        new = np.zeros_like(U)
        for m in range(n - 2, -1, -1):
            new[m, :dp] = np.linalg.solve(bp, new[m + 1, :dp] - P[m, :dp])
        if k - dp:
            for m in range(1, n):
                new[m, dp:] = bm @ new[m - 1, dp:] + P[m - 1, dp:]
        change = float(np.max(np.abs(new - U)))
        U = new
        if change < tol:
            break
    else:
        raise PicardDivergenceError(
            f"no convergence in {max_sweeps} sweeps (last update {change:.2e})")

    c = J
    u_adapted = U[c]
    return {
        "x": [float(v) for v in pts[c]],
        "h": (pts[c] + sp.from_adapted(u_adapted)).tolist(),
        "u_adapted": u_adapted.tolist(),
        "u_adapted_norm": float(np.linalg.norm(u_adapted)),
        "sweeps": sweeps,
        "contraction_estimate": factor,
    }


def _torus_gap(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return float(np.linalg.norm(np.minimum(d, 1.0 - d)))


def linearization_residual(system: PerturbedToral, x: Sequence[Fraction],
                           J: int = 60) -> float:
    """Distance on the torus between h(Ax) and g(h(x))."""
    xf = tuple(Fraction(c) for c in x)
    ax = tuple(c % 1 for c in system.matrix.apply(xf))
    h_x = np.array(linearize_at(system, xf, J)["h"])
    h_ax = np.array(linearize_at(system, ax, J)["h"])
    return _torus_gap(h_ax % 1.0, system.step(h_x))


def perturbed_anosov_conjugacy(system: PerturbedToral, x: TorusPoint,
                               J: int = 60, tol: float = 1e-14) -> TorusPoint:
    """The conjugacy point h(x) as a torus point (coordinates are the
    binary floats of the evaluation, reduced mod 1)."""
    info = linearize_at(system, x.coords, J, tol)
    return TorusPoint(tuple(Fraction(v) for v in info["h"]))


def perturbed_conjugacy_report(system: PerturbedToral, samples: int,
                               seed: int = 0, J: int = 60,
                               max_den: int = 512) -> dict:
    """Residual and size statistics for h over random rational points.

    Also reports the existence bound for the correction in the adapted
    norm: sup|p| (adapted) times the summed series weights.
    """
    rng = np.random.default_rng(seed)
    sp = system.splitting()
    series = 1.0 / (sp.mu - 1.0)
    if sp.dim_minus:
        series += 1.0 / (1.0 - sp.lam)
    p_sup_adapted = system.p_sup * float(np.linalg.norm(sp._to_adapted, 2))

    max_res = 0.0
    max_u = 0.0
    max_sweeps = 0
    k = system.matrix.k
    for _ in range(samples):
        den = int(rng.integers(2, max_den))
        x = tuple(Fraction(int(rng.integers(0, den)), den) for _ in range(k))
        info = linearize_at(system, x, J)
        max_u = max(max_u, info["u_adapted_norm"])
        max_sweeps = max(max_sweeps, info["sweeps"])
        max_res = max(max_res, linearization_residual(system, x, J))
    return {
        "samples": samples,
        "window": J,
        "max_residual": max_res,
        "max_u_adapted": max_u,
        "u_existence_bound": p_sup_adapted * series,
        "max_sweeps": max_sweeps,
        "contraction_estimate": system.contraction_factor(),
    }


# ---------------------------------------------------------------------------
# Uniform verification surface


@dataclass(frozen=True)
class ConjugacyMap:
    """Descriptor of one of the two built conjugacies, with its evaluation
    depth (chart depth for the solid torus, orbit window for the toral
    linearization) and the tolerance its residual must meet."""

    kind: str
    depth: int
    tolerance: float
    smale: SmaleSystem | None = None
    perturbed: PerturbedToral | None = None

    def __post_init__(self):
        if self.kind not in ("solid-torus", "linear-model"):
            raise ValueError("kind must be 'solid-torus' or 'linear-model'")
        if self.kind == "solid-torus" and self.smale is None:
            object.__setattr__(self, "smale", SmaleSystem())
        if self.kind == "linear-model" and self.perturbed is None:
            raise ValueError("linear-model conjugacy needs a perturbed system")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")


def verify_conjugacy(cmap: ConjugacyMap, samples: int = 200,
                     seed: int = 0) -> dict:
    """Residual report for the intertwining relation of a built conjugacy,
    flagged against the map's declared tolerance."""
    import random as _random

    from .solenoid import random_point

    if cmap.kind == "solid-torus":
        rng = _random.Random(seed)
        two = IntMatrix(((2,),))
        pts = [random_point(two, rng, max_period=3, max_den=12)
               for _ in range(samples)]
        rep = smale_conjugacy_report(pts, cmap.depth, cmap.smale)
    else:
        rep = perturbed_conjugacy_report(cmap.perturbed, samples, seed,
                                         J=cmap.depth)
    rep = dict(rep)
    rep["kind"] = cmap.kind
    rep["tolerance"] = cmap.tolerance
    rep["within_tolerance"] = rep["max_residual"] <= cmap.tolerance
    return rep
