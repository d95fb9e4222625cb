"""Covering spaces of the inverse limit and their deck translations.

The first cover pairs a zero-fiber point (zeroth coordinate [0]) with a
free rational vector; projection applies the translation flow, and the
lifted dynamics multiplies the vector by the matrix.  Its deck group is
the integer lattice embedded by ``alpha``.  The second cover is the
increasing union of copies of the first along the lifted dynamics; its
deck group grows to the direct limit Z^k[A^{-1}].  Every operation stays
inside exact rational arithmetic, so the structural identities relating
the shifts, projections, and deck translations can be checked on samples
with no tolerance at all.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .linalg import IntMatrix, LimitElement, format_rational, limit_add, limit_tau, parse_rational
from . import solenoid
from .solenoid import SolenoidPoint, identity_point, random_point

__all__ = [
    "CoverPoint",
    "TildeCoverPoint",
    "alpha",
    "sigma_bar",
    "q_bar",
    "cover_add",
    "cover_neg",
    "alpha_tilde",
    "sigma_tilde",
    "sigma_tilde_inv",
    "q_tilde",
    "tilde_add",
    "verify_cover_identities",
]


@dataclass(frozen=True)
class CoverPoint:
    """Point of the product cover: (zero-fiber point, free vector)."""

    fiber: SolenoidPoint
    v: tuple[Fraction, ...]

    def __init__(self, fiber: SolenoidPoint, v: Sequence[Fraction | int | str]):
        vv = tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in v)
        if len(vv) != fiber.k:
            raise ValueError("dimension mismatch")
        if not fiber.p0().is_zero():
            raise ValueError("fiber component must project to the zero coordinate")
        object.__setattr__(self, "fiber", fiber)
        object.__setattr__(self, "v", vv)

    @property
    def matrix(self) -> IntMatrix:
        return self.fiber.matrix

    def to_json(self) -> dict:
        return {"fiber": self.fiber.to_json(), "v": [format_rational(c) for c in self.v]}


def identity_cover(matrix: IntMatrix) -> CoverPoint:
    return CoverPoint(identity_point(matrix), [Fraction(0)] * matrix.k)


def alpha(matrix: IntMatrix, n: Sequence[int]) -> CoverPoint:
    """Deck translation embedding of the integer lattice: the fiber is the
    identity dragged by -n, the vector remembers n."""
    nn = [int(x) for x in n]
    fiber = solenoid.act([-x for x in nn], identity_point(matrix))
    return CoverPoint(fiber, [Fraction(x) for x in nn])


def sigma_bar(x: CoverPoint) -> CoverPoint:
    """Lifted shift: shift the fiber, multiply the vector by the matrix."""
    return CoverPoint(solenoid.shift(x.fiber), list(x.matrix.apply(x.v)))


def sigma_bar_inv(x: CoverPoint) -> CoverPoint:
    if not x.fiber.coordinate(1).is_zero():
        raise ValueError("point is not in the image of the lifted shift")
    return CoverPoint(solenoid.unshift(x.fiber), list(x.matrix.apply_inv(x.v)))


def q_bar(x: CoverPoint) -> SolenoidPoint:
    """Covering projection: apply the translation flow to the fiber."""
    return solenoid.act(x.v, x.fiber)


def cover_add(x: CoverPoint, y: CoverPoint) -> CoverPoint:
    return CoverPoint(solenoid.add(x.fiber, y.fiber),
                      [a + b for a, b in zip(x.v, y.v)])


def cover_neg(x: CoverPoint) -> CoverPoint:
    return CoverPoint(solenoid.neg(x.fiber), [-a for a in x.v])


class TildeCoverPoint:
    """Class [(cover point, level)] in the increasing union of covers.

    (s, m) is identified with (sigma_bar(s), m+1); the canonical
    representative has minimal level, reached by inverting the lifted
    shift while the fiber's depth-1 coordinate is zero.
    """

    __slots__ = ("rep", "level")

    rep: CoverPoint
    level: int

    def __init__(self, rep: CoverPoint, level: int):
        if level < 0:
            raise ValueError("level must be nonnegative")
        while level > 0 and rep.fiber.coordinate(1).is_zero():
            rep = sigma_bar_inv(rep)
            level -= 1
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "level", level)

    def __setattr__(self, *a):
        raise AttributeError("TildeCoverPoint is immutable")

    @property
    def matrix(self) -> IntMatrix:
        return self.rep.matrix

    def at_level(self, level: int) -> CoverPoint:
        if level < self.level:
            raise ValueError("cannot represent below the canonical level")
        rep = self.rep
        for _ in range(level - self.level):
            rep = sigma_bar(rep)
        return rep

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TildeCoverPoint):
            return NotImplemented
        return (self.level == other.level and self.rep.v == other.rep.v
                and self.rep.fiber == other.rep.fiber)

    def __hash__(self) -> int:
        return hash((self.level, self.rep.v))

    def to_json(self) -> dict:
        return {"rep": self.rep.to_json(), "level": self.level}


def identity_tilde(matrix: IntMatrix) -> TildeCoverPoint:
    return TildeCoverPoint(identity_cover(matrix), 0)


def alpha_tilde(g: LimitElement) -> TildeCoverPoint:
    """Deck embedding of the direct limit: level-m class of alpha(vec)."""
    return TildeCoverPoint(alpha(g.matrix, list(g.vec)), g.level)


def sigma_tilde(x: TildeCoverPoint) -> TildeCoverPoint:
    """Induced shift: acts as sigma_bar on any representative, equivalently
    drops one level."""
    return TildeCoverPoint(sigma_bar(x.rep), x.level)


def sigma_tilde_inv(x: TildeCoverPoint) -> TildeCoverPoint:
    return TildeCoverPoint(x.rep, x.level + 1)


def q_tilde(x: TildeCoverPoint) -> SolenoidPoint:
    """Covering projection: project the representative, then undo its level
    with inverse shifts."""
    pt = q_bar(x.rep)
    for _ in range(x.level):
        pt = solenoid.unshift(pt)
    return pt


def tilde_add(x: TildeCoverPoint, y: TildeCoverPoint) -> TildeCoverPoint:
    lvl = max(x.level, y.level)
    return TildeCoverPoint(cover_add(x.at_level(lvl), y.at_level(lvl)), lvl)


def tilde_neg(x: TildeCoverPoint) -> TildeCoverPoint:
    return TildeCoverPoint(cover_neg(x.rep), x.level)


# ---------------------------------------------------------------------------
# Identity battery


def _sigma_fiber_sample(matrix: IntMatrix, rng: random.Random) -> SolenoidPoint:
    pt = random_point(matrix, rng, max_period=3, max_den=8)
    drop = [-c for c in pt.p0().coords]
    return solenoid.act(drop, pt)  # zeroth coordinate becomes [0]


def _random_cover(matrix: IntMatrix, rng: random.Random) -> CoverPoint:
    fiber = _sigma_fiber_sample(matrix, rng)
    v = [Fraction(rng.randint(-12, 12), rng.randint(1, 6)) for _ in range(matrix.k)]
    return CoverPoint(fiber, v)


def verify_cover_identities(
    matrix: IntMatrix,
    samples: int = 25,
    seed: int = 0,
    sigma_bar_fn: Callable[[CoverPoint], CoverPoint] | None = None,
) -> list[dict]:
    """Exact structural checks of the covering identities on random samples.

    Returns one report entry per identity: {"identity", "status", and a
    JSON witness for the first failing sample if any}.  ``sigma_bar_fn``
    substitutes the lifted shift, which lets callers demonstrate that a
    wrong lift is caught rather than silently accepted.
    """
    rng = random.Random(seed)
    sb = sigma_bar_fn or sigma_bar
    e = identity_point(matrix)
    k = matrix.k
    results: list[dict] = []

    def run(name: str, check: Callable[[], tuple[bool, dict | None]]) -> None:
        try:
            ok, witness = check()
        except Exception as exc:  # a structural identity must never raise
            ok, witness = False, {"error": repr(exc)}
        entry = {"identity": name, "status": "pass" if ok else "fail"}
        if witness is not None:
            entry["witness"] = witness
        results.append(entry)

    def lattice_embedding() -> tuple[bool, dict | None]:
        for _ in range(samples):
            m = [rng.randint(-4, 4) for _ in range(k)]
            n = [rng.randint(-4, 4) for _ in range(k)]
            lhs = cover_add(alpha(matrix, m), alpha(matrix, n))
            rhs = alpha(matrix, [a + b for a, b in zip(m, n)])
            if lhs.v != rhs.v or lhs.fiber != rhs.fiber:
                return False, {"m": m, "n": n}
            if any(n) and alpha(matrix, n).v == tuple(Fraction(0) for _ in range(k)):
                return False, {"n": n}
        return True, None

    def kernel_contains_lattice() -> tuple[bool, dict | None]:
        for _ in range(samples):
            n = [rng.randint(-4, 4) for _ in range(k)]
            if q_bar(alpha(matrix, n)) != e:
                return False, {"n": n}
        return True, None

    def kernel_partial_converse() -> tuple[bool, dict | None]:
        # every sampled kernel element must be the deck translation by its
        # own vector, which in particular must be integral
        for _ in range(samples):
            n = [rng.randint(-4, 4) for _ in range(k)]
            for s in (alpha(matrix, n), _random_cover(matrix, rng)):
                if q_bar(s) == e:
                    if any(c.denominator != 1 for c in s.v):
                        return False, {"point": s.to_json()}
                    a = alpha(matrix, [c.numerator for c in s.v])
                    if s.fiber != a.fiber or s.v != a.v:
                        return False, {"point": s.to_json()}
        return True, None

    def equivariance_bar() -> tuple[bool, dict | None]:
        for _ in range(samples):
            x = _random_cover(matrix, rng)
            if q_bar(sb(x)) != solenoid.shift(q_bar(x)):
                return False, {"point": x.to_json()}
        return True, None

    def deck_translation_bar() -> tuple[bool, dict | None]:
        for _ in range(samples):
            x = _random_cover(matrix, rng)
            n = [rng.randint(-4, 4) for _ in range(k)]
            lhs = sb(cover_add(x, alpha(matrix, n)))
            an = [sum(matrix.rows[i][j] * n[j] for j in range(k)) for i in range(k)]
            rhs = cover_add(sb(x), alpha(matrix, an))
            if lhs.v != rhs.v or lhs.fiber != rhs.fiber:
                return False, {"point": x.to_json(), "n": n}
        return True, None

    def lattice_embedding_tilde() -> tuple[bool, dict | None]:
        for _ in range(samples):
            g = LimitElement(matrix, [rng.randint(-4, 4) for _ in range(k)], rng.randint(0, 3))
            h = LimitElement(matrix, [rng.randint(-4, 4) for _ in range(k)], rng.randint(0, 3))
            if tilde_add(alpha_tilde(g), alpha_tilde(h)) != alpha_tilde(limit_add(g, h)):
                return False, {"g": g.to_json(), "h": h.to_json()}
        return True, None

    def kernel_tilde() -> tuple[bool, dict | None]:
        for _ in range(samples):
            g = LimitElement(matrix, [rng.randint(-4, 4) for _ in range(k)], rng.randint(0, 3))
            if q_tilde(alpha_tilde(g)) != e:
                return False, {"g": g.to_json()}
        return True, None

    def equivariance_tilde() -> tuple[bool, dict | None]:
        for _ in range(samples):
            x = TildeCoverPoint(_random_cover(matrix, rng), rng.randint(0, 3))
            if q_tilde(sigma_tilde(x)) != solenoid.shift(q_tilde(x)):
                return False, {"point": x.to_json()}
        return True, None

    def deck_translation_tilde() -> tuple[bool, dict | None]:
        for _ in range(samples):
            x = TildeCoverPoint(_random_cover(matrix, rng), rng.randint(0, 3))
            g = LimitElement(matrix, [rng.randint(-4, 4) for _ in range(k)], rng.randint(0, 3))
            lhs = sigma_tilde(tilde_add(x, alpha_tilde(g)))
            rhs = tilde_add(sigma_tilde(x), alpha_tilde(limit_tau(g)))
            if lhs != rhs:
                return False, {"point": x.to_json(), "g": g.to_json()}
        return True, None

    run("lattice-embedding-is-injective-homomorphism", lattice_embedding)
    run("projection-kills-lattice", kernel_contains_lattice)
    run("projection-kernel-partial-converse", kernel_partial_converse)
    run("lifted-shift-intertwines-projection", equivariance_bar)
    run("lifted-shift-maps-deck-translations", deck_translation_bar)
    run("limit-embedding-is-homomorphism", lattice_embedding_tilde)
    run("limit-projection-kills-embedding", kernel_tilde)
    run("union-shift-intertwines-projection", equivariance_tilde)
    run("union-shift-maps-deck-translations", deck_translation_tilde)
    return results
