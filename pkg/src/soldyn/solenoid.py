"""Exact arithmetic on inverse-limit points of hyperbolic toral maps.

A point of the inverse limit is a backward orbit (x_0, x_1, ...) on the
torus with x_j = A x_{j+1} at every depth.  The representable subset here
is a translation-stable family: an eventually periodic rational backward
chain plus a rational translation offset, i.e. points theta_v(b).  All
group and dynamical operations on that family are closed and exact.

Consistency forces every valid eventually periodic chain to be purely
periodic (each head entry is determined by the entry below it), so the
canonical form of a chain is a primitive cycle with empty head.  When the
matrix is unimodular the translation offset can be folded into the chain
exactly; when all eigenvalues expand, distinct chains are provably in
distinct path components.  Those two facts make equality, path vectors,
and the 2-adic-weighted metric decidable for every matrix this package
ships tests for; the remaining mixed cases degrade to explicit Interval /
Unknown values instead of guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import (
    IntMatrix,
    TorusPoint,
    format_rational,
    in_persistent_lattice,
    parse_rational,
)

__all__ = [
    "BackwardChain",
    "SolenoidPoint",
    "Exact",
    "Interval",
    "Infinite",
    "Vector",
    "NotSameComponent",
    "Unknown",
    "identity_point",
    "from_cycle",
    "act",
    "add",
    "neg",
    "sub",
    "shift",
    "unshift",
    "coordinate",
    "d_sigma",
    "path_vector",
    "chain_distance_upper",
]

_ABSORB_STATE_CAP = 200_000


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class BackwardChain:
    """Purely periodic backward orbit, stored as its primitive cycle.

    ``cycle[i]`` is the coordinate at depth i (mod the period), and the
    defining relation cycle[i] = A cycle[(i+1) % p] holds exactly.  A head
    may be supplied on construction for convenience; its entries are
    validated against the forced values and absorbed by rotating the cycle.
    """

    matrix: IntMatrix
    cycle: tuple[TorusPoint, ...]

    def __init__(self, matrix: IntMatrix, cycle: Sequence[TorusPoint],
                 head: Sequence[TorusPoint] = ()):
        cyc = tuple(cycle)
        if not cyc:
            raise ValueError("cycle must be nonempty")
        p = len(cyc)
        for i in range(p):
            if cyc[i] != cyc[(i + 1) % p].apply(matrix):
                raise ValueError(f"cycle breaks the backward relation at index {i}")
        hd = tuple(head)
        if hd:
            # heads are forced: entry j must equal A^(m-j) cycle[0]
            cur = cyc[0]
            for j in range(len(hd) - 1, -1, -1):
                cur = cur.apply(matrix)
                if hd[j] != cur:
                    raise ValueError(f"head entry {j} conflicts with the chain below it")
            # absorbing m head entries rotates the cycle start back by m
            m = len(hd) % p
            cyc = cyc[-m:] + cyc[:-m] if m else cyc
        cyc = _primitive(cyc)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "cycle", cyc)

    @property
    def period(self) -> int:
        return len(self.cycle)

    def coordinate(self, j: int) -> TorusPoint:
        if j < 0:
            raise ValueError("chain coordinates are indexed by depth >= 0")
        return self.cycle[j % len(self.cycle)]

    def shifted(self) -> "BackwardChain":
        # sigma prepends A cycle[0] = cycle[-1]: rotate the start back by one
        c = self.cycle
        return BackwardChain(self.matrix, (c[-1],) + c[:-1])

    def unshifted(self) -> "BackwardChain":
        c = self.cycle
        return BackwardChain(self.matrix, c[1:] + (c[0],))

    def __add__(self, other: "BackwardChain") -> "BackwardChain":
        if self.matrix.rows != other.matrix.rows:
            raise ValueError("chains live over different matrices")
        p = _lcm(len(self.cycle), len(other.cycle))
        vals = [self.cycle[j % len(self.cycle)] + other.cycle[j % len(other.cycle)]
                for j in range(p)]
        return BackwardChain(self.matrix, vals)

    def __neg__(self) -> "BackwardChain":
        return BackwardChain(self.matrix, tuple(-c for c in self.cycle))

    def is_zero(self) -> bool:
        return len(self.cycle) == 1 and self.cycle[0].is_zero()


def _primitive(cycle: tuple[TorusPoint, ...]) -> tuple[TorusPoint, ...]:
    p = len(cycle)
    for d in range(1, p + 1):
        if p % d:
            continue
        if all(cycle[i] == cycle[i % d] for i in range(p)):
            return cycle[:d]
    return cycle


class SolenoidPoint:
    """theta_offset(base): a backward chain translated by a rational vector.

    Canonical form: the base chain is primitive, and for a unimodular
    matrix the offset is folded into the chain (the fold is exact because
    the inverse matrix is integral, so coordinate denominators stay
    bounded and the translated chain is again periodic).
    """

    __slots__ = ("matrix", "base", "offset")

    matrix: IntMatrix
    base: BackwardChain
    offset: tuple[Fraction, ...]

    def __init__(self, matrix: IntMatrix, base: BackwardChain,
                 offset: Sequence[Fraction | int | str] = ()):
        off = tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in offset) \
            or tuple(Fraction(0) for _ in range(matrix.k))
        if len(off) != matrix.k or base.matrix.rows != matrix.rows:
            raise ValueError("dimension mismatch")
        if abs(matrix.det()) == 1 and any(off):
            base, off = _absorb_offset(matrix, base, off), tuple(Fraction(0) for _ in off)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "offset", off)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("SolenoidPoint is immutable")

    @property
    def k(self) -> int:
        return self.matrix.k

    def coordinate(self, j: int) -> TorusPoint:
        """Depth-j coordinate: base_j + A^{-j} offset, exactly."""
        if j < 0:
            raise ValueError("coordinates are indexed by depth >= 0")
        c = self.base.coordinate(j)
        if any(self.offset):
            v = list(self.offset)
            for _ in range(j):
                v = list(self.matrix.apply_inv(v))
            c = c.translate(v)
        return c

    def p0(self) -> TorusPoint:
        return self.coordinate(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SolenoidPoint):
            return NotImplemented
        if self.matrix.rows != other.matrix.rows or self.base.cycle != other.base.cycle:
            return False
        diff = [a - b for a, b in zip(self.offset, other.offset)]
        return in_persistent_lattice(self.matrix, diff)

    def __hash__(self) -> int:
        return hash((self.matrix.rows, tuple(p.coords for p in self.base.cycle)))

    def __repr__(self) -> str:
        cyc = [p.to_json() for p in self.base.cycle]
        off = [format_rational(c) for c in self.offset]
        return f"SolenoidPoint(cycle={cyc}, offset={off})"

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.to_json(),
            "head": [],
            "cycle": [p.to_json() for p in self.base.cycle],
            "offset": [format_rational(c) for c in self.offset],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SolenoidPoint":
        m = IntMatrix(data["matrix"])
        cycle = [TorusPoint.from_json(p) for p in data["cycle"]]
        head = [TorusPoint.from_json(p) for p in data.get("head", [])]
        return cls(m, BackwardChain(m, cycle, head), data.get("offset", ()))


def _absorb_offset(matrix: IntMatrix, base: BackwardChain,
                   offset: tuple[Fraction, ...]) -> BackwardChain:
    # For |det| = 1 the translated chain theta_v(b) is again periodic:
    # track (cycle phase, A^{-j} v mod 1) until the joint state recurs.
    p = base.period
    v = TorusPoint(offset)
    start = (0, v.coords)
    vals: list[TorusPoint] = []
    phase, cur = 0, v
    for step in range(_ABSORB_STATE_CAP):
        vals.append(base.cycle[phase] + cur)
        cur = TorusPoint(list(matrix.apply_inv(cur.coords)))
        phase = (phase + 1) % p
        if (phase, cur.coords) == start:
            return BackwardChain(matrix, vals)
    raise ArithmeticError("offset absorption exceeded the state cap")


def identity_point(matrix: IntMatrix) -> SolenoidPoint:
    return SolenoidPoint(matrix, BackwardChain(matrix, [TorusPoint.zero(matrix.k)]))


def random_point(matrix: IntMatrix, rng, max_period: int = 3, max_den: int = 12,
                 with_offset: bool = True) -> SolenoidPoint:
    """Random representable point: a rational cycle of the backward dynamics
    (built exactly from an integer vector via (A^p - I)^{-1}) plus an
    optional rational offset."""
    k = matrix.k
    p = rng.randint(1, max_period)
    n = [rng.randint(-3, 3) for _ in range(k)]
    ap = matrix.power(p)
    m_rows = [[ap.rows[i][j] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
    m = IntMatrix(m_rows)
    gamma = list(m.apply_inv([Fraction(x) for x in n]))  # = gamma_p
    cycle_vals: list[tuple[Fraction, ...]] = []
    cur = gamma
    for _ in range(p):
        cur = list(matrix.apply(cur))
        cycle_vals.append(tuple(cur))
    cycle_vals.reverse()  # index i holds A^{p-i} gamma_p, so depth i maps right
    pts = [TorusPoint(list(v)) for v in cycle_vals]
    offset: list[Fraction] = [Fraction(0)] * k
    if with_offset:
        offset = [Fraction(rng.randint(-2 * max_den, 2 * max_den), rng.randint(1, max_den))
                  for _ in range(k)]
    return SolenoidPoint(matrix, BackwardChain(matrix, pts), offset)


def from_cycle(matrix: IntMatrix, cycle: Iterable[Sequence[Fraction | int | str]],
               offset: Sequence[Fraction | int | str] = ()) -> SolenoidPoint:
    pts = [TorusPoint([parse_rational(c) if isinstance(c, str) else Fraction(c) for c in row])
           for row in cycle]
    return SolenoidPoint(matrix, BackwardChain(matrix, pts), offset)


def act(v: Sequence[Fraction | int | str], x: SolenoidPoint) -> SolenoidPoint:
    """Translation flow theta_v: adds A^{-j} v at depth j."""
    vv = [parse_rational(c) if isinstance(c, str) else Fraction(c) for c in v]
    return SolenoidPoint(x.matrix, x.base, [a + b for a, b in zip(x.offset, vv)])


def add(x: SolenoidPoint, y: SolenoidPoint) -> SolenoidPoint:
    if x.matrix.rows != y.matrix.rows:
        raise ValueError("points live over different matrices")
    return SolenoidPoint(x.matrix, x.base + y.base,
                         [a + b for a, b in zip(x.offset, y.offset)])


def neg(x: SolenoidPoint) -> SolenoidPoint:
    return SolenoidPoint(x.matrix, -x.base, [-a for a in x.offset])


def sub(x: SolenoidPoint, y: SolenoidPoint) -> SolenoidPoint:
    return add(x, neg(y))


def shift(x: SolenoidPoint) -> SolenoidPoint:
    """The shift map: coordinates move one slot deeper, offset maps by A."""
    return SolenoidPoint(x.matrix, x.base.shifted(), list(x.matrix.apply(x.offset)))


def unshift(x: SolenoidPoint) -> SolenoidPoint:
    return SolenoidPoint(x.matrix, x.base.unshifted(), list(x.matrix.apply_inv(x.offset)))


def coordinate(x: SolenoidPoint, j: int) -> TorusPoint:
    return x.coordinate(j)


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class Exact:
    value: Fraction

    def upper(self) -> Fraction:
        return self.value

    def to_json(self) -> dict:
        return {"kind": "exact", "value": format_rational(self.value)}


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper_bound: Fraction

    def upper(self) -> Fraction:
        return self.upper_bound

    def to_json(self) -> dict:
        return {"kind": "interval", "lower": format_rational(self.lower),
                "upper": format_rational(self.upper_bound)}


@dataclass(frozen=True)
class Infinite:
    def to_json(self) -> dict:
        return {"kind": "infinite"}


@dataclass(frozen=True)
class Vector:
    value: tuple[Fraction, ...]

    def norm(self) -> float:
        return math.sqrt(sum(float(c) ** 2 for c in self.value))

    def to_json(self) -> dict:
        return {"kind": "vector", "value": [format_rational(c) for c in self.value]}


@dataclass(frozen=True)
class NotSameComponent:
    def to_json(self) -> dict:
        return {"kind": "not-same-component"}


@dataclass(frozen=True)
class Unknown:
    depth: int

    def to_json(self) -> dict:
        return {"kind": "unknown", "depth": self.depth}


def _is_expanding(matrix: IntMatrix) -> bool:
    return all(m > 1 for m in matrix.eigen_moduli())


def _forward_sum(matrix: IntMatrix, w0: TorusPoint) -> Fraction | None:
    """Sum of 2^j over forward depths j >= 0 where A^j w0 != 0 on the torus;
    None when infinitely many such depths exist."""
    seen: dict[tuple[Fraction, ...], int] = {}
    total = Fraction(0)
    w = w0
    j = 0
    while w.coords not in seen:
        seen[w.coords] = j
        if not w.is_zero():
            total += Fraction(2) ** j
        w = w.apply(matrix)
        j += 1
    cycle_start = seen[w.coords]
    # re-walk the cycle to see whether any nonzero state recurs
    w2 = w
    for _ in range(cycle_start, j):
        if not w2.is_zero():
            return None
        w2 = w2.apply(matrix)
    return total


def _inv_norm_certificate(matrix: IntMatrix) -> tuple[int, Fraction] | None:
    """Smallest m with an exact sup-norm bound ||A^-m||_inf < 1, together
    with the exact worst growth factor over partial strides."""
    inv = matrix.inverse_fractions()
    k = matrix.k
    cur = [[Fraction(1) if i == j else Fraction(0) for j in range(k)] for i in range(k)]
    growth = Fraction(1)
    for m in range(1, 400):
        cur = [[sum(cur[i][t] * inv[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        norm = max(sum(abs(x) for x in row) for row in cur)
        if norm < 1:
            return m, growth
        growth = max(growth, norm)
    return None


def d_sigma(x: SolenoidPoint, y: SolenoidPoint, depth: int = 96):
    """2-adically weighted separation metric.

    Depth j contributes 2^j whenever the zeroth coordinates of the j-th
    shifts differ (j ranges over all integers; negative shifts read deeper
    chain coordinates).  The forward part is decided exactly by cycle
    detection on a finite torus subgroup.  The backward tail is resolved
    exactly whenever the difference point has a periodic tail pattern or a
    provably eventually-nonzero one; otherwise an Interval with a 2^-depth
    tail bound is returned.
    """
    z = sub(x, y)
    fwd = _forward_sum(z.matrix, z.p0())
    if fwd is None:
        return Infinite()

    matrix = z.matrix
    cyc = z.base.cycle
    p = len(cyc)
    u = z.offset
    back = Fraction(0)
    if not any(u):
        # periodic indicator pattern: exact geometric sum
        pattern = Fraction(0)
        for r in range(1, p + 1):
            if not cyc[r % p].is_zero():
                pattern += Fraction(1, 2 ** r)
        back = pattern / (1 - Fraction(1, 2 ** p))
        return Exact(fwd + back)

    # nonzero residual offset: certify an all-nonzero tail when the inverse
    # iterates of the offset shrink below the cycle's denominator gap
    den = 1
    for pt in cyc:
        for c in pt.coords:
            den = _lcm(den, c.denominator)
    cert = _inv_norm_certificate(matrix) if _is_expanding(matrix) else None
    v = list(u)
    for j in range(1, depth + 1):
        v = list(matrix.apply_inv(v))
        delta = cyc[j % p].translate(v)
        if not delta.is_zero():
            back += Fraction(1, 2 ** j)
        if cert is not None:
            m, growth = cert
            vnorm = max(abs(c) for c in v)
            if vnorm > 0 and vnorm * growth < Fraction(1, den):
                # every deeper coordinate of z is nonzero: exact tail
                back += Fraction(1, 2 ** j)
                return Exact(fwd + back)
    return Interval(fwd + back, fwd + back + Fraction(1, 2 ** depth))


def _minimal_lift(p: TorusPoint) -> tuple[Fraction, ...]:
    # coordinatewise representative in [-1/2, 1/2); the closest lattice coset
    # representative for the cubic lattice
    out = []
    for c in p.coords:
        out.append(c - 1 if c >= Fraction(1, 2) else c)
    return tuple(out)


def path_vector(x: SolenoidPoint, y: SolenoidPoint, depth: int = 64):
    """Connecting translation: Vector(v) with y = theta_v(x) when one exists.

    The difference z = y - x reduces the question to "is z a translate of
    the identity".  For a unimodular matrix every point is (the inverse
    limit is a torus and the flow is transitive), and the minimal lift of
    the zeroth coordinate is the canonical connecting vector.  When no
    unimodular directions persist, distinct primitive chains are provably
    in distinct path components.  The mixed case stays Unknown.
    """
    if x.matrix.rows != y.matrix.rows:
        raise ValueError("points live over different matrices")
    z = sub(y, x)
    if z.base.is_zero():
        return Vector(tuple(z.offset))
    if abs(z.matrix.det()) == 1:
        return Vector(_minimal_lift(z.p0()))
    from .linalg import _unimodular_annihilator  # decided exactly per matrix

    if _unimodular_annihilator(z.matrix.rows) is None:
        return NotSameComponent()
    return Unknown(depth)


def chain_distance_upper(x: SolenoidPoint, y: SolenoidPoint, depth: int = 96) -> float:
    """Upper bound for the chain (infimum) metric via two-leg chains.

    One leg translates x so the zeroth coordinates agree (cost: minimal
    lift norm), the other pays the remaining separation metric, whose
    forward part vanishes by construction.  Both orders are evaluated and
    the bound is symmetric by construction.
    """
    if x == y:
        return 0.0

    def one_way(a: SolenoidPoint, b: SolenoidPoint) -> float:
        v = _minimal_lift(TorusPoint([q - r for q, r in zip(b.p0().coords, a.p0().coords)]))
        moved = act(v, a)
        tail = d_sigma(moved, b, depth)
        if isinstance(tail, Infinite):  # cannot happen: forward part is zero
            return math.inf
        vnorm = math.sqrt(sum(float(c) ** 2 for c in v))
        return vnorm + float(tail.upper())

    candidates = [one_way(x, y), one_way(y, x)]
    pv = path_vector(x, y)
    if isinstance(pv, Vector):
        candidates.append(pv.norm())
    return min(candidates)
