"""Exact linear algebra over the integers for hyperbolic toral maps.

Integer matrices are the generators of every dynamical system in this
package.  Determinants, characteristic polynomials, and rational inverses
are computed exactly (stdlib ``fractions``); eigenvalue moduli come from
the exact characteristic polynomial refined to high precision with mpmath,
so hyperbolicity verdicts never depend on floating noise in an
eigensolver.  Floating point enters only in the adapted-basis data used by
the numerical shadowing and classification layers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

__all__ = [
    "IntMatrix",
    "TorusPoint",
    "HyperbolicityReport",
    "HyperbolicSplitting",
    "LimitElement",
    "DefectiveMatrixError",
    "check_hyperbolic",
    "toral_entropy",
    "splitting",
    "identity",
    "integer_solve",
    "in_persistent_lattice",
    "limit_reduce",
    "limit_add",
    "limit_neg",
    "limit_tau",
    "limit_tau_inv",
    "parse_rational",
    "format_rational",
]

_MODULUS_DPS = 60


def parse_rational(s: str | int) -> Fraction:
    """Parse a rational given as ``"p/q"`` or ``"p"`` (or an int)."""
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.strip())


def format_rational(x: Fraction) -> str:
    """Render a rational as ``"p/q"`` (``"p"`` when the denominator is 1)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _as_int_rows(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    out = tuple(tuple(int(v) for v in row) for row in rows)
    k = len(out)
    if k == 0 or any(len(row) != k for row in out):
        raise ValueError("matrix must be square and nonempty")
    return out


@dataclass(frozen=True)
class IntMatrix:
    """Square integer matrix with exact arithmetic helpers."""

    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Sequence[Sequence[int]]):
        object.__setattr__(self, "rows", _as_int_rows(rows))

    @property
    def k(self) -> int:
        return len(self.rows)

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(data)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.k != other.k:
            raise ValueError("dimension mismatch")
        k = self.k
        return IntMatrix(
            [
                [sum(self.rows[i][t] * other.rows[t][j] for t in range(k)) for j in range(k)]
                for i in range(k)
            ]
        )

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Exact matrix-vector product."""
        if len(v) != self.k:
            raise ValueError("dimension mismatch")
        return tuple(sum((Fraction(a) * x for a, x in zip(row, v)), Fraction(0)) for row in self.rows)

    def apply_inv(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Exact product with the rational inverse matrix."""
        inv = self.inverse_fractions()
        return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in inv)

    def power(self, n: int) -> "IntMatrix":
        if n < 0:
            raise ValueError("power must be nonnegative for integer matrices")
        result = identity(self.k)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def det(self) -> int:
        return _det_bareiss(self.rows)

    def char_poly(self) -> tuple[int, ...]:
        """Monic characteristic polynomial det(tI - A), highest degree first."""
        return _char_poly(self.rows)

    def inverse_fractions(self) -> tuple[tuple[Fraction, ...], ...]:
        return _inverse_fractions(self.rows)

    def adjugate(self) -> tuple[tuple[int, ...], ...]:
        d = self.det()
        inv = self.inverse_fractions()
        adj = tuple(tuple(Fraction(d) * x for x in row) for row in inv)
        out = []
        for row in adj:
            irow = []
            for x in row:
                if x.denominator != 1:
                    raise ArithmeticError("adjugate must be integral")
                irow.append(x.numerator)
            out.append(tuple(irow))
        return tuple(out)

    def eigen_moduli(self) -> tuple[float, ...]:
        """All eigenvalue moduli (with multiplicity), sorted descending."""
        return _eigen_moduli(self.rows)

    def is_semisimple(self) -> bool:
        """Exact test: the squarefree part of the characteristic polynomial
        annihilates the matrix iff the matrix is diagonalizable over C."""
        return _is_semisimple(self.rows)

    def numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


def identity(k: int) -> IntMatrix:
    return IntMatrix([[1 if i == j else 0 for j in range(k)] for i in range(k)])


def _det_bareiss(rows: tuple[tuple[int, ...], ...]) -> int:
    # Fraction-free Gaussian elimination: every intermediate entry stays an
    # exact integer.
    k = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for i in range(k - 1):
        if m[i][i] == 0:
            for r in range(i + 1, k):
                if m[r][i] != 0:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = m[i][i]
    return sign * m[k - 1][k - 1]


def _char_poly(rows: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    # Faddeev-LeVerrier over exact rationals; coefficients of det(tI - A)
    # are integers for an integer matrix.
    k = len(rows)
    a = [[Fraction(v) for v in row] for row in rows]
    coeffs: list[Fraction] = [Fraction(1)]
    m = [[Fraction(0)] * k for _ in range(k)]
    for step in range(1, k + 1):
        # m <- a @ m + c_{step-1} * I
        prev_c = coeffs[-1]
        if step == 1:
            m = [[Fraction(1) if i == j else Fraction(0) for j in range(k)] for i in range(k)]
        else:
            am = [[sum(a[i][t] * m[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
            for i in range(k):
                am[i][i] += prev_c
            m = am
        am2 = [[sum(a[i][t] * m[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        trace = sum(am2[i][i] for i in range(k))
        coeffs.append(-trace / step)
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("characteristic polynomial must be integral")
        out.append(c.numerator)
    return tuple(out)


@functools.lru_cache(maxsize=128)
def _inverse_fractions(rows: tuple[tuple[int, ...], ...]) -> tuple[tuple[Fraction, ...], ...]:
    k = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(1) if i == j else Fraction(0) for j in range(k)]
           for i, row in enumerate(rows)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[k:]) for row in aug)


def _squarefree_decomposition(p: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: return [(factor, multiplicity)] with p = prod f^m,
    every factor squarefree.  Coefficients lead-first."""
    out: list[tuple[list[Fraction], int]] = []
    g = _poly_gcd(p, _poly_derivative(p))
    if len(g) == 1:
        return [(p, 1)]
    w = _poly_divide(p, g)
    y = _poly_divide(_poly_derivative(p), g)
    # z = y - w'
    wp = _poly_derivative(w)
    z = [Fraction(0)] * max(len(y), len(wp))
    for i, c in enumerate(reversed(y)):
        z[len(z) - 1 - i] += c
    for i, c in enumerate(reversed(wp)):
        z[len(z) - 1 - i] -= c
    z = _poly_strip(z)
    i = 1
    while len(w) > 1:
        g = _poly_gcd(w, z) if z else w
        if len(g) > 1:
            out.append((g, i))
        w_next = _poly_divide(w, g)
        y_next = _poly_divide(z, g) if z else []
        wp = _poly_derivative(w_next)
        z = [Fraction(0)] * max(len(y_next), len(wp))
        for j, c in enumerate(reversed(y_next)):
            z[len(z) - 1 - j] += c
        for j, c in enumerate(reversed(wp)):
            z[len(z) - 1 - j] -= c
        z = _poly_strip(z)
        w = w_next
        i += 1
    return out


def _char_roots(rows: tuple[tuple[int, ...], ...]):
    """High-precision roots of the characteristic polynomial with
    multiplicities, as [(mpmath complex, multiplicity)].  Call under a
    mpmath.workdps context."""
    coeffs = [Fraction(c) for c in _char_poly(rows)]
    pairs = []
    for factor, mult in _squarefree_decomposition(coeffs):
        if len(factor) == 1:
            continue
        poly = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in factor]
        for r in mpmath.polyroots(poly, maxsteps=200, extraprec=120):
            pairs.append((r, mult))
    return pairs


@functools.lru_cache(maxsize=256)
def _eigen_moduli_cached(rows: tuple[tuple[int, ...], ...]) -> tuple[float, ...]:
    with mpmath.workdps(_MODULUS_DPS):
        moduli: list[float] = []
        for r, mult in _char_roots(rows):
            moduli.extend([float(abs(r))] * mult)
    return tuple(sorted(moduli, reverse=True))


def _eigen_moduli(rows: tuple[tuple[int, ...], ...]) -> tuple[float, ...]:
    return _eigen_moduli_cached(rows)


def _poly_strip(u: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(u) and u[i] == 0:
        i += 1
    return u[i:]


def _poly_mod(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    # remainder of p by q; coefficients lead-first, q nonzero
    r = p[:]
    while len(r) >= len(q):
        if r[0] != 0:
            f = r[0] / q[0]
            for i in range(len(q)):
                r[i] -= f * q[i]
        r = r[1:]
    return _poly_strip(r)


def _poly_gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    # Euclidean algorithm on rational polynomials, leading coefficient first.
    p, q = _poly_strip(p), _poly_strip(q)
    while q:
        p, q = q, _poly_mod(p, q)
    if not p:
        return [Fraction(1)]
    return [c / p[0] for c in p]


def _poly_derivative(p: list[Fraction]) -> list[Fraction]:
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def _poly_divide(p: list[Fraction], d: list[Fraction]) -> list[Fraction]:
    out: list[Fraction] = []
    r = p[:]
    while len(r) >= len(d):
        f = r[0] / d[0]
        out.append(f)
        for i in range(len(d)):
            r[i] -= f * d[i]
        r = r[1:]
    return out


@functools.lru_cache(maxsize=256)
def _is_semisimple(rows: tuple[tuple[int, ...], ...]) -> bool:
    coeffs = [Fraction(c) for c in _char_poly(rows)]
    g = _poly_gcd(coeffs, _poly_derivative(coeffs))
    if len(g) == 1:
        return True
    squarefree = _poly_divide(coeffs, g)
    # evaluate squarefree(A) exactly via Horner
    k = len(rows)
    acc = [[Fraction(0)] * k for _ in range(k)]
    a = [[Fraction(v) for v in row] for row in rows]
    for c in squarefree:
        acc = [[sum(acc[i][t] * a[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        for i in range(k):
            acc[i][i] += c
    return all(x == 0 for row in acc for x in row)


@dataclass(frozen=True)
class HyperbolicityReport:
    matrix: IntMatrix
    is_hyperbolic: bool
    det: int
    eigen_moduli: tuple[float, ...]
    tolerance: float

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.to_json(),
            "is_hyperbolic": self.is_hyperbolic,
            "det": self.det,
            "eigen_moduli": list(self.eigen_moduli),
            "tolerance": self.tolerance,
        }


def check_hyperbolic(matrix: IntMatrix, tol: float = 1e-9) -> HyperbolicityReport:
    """Decide hyperbolicity: no eigenvalue modulus within ``tol`` of 1.

    The determinant and characteristic polynomial are exact; moduli carry
    ~50 significant digits, so the verdict is stable far below ``tol``.
    """
    d = matrix.det()
    if d == 0:
        raise ValueError("matrix must be invertible over the rationals")
    moduli = matrix.eigen_moduli()
    cp = matrix.char_poly()
    k = matrix.k
    if d != (-1) ** k * cp[-1]:
        raise ArithmeticError("determinant cross-check failed")
    hyp = all(abs(m - 1.0) > tol for m in moduli)
    return HyperbolicityReport(matrix, hyp, d, moduli, tol)


def toral_entropy(matrix: IntMatrix) -> float:
    """Topological entropy of the induced toral map: sum of log moduli > 1.

    Only defined for hyperbolic matrices, where the expanding subspace
    (and with it the formula) is unambiguous.
    """
    if not check_hyperbolic(matrix).is_hyperbolic:
        raise ValueError(
            "entropy by the eigenvalue formula needs a hyperbolic matrix: "
            "an eigenvalue of modulus 1 leaves the splitting undefined"
        )
    with mpmath.workdps(_MODULUS_DPS):
        h = mpmath.mpf(0)
        for r, mult in _char_roots(matrix.rows):
            m = abs(r)
            if m > 1:
                h += mult * mpmath.log(m)
        return float(h)


@dataclass(frozen=True)
class HyperbolicSplitting:
    """Invariant splitting R^k = E+ (+) E- with an adapted inner norm.

    ``basis_plus``/``basis_minus`` hold basis vectors as columns.  The
    adapted norm is the Euclidean norm of coordinates in that basis; in it
    one application of the matrix expands E+ vectors by at least ``mu`` and
    contracts E- vectors by at most ``lam`` (0.0 when E- is trivial).
    """

    matrix: IntMatrix
    basis_plus: np.ndarray
    basis_minus: np.ndarray
    mu: float
    lam: float
    _to_adapted: np.ndarray
    _from_adapted: np.ndarray

    @property
    def dim_plus(self) -> int:
        return self.basis_plus.shape[1]

    @property
    def dim_minus(self) -> int:
        return self.basis_minus.shape[1]

    def to_adapted(self, v: np.ndarray) -> np.ndarray:
        return self._to_adapted @ np.asarray(v, dtype=float)

    def from_adapted(self, u: np.ndarray) -> np.ndarray:
        return self._from_adapted @ np.asarray(u, dtype=float)

    def adapted_norm(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(self.to_adapted(v)))

    def plus_component(self, v: np.ndarray) -> np.ndarray:
        """Adapted coordinates of v along E+ (length dim_plus)."""
        return self.to_adapted(v)[: self.dim_plus]

    def minus_component(self, v: np.ndarray) -> np.ndarray:
        return self.to_adapted(v)[self.dim_plus:]

    def adapted_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """The matrix in adapted coordinates, split into E+ and E- blocks."""
        m = self._to_adapted @ self.matrix.numpy() @ self._from_adapted
        p = self.dim_plus
        return m[:p, :p].copy(), m[p:, p:].copy()


class DefectiveMatrixError(ValueError):
    """Raised for hyperbolic matrices with a nontrivial Jordan block: the
    one-step adapted rate contract requires a genuine eigenbasis."""


def _refine_real_eigvec(a: np.ndarray, lam: float, v: np.ndarray) -> np.ndarray:
    # one inverse-iteration polish against the high-precision eigenvalue
    k = a.shape[0]
    shifted = a - (lam + 1e-10) * np.eye(k)
    try:
        w = np.linalg.solve(shifted, v)
    except np.linalg.LinAlgError:
        return v
    n = np.linalg.norm(w)
    if not np.isfinite(n) or n == 0:
        return v
    w = w / n
    if np.dot(w, v) < 0:
        w = -w
    return w


@functools.lru_cache(maxsize=128)
def _splitting_cached(rows: tuple[tuple[int, ...], ...]) -> HyperbolicSplitting:
    matrix = IntMatrix(rows)
    rep = check_hyperbolic(matrix)
    if not rep.is_hyperbolic:
        raise ValueError(f"matrix {rows} is not hyperbolic: moduli {rep.eigen_moduli}")
    if not matrix.is_semisimple():
        raise DefectiveMatrixError(
            "matrix has a nontrivial Jordan block; adapted one-step rates need "
            "a full eigenbasis"
        )
    a = matrix.numpy()
    eigvals, eigvecs = np.linalg.eig(a)
    used = [False] * len(eigvals)
    plus_cols: list[np.ndarray] = []
    minus_cols: list[np.ndarray] = []

    def push(cols: list[np.ndarray], block: np.ndarray) -> None:
        cols.append(block)

    order = np.argsort(-np.abs(eigvals))
    for idx in order:
        if used[idx]:
            continue
        lam_i = eigvals[idx]
        vec = eigvecs[:, idx]
        used[idx] = True
        target = plus_cols if abs(lam_i) > 1 else minus_cols
        if abs(lam_i.imag) < 1e-10:
            v = np.real(vec)
            if np.linalg.norm(v) < 1e-8:
                v = np.imag(vec)
            v = v / np.linalg.norm(v)
            v = _refine_real_eigvec(a, float(lam_i.real), v)
            # orient the first nonzero entry positive
            nz = np.flatnonzero(np.abs(v) > 1e-12)
            if len(nz) and v[nz[0]] < 0:
                v = -v
            push(target, v.reshape(-1, 1))
        else:
            # pair with the conjugate; real canonical form spans Re v, Im v
            conj_idx = None
            for j in range(len(eigvals)):
                if not used[j] and abs(eigvals[j] - np.conj(lam_i)) < 1e-8:
                    conj_idx = j
                    break
            if conj_idx is None:
                raise ArithmeticError("unpaired complex eigenvalue")
            used[conj_idx] = True
            p = np.real(vec)
            q = np.imag(vec)
            push(target, np.column_stack([p / np.linalg.norm(p), q / np.linalg.norm(q)]))

    k = matrix.k
    bp = np.hstack(plus_cols) if plus_cols else np.zeros((k, 0))
    bm = np.hstack(minus_cols) if minus_cols else np.zeros((k, 0))
    basis = np.hstack([bp, bm])
    if basis.shape != (k, k) or np.linalg.cond(basis) > 1e10:
        raise ArithmeticError("eigenbasis is numerically degenerate")
    to_adapted = np.linalg.inv(basis)
    moduli = matrix.eigen_moduli()
    mu = min((m for m in moduli if m > 1), default=0.0)
    lam = max((m for m in moduli if m < 1), default=0.0)
    return HyperbolicSplitting(matrix, bp, bm, mu, lam, to_adapted, basis)


def splitting(matrix: IntMatrix) -> HyperbolicSplitting:
    """Hyperbolic splitting with adapted norm; raises for non-hyperbolic
    or defective input."""
    return _splitting_cached(matrix.rows)


@functools.lru_cache(maxsize=128)
def _unimodular_annihilator(rows: tuple[tuple[int, ...], ...]) -> tuple[tuple[Fraction, ...], ...] | None:
    """q(A) where q is the product of irreducible characteristic factors with
    constant term +-1; None when there are no such factors.

    The integer kernel of q(A) is exactly the largest sublattice on which the
    matrix acts bijectively, i.e. the directions whose translations persist at
    every depth of the inverse limit.
    """
    matrix = IntMatrix(rows)
    d = matrix.det()
    k = matrix.k
    if abs(d) == 1:
        return tuple(tuple(Fraction(0) for _ in range(k)) for _ in range(k))
    import sympy

    t = sympy.symbols("t")
    poly = sympy.Poly(list(matrix.char_poly()), t)
    factors = sympy.factor_list(poly)[1]
    q = sympy.Poly(1, t)
    for fac, mult in factors:
        fp = sympy.Poly(fac, t)
        if abs(fp.all_coeffs()[-1]) == 1:
            q = q * fp ** mult
    if q.degree() == 0:
        return None
    coeffs = [Fraction(int(c)) for c in q.all_coeffs()]
    a = [[Fraction(v) for v in row] for row in rows]
    acc = [[Fraction(0)] * k for _ in range(k)]
    for c in coeffs:
        acc = [[sum(acc[i][t2] * a[t2][j] for t2 in range(k)) for j in range(k)] for i in range(k)]
        for i in range(k):
            acc[i][i] += c
    return tuple(tuple(row) for row in acc)


def in_persistent_lattice(matrix: IntMatrix, u: Sequence[Fraction]) -> bool:
    """True iff translation by ``u`` fixes every point of the inverse limit,
    i.e. u is an integer vector lying in the image of every power of the
    matrix."""
    if any(Fraction(x).denominator != 1 for x in u):
        return False
    ann = _unimodular_annihilator(matrix.rows)
    if ann is None:
        return all(Fraction(x) == 0 for x in u)
    return all(
        sum(row[j] * Fraction(u[j]) for j in range(matrix.k)) == 0 for row in ann
    )


# ---------------------------------------------------------------------------
# Torus points


@dataclass(frozen=True)
class TorusPoint:
    """Point of T^k with exact rational coordinates reduced into [0, 1)."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence[Fraction | int | str]):
        vals = tuple(parse_rational(c) % 1 if isinstance(c, str) else Fraction(c) % 1 for c in coords)
        object.__setattr__(self, "coords", vals)

    @property
    def k(self) -> int:
        return len(self.coords)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "TorusPoint":
        return TorusPoint([-a for a in self.coords])

    def translate(self, v: Sequence[Fraction]) -> "TorusPoint":
        return TorusPoint([a + b for a, b in zip(self.coords, v)])

    def apply(self, m: IntMatrix) -> "TorusPoint":
        return TorusPoint(list(m.apply(self.coords)))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "TorusPoint":
        return cls([parse_rational(c) for c in data])

    @classmethod
    def zero(cls, k: int) -> "TorusPoint":
        return cls([Fraction(0)] * k)

    def float_coords(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])


def integer_solve(matrix: IntMatrix, v: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """Solve matrix @ w = v; return w if it is integral, else None."""
    w = matrix.apply_inv([Fraction(x) for x in v])
    if all(x.denominator == 1 for x in w):
        return w
    return None


# ---------------------------------------------------------------------------
# Direct limit Z^k[A^{-1}] = lim(Z^k --A--> Z^k --A--> ...)


@dataclass(frozen=True)
class LimitElement:
    """Element of the direct limit of Z^k under the matrix, stored as a
    (vector, level) pair with the identification (v, m) ~ (A v, m+1).

    Canonical form has minimal level: the vector is not in A(Z^k) unless
    the level is 0.  The element denotes A^{-level} v.
    """

    matrix: IntMatrix
    vec: tuple[int, ...]
    level: int

    def __init__(self, matrix: IntMatrix, vec: Sequence[int], level: int):
        if level < 0:
            raise ValueError("level must be nonnegative")
        v = tuple(int(x) for x in vec)
        if len(v) != matrix.k:
            raise ValueError("dimension mismatch")
        # reduce to minimal level
        while level > 0:
            w = integer_solve(matrix, [Fraction(x) for x in v])
            if w is None:
                break
            v = tuple(x.numerator for x in w)
            level -= 1
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "vec", v)
        object.__setattr__(self, "level", level)

    def value(self) -> tuple[Fraction, ...]:
        """The rational vector A^{-level} vec this class denotes."""
        v = [Fraction(x) for x in self.vec]
        for _ in range(self.level):
            v = list(self.matrix.apply_inv(v))
        return tuple(v)

    def at_level(self, level: int) -> tuple[int, ...]:
        if level < self.level:
            raise ValueError("cannot lower below canonical level")
        v = [Fraction(x) for x in self.vec]
        for _ in range(level - self.level):
            v = list(self.matrix.apply(v))
        return tuple(x.numerator for x in v)

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_json(), "vec": list(self.vec), "level": self.level}

    @classmethod
    def from_json(cls, data: dict) -> "LimitElement":
        return cls(IntMatrix(data["matrix"]), data["vec"], data["level"])


def limit_reduce(x: LimitElement) -> LimitElement:
    """Canonical minimal-level representative (constructor already reduces)."""
    return LimitElement(x.matrix, x.vec, x.level)


def limit_add(x: LimitElement, y: LimitElement) -> LimitElement:
    if x.matrix.rows != y.matrix.rows:
        raise ValueError("elements live over different matrices")
    lvl = max(x.level, y.level)
    vx = x.at_level(lvl)
    vy = y.at_level(lvl)
    return LimitElement(x.matrix, [a + b for a, b in zip(vx, vy)], lvl)


def limit_neg(x: LimitElement) -> LimitElement:
    return LimitElement(x.matrix, [-a for a in x.vec], x.level)


def limit_tau(x: LimitElement) -> LimitElement:
    """The shift automorphism: multiplication by the matrix."""
    vec = [sum(x.matrix.rows[i][j] * x.vec[j] for j in range(x.matrix.k)) for i in range(x.matrix.k)]
    return LimitElement(x.matrix, vec, x.level)


def limit_tau_inv(x: LimitElement) -> LimitElement:
    """Inverse of the shift automorphism: one level deeper."""
    return LimitElement(x.matrix, x.vec, x.level + 1)
