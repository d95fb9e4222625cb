"""Maximal-entropy data for shifts of finite type and linear models.

The measure of maximal entropy of an irreducible 0/1 transition matrix
assigns to each admissible word a weight built from the Perron value and
its right eigenvector.  With the eigenvector scaled so its minimum entry
is one, the weight of a word w_1 ... w_n is

    value^{-(n-1)} * right[w_n],

which makes the weights exactly additive under extension: the weights of
the one-symbol extensions of w sum back to the weight of w.

For a hyperbolic integer matrix with a single real expanding eigenvalue,
paths between points of the linear model carry a signed unstable length:
the coefficient of the displacement on the expanding eigenvector, with
that eigenvector scaled so its first nonzero component is one.  The
length is linear in the displacement and multiplies by the expanding
eigenvalue under one application of the matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import mpmath as mp
import numpy as np

from .linalg import IntMatrix

__all__ = [
    "TransitionMatrix",
    "PerronData",
    "InadmissibleWordError",
    "golden_mean_transition",
    "full_shift_transition",
    "entropy_sft",
    "word_weight",
    "rs_unstable_weight",
    "enumerate_weights",
    "verify_weight_laws",
    "expanding_eigenvalue",
    "unstable_direction",
    "unstable_functional",
    "unstable_length",
    "LinearModelPath",
    "path_unstable_length",
    "unstable_length_scaling_check",
    "unstable_length_laws",
]


class InadmissibleWordError(ValueError):
    """The word uses a transition the matrix forbids."""


@dataclass(frozen=True)
class TransitionMatrix:
    """Square 0/1 matrix; entry (i, j) = 1 allows symbol j after symbol i."""

    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Sequence[Sequence[int]]):
        rws = tuple(tuple(int(v) for v in r) for r in rows)
        n = len(rws)
        if n == 0 or any(len(r) != n for r in rws):
            raise ValueError("transition matrix must be square and nonempty")
        if any(v not in (0, 1) for r in rws for v in r):
            raise ValueError("entries must be 0 or 1")
        object.__setattr__(self, "rows", rws)

    @property
    def n(self) -> int:
        return len(self.rows)

    def allows(self, i: int, j: int) -> bool:
        return self.rows[i][j] == 1

    def _reachable(self, start: int, transpose: bool) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(self.n):
                edge = self.rows[j][i] if transpose else self.rows[i][j]
                if edge and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def is_irreducible(self) -> bool:
        full = set(range(self.n))
        return (self._reachable(0, False) == full
                and self._reachable(0, True) == full)

    def is_primitive(self) -> bool:
        """Some boolean power is strictly positive (irreducible and
        aperiodic); the power never needs to exceed n^2 - 2n + 2."""
        if not self.is_irreducible():
            return False
        cur = [[bool(v) for v in r] for r in self.rows]
        limit = self.n * self.n - 2 * self.n + 2
        for _ in range(max(limit, 1)):
            if all(all(r) for r in cur):
                return True
            cur = [[any(cur[i][m] and self.rows[m][j] for m in range(self.n))
                    for j in range(self.n)] for i in range(self.n)]
        return all(all(r) for r in cur)

    def numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def to_json(self) -> dict:
        return {"rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "TransitionMatrix":
        return cls(data["rows"])


def transition_from_adjacency(adjacency: Sequence[Sequence[int]]) -> TransitionMatrix:
    """Build a transition matrix from successor lists.

    ``adjacency[i]`` lists the states reachable from state i in one
    step, so ``[[0, 1], [0]]`` is the golden-mean shift.
    """
    n = len(adjacency)
    if n == 0:
        raise ValueError("adjacency list must name at least one state")
    rows = [[0] * n for _ in range(n)]
    for i, succs in enumerate(adjacency):
        for j in succs:
            if not isinstance(j, int) or not 0 <= j < n:
                raise ValueError(
                    f"successor {j!r} of state {i} is not a state index in 0..{n - 1}"
                )
            rows[i][j] = 1
    return TransitionMatrix(rows)


def golden_mean_transition() -> TransitionMatrix:
    """No two consecutive 1s: entropy log((1+sqrt 5)/2)."""
    return TransitionMatrix(((1, 1), (1, 0)))


def full_shift_transition(n: int) -> TransitionMatrix:
    return TransitionMatrix(tuple(tuple(1 for _ in range(n)) for _ in range(n)))


@dataclass(frozen=True)
class PerronData:
    h: float
    value: float
    right: tuple[float, ...]
    left: tuple[float, ...]
    residual: float
    mixing: bool
    normalization: str

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "value": self.value,
            "right": list(self.right),
            "left": list(self.left),
            "residual": self.residual,
            "mixing": self.mixing,
            "normalization": self.normalization,
        }


def _power_iterate(M: np.ndarray, tol: float = 1e-15,
                   max_iter: int = 20000) -> np.ndarray:
    v = np.ones(M.shape[0])
    for _ in range(max_iter):
        w = M @ v
        w = w / np.max(w)
        if float(np.max(np.abs(w - v))) < tol:
            return w
        v = w
    return v


def _noncommunicating_witness(T: TransitionMatrix) -> str:
    full = set(range(T.n))
    fwd = T._reachable(0, False)
    if fwd != full:
        j = min(full - fwd)
        return f"no path from state 0 to state {j}"
    bwd = T._reachable(0, True)
    j = min(full - bwd)
    return f"no path from state {j} to state 0"


def entropy_sft(T: TransitionMatrix) -> PerronData:
    """Topological entropy log(Perron value) of an irreducible shift.

    Power iteration runs on T + I, whose spectral gap is strict even when
    T itself is periodic; the Perron value of T is recovered by
    subtracting one.  The right eigenvector is scaled to minimum entry
    one, the left to unit pairing with the right.
    """
    if not T.is_irreducible():
        raise ValueError(f"transition matrix is reducible: "
                         f"{_noncommunicating_witness(T)}")
    M = T.numpy()
    shifted = M + np.eye(T.n)
    v = _power_iterate(shifted)
    lam = float(np.max(shifted @ v) - 1.0)
    v = v / np.min(v)
    residual = float(np.max(np.abs(M @ v - lam * v)))

    u = _power_iterate(shifted.T)
    u = u / float(u @ v)
    residual = max(residual, float(np.max(np.abs(u @ M - lam * u))))
    if residual >= 1e-12 * max(lam, 1.0):
        raise ArithmeticError(f"Perron residual {residual:.2e} too large")
    return PerronData(
        h=math.log(lam),
        value=lam,
        right=tuple(float(x) for x in v),
        left=tuple(float(x) for x in u),
        residual=residual,
        mixing=T.is_primitive(),
        normalization="right eigenvector scaled to minimum entry one; "
                      "left scaled to unit pairing with right",
    )


def _word_states(T: TransitionMatrix, word: Sequence[int] | str) -> list[int]:
    if isinstance(word, str):
        states = [int(ch) for ch in word]
    else:
        states = [int(s) for s in word]
    if not states:
        raise InadmissibleWordError("empty word")
    if any(not (0 <= s < T.n) for s in states):
        raise InadmissibleWordError(f"symbols must lie in 0..{T.n - 1}")
    for a, b in zip(states, states[1:]):
        if not T.allows(a, b):
            raise InadmissibleWordError(f"transition {a}->{b} is forbidden")
    return states


def word_weight(T: TransitionMatrix, word: Sequence[int] | str,
                data: PerronData | None = None) -> float:
    """Maximal-entropy weight value^{-(n-1)} * right[last symbol]."""
    if data is None:
        data = entropy_sft(T)
    states = _word_states(T, word)
    return data.value ** (-(len(states) - 1)) * data.right[states[-1]]


# The weight of a cylinder under the measure of maximal entropy; alias kept
# so callers can name the construction rather than the formula.
rs_unstable_weight = word_weight


def enumerate_weights(T: TransitionMatrix, max_len: int,
                      data: PerronData | None = None) -> Iterator[tuple[str, float]]:
    """All admissible words up to max_len with their weights, by length
    then lexicographically."""
    if data is None:
        data = entropy_sft(T)
    level = [((s,), data.right[s]) for s in range(T.n)]
    for word, w in level:
        yield "".join(map(str, word)), w
    for _ in range(max_len - 1):
        nxt = []
        for word, w in level:
            last = word[-1]
            for s in range(T.n):
                if T.allows(last, s):
                    nxt.append((word + (s,),
                                w / data.value * data.right[s] / data.right[last]))
        level = nxt
        for word, w in level:
            yield "".join(map(str, word)), w


def verify_weight_laws(T: TransitionMatrix, max_len: int = 12) -> dict:
    """Check the cylinder-weight laws over all admissible words.

    Additivity: the one-symbol extensions of w carry weights summing to
    the weight of w.  Pushforward: prepending any admissible symbol
    multiplies the weight by e^{-h}.  Positivity and vanishing: every
    weight is strictly positive and the largest weight at each length
    decreases geometrically.
    """
    data = entropy_sft(T)
    words = {w: val for w, val in enumerate_weights(T, max_len, data)}
    worst_add = 0.0
    worst_push = 0.0
    checked = 0
    decay = math.exp(-data.h)
    for w, val in words.items():
        if len(w) >= max_len:
            continue
        ext = [words[w + str(s)] for s in range(T.n)
               if T.allows(int(w[-1]), s)]
        worst_add = max(worst_add, abs(sum(ext) - val))
        for a in range(T.n):
            if T.allows(a, int(w[0])):
                worst_push = max(worst_push,
                                 abs(words[str(a) + w] - decay * val))
        checked += 1
    max_by_len: dict[int, float] = {}
    for w, val in words.items():
        if val <= 0.0:
            raise ArithmeticError(f"nonpositive weight for word {w!r}")
        max_by_len[len(w)] = max(max_by_len.get(len(w), 0.0), val)
    lengths = sorted(max_by_len)
    vanishing = all(max_by_len[b] < max_by_len[a]
                    for a, b in zip(lengths, lengths[1:])) if data.h > 0 else True
    return {"max_len": max_len, "words": len(words), "checked": checked,
            "max_additivity_defect": worst_add,
            "max_pushforward_defect": worst_push,
            "weights_positive": True,
            "max_weight_vanishing": vanishing}


# ---------------------------------------------------------------------------
# Signed unstable length for linear models


def expanding_eigenvalue(matrix: IntMatrix) -> float:
    """The unique real eigenvalue of modulus > 1, required simple and with
    no other expanding eigenvalue (complex expanding pairs are refused:
    they admit no signed length)."""
    from .linalg import _char_roots
    with mp.workdps(60):
        expanding = [(r, mult) for r, mult in _char_roots(matrix.rows)
                     if abs(r) > 1.0 + 1e-9]
        if len(expanding) != 1 or expanding[0][1] != 1:
            raise ValueError("need exactly one simple expanding eigenvalue")
        r = expanding[0][0]
        if abs(mp.im(r)) > mp.mpf("1e-30"):
            raise ValueError("expanding eigenvalue must be real")
        return float(mp.re(r))


def _polish_eigvec(M: np.ndarray, lam: float) -> np.ndarray:
    k = M.shape[0]
    _, _, vt = np.linalg.svd(M - lam * np.eye(k))
    v = vt[-1]
    shift = lam * (1.0 + 1e-12) + 1e-13
    for _ in range(3):
        try:
            w = np.linalg.solve(M - shift * np.eye(k), v)
        except np.linalg.LinAlgError:
            break
        v = w / np.linalg.norm(w)
    return v


def unstable_direction(matrix: IntMatrix) -> np.ndarray:
    """Expanding eigenvector scaled so its first nonzero component is 1."""
    lam = expanding_eigenvalue(matrix)
    v = _polish_eigvec(matrix.numpy(), lam)
    nz = int(np.argmax(np.abs(v) > 1e-9))
    return v / v[nz]


def unstable_functional(matrix: IntMatrix) -> np.ndarray:
    """Row vector psi with psi A = lambda psi and psi(v) = 1 for the
    normalized expanding eigenvector v: the signed-length functional."""
    lam = expanding_eigenvalue(matrix)
    psi = _polish_eigvec(matrix.numpy().T, lam)
    v = unstable_direction(matrix)
    return psi / float(psi @ v)


def unstable_length(matrix: IntMatrix, w: Sequence[int] | Sequence[float],
                    psi: np.ndarray | None = None) -> float:
    """Signed unstable length of a displacement in the linear model."""
    if psi is None:
        psi = unstable_functional(matrix)
    return float(psi @ np.asarray(w, dtype=float))


@dataclass(frozen=True)
class LinearModelPath:
    """Piecewise-linear lifted path for a linear model: finitely many
    vertices in the cover.  Only the endpoints matter for the signed
    unstable length; that independence is itself one of the tested laws.
    """

    matrix: IntMatrix
    vertices: tuple[tuple[float, ...], ...]

    def __init__(self, matrix: IntMatrix, vertices: Sequence[Sequence[float]]):
        verts = tuple(tuple(float(c) for c in v) for v in vertices)
        if len(verts) < 2:
            raise ValueError("a path needs at least two vertices")
        if any(len(v) != matrix.k for v in verts):
            raise ValueError("vertex dimension must match the matrix")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "vertices", verts)

    def displacement(self) -> np.ndarray:
        return np.array(self.vertices[-1]) - np.array(self.vertices[0])

    def is_closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def reversed(self) -> "LinearModelPath":
        return LinearModelPath(self.matrix, tuple(reversed(self.vertices)))

    def mapped(self) -> "LinearModelPath":
        """Image path under the model matrix."""
        A = self.matrix.numpy()
        return LinearModelPath(self.matrix,
                               tuple(tuple(A @ np.array(v)) for v in self.vertices))

    def to_json(self) -> dict:
        return {"matrix": self.matrix.to_json(),
                "vertices": [list(v) for v in self.vertices]}


def path_unstable_length(path: LinearModelPath,
                         psi: np.ndarray | None = None) -> float:
    """Signed unstable length of a piecewise-linear path: the summed
    segment lengths telescope into the endpoint displacement."""
    if psi is None:
        psi = unstable_functional(path.matrix)
    total = 0.0
    for a, b in zip(path.vertices, path.vertices[1:]):
        total += float(psi @ (np.array(b) - np.array(a)))
    return total


def unstable_length_scaling_check(path: LinearModelPath,
                                  psi: np.ndarray | None = None) -> tuple[float, float]:
    """Lengths of a path and of its image under the model matrix; the
    ratio is the expanding eigenvalue."""
    if psi is None:
        psi = unstable_functional(path.matrix)
    return path_unstable_length(path, psi), path_unstable_length(path.mapped(), psi)


def unstable_length_laws(matrix: IntMatrix, samples: int = 500,
                         seed: int = 0, span: int = 1000) -> dict:
    """Largest defects of linearity, sign antisymmetry, and the scaling
    law length(A w) = lambda * length(w) over random integer vectors."""
    rng = np.random.default_rng(seed)
    lam = expanding_eigenvalue(matrix)
    psi = unstable_functional(matrix)
    k = matrix.k
    worst_lin = 0.0
    worst_sign = 0.0
    worst_scale = 0.0
    for _ in range(samples):
        w1 = rng.integers(-span, span + 1, k)
        w2 = rng.integers(-span, span + 1, k)
        l1 = unstable_length(matrix, w1, psi)
        l2 = unstable_length(matrix, w2, psi)
        worst_lin = max(worst_lin,
                        abs(unstable_length(matrix, w1 + w2, psi) - (l1 + l2)))
        worst_sign = max(worst_sign, abs(unstable_length(matrix, -w1, psi) + l1))
        aw = np.array(matrix.apply(tuple(int(c) for c in w1)), dtype=float)
        worst_scale = max(worst_scale,
                          abs(unstable_length(matrix, aw, psi) - lam * l1))
    return {"samples": samples, "eigenvalue": lam,
            "max_linearity_defect": worst_lin,
            "max_sign_defect": worst_sign,
            "max_scaling_defect": worst_scale}
