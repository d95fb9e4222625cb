"""Attractor classification from sampled orbit data.

A small family of built-in dynamical systems is sampled along long
orbits.  Two observables are estimated from the sample, the
box-counting dimension of the attractor and the Lyapunov spectrum,
and the pair (attractor dimension, expanding dimension) is mapped to
one of five topological classes.  Every estimate carries a quality
figure and the pipeline refuses to classify when the figures fall
below the configured thresholds.

Expanding coordinates are advanced in exact modular arithmetic on a
fine odd-prime grid.  Floating iteration of an expanding circle or
torus map sheds one trailing mantissa bit per step, so after roughly
fifty steps the orbit collapses onto the dyadic fixed set; exact
residues on the q-grid cost the same and stay on a genuine orbit.
"""

from __future__ import annotations

import json
import math
import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .conjugacy import PerturbedToral, SmaleSystem, default_perturbation
from .linalg import IntMatrix, check_hyperbolic

# Prime modulus for exact expanding orbits.  2 is a primitive root mod q,
# so the angle-doubling orbit has period q - 1 (about 2e9), far beyond any
# sample length used here; hyperbolic integer matrices likewise have huge
# orbit periods on the q-grid.
_GRID_MODULUS = 2_000_000_011

_BUILTINS = (
    "smale_solenoid",
    "toral_auto",
    "toral_times_contraction",
    "fixed_point_sink",
    "perturbed_toral",
)

_CLASS_TABLE = {
    (0, 0): "attracting-fixed-point",
    (1, 1): "generalized-1-solenoid",
    (2, 1): "torus-T2-automorphism",
    (2, 2): "codim1-expanding",
    (3, 1): "anosov-T3",
    (3, 2): "anosov-T3",
}

SCHEMA_VERSION = "1"


class InvalidSpecError(ValueError):
    """The map specification is malformed or describes no valid system."""


class InvalidCombinationError(InvalidSpecError):
    """The requested dimension pair admits no hyperbolic attractor."""


class EstimatorQualityError(RuntimeError):
    """An estimate failed its quality gate and cannot be trusted."""


class DivergenceError(EstimatorQualityError):
    """An orbit left the ambient bounds of its system."""


@dataclass(frozen=True)
class ClassifierConfig:
    """Quality gates and rounding thresholds for the report pipeline.

    ``exponent_margin`` is the half-width of the dead zone around zero
    inside which a Lyapunov exponent is considered unresolved.
    ``residual_threshold`` rounds the transverse part of the box
    dimension: with the strict convention a residual must exceed
    threshold + n to contribute n + 1 transverse directions, so a
    solenoid residual of exactly 0.5 contributes none.
    """

    exponent_margin: float = 0.05
    residual_threshold: float = 0.5
    residual_strict: bool = True
    r2_min: float = 0.9
    sink_diameter: float = 1e-6
    box_levels: tuple[int, int] | None = None

    def __post_init__(self):
        if not 0.0 < self.exponent_margin < 0.5:
            raise InvalidSpecError("exponent_margin must lie in (0, 0.5)")
        if not 0.0 <= self.residual_threshold < 1.0:
            raise InvalidSpecError("residual_threshold must lie in [0, 1)")
        if not 0.0 < self.r2_min <= 1.0:
            raise InvalidSpecError("r2_min must lie in (0, 1]")
        if self.sink_diameter <= 0.0:
            raise InvalidSpecError("sink_diameter must be positive")
        if self.box_levels is not None:
            lo, hi = self.box_levels
            if lo < 1 or hi <= lo:
                raise InvalidSpecError("box_levels must be (lo, hi) with 1 <= lo < hi")

    def to_json(self) -> dict:
        return {
            "exponent_margin": self.exponent_margin,
            "residual_threshold": self.residual_threshold,
            "residual_strict": self.residual_strict,
            "r2_min": self.r2_min,
            "sink_diameter": self.sink_diameter,
            "box_levels": list(self.box_levels) if self.box_levels else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassifierConfig":
        kwargs = dict(data)
        if kwargs.get("box_levels") is not None:
            kwargs["box_levels"] = tuple(kwargs["box_levels"])
        return cls(**kwargs)


@dataclass(frozen=True)
class MapSpec:
    """One of the built-in systems together with its parameters.

    builtin            ambient  parameters
    smale_solenoid        3      lam_c, c_off
    toral_auto            k      matrix (k x k, hyperbolic)
    toral_times_contraction  k+1 matrix, rate in (0, 1)
    fixed_point_sink      3      rate in (0, 1)
    perturbed_toral       k      matrix, eps >= 0
    """

    builtin: str
    matrix: IntMatrix | None = None
    rate: float = 0.5
    eps: float = 0.05
    lam_c: float = 0.25
    c_off: float = 0.5

    def __post_init__(self):
        if self.builtin not in _BUILTINS:
            raise InvalidSpecError(
                f"unknown builtin {self.builtin!r}; choose one of {', '.join(_BUILTINS)}"
            )
        if self.builtin == "smale_solenoid":
            if not 0.0 < self.lam_c < 0.5:
                raise InvalidSpecError("lam_c must lie in (0, 1/2)")
            if self.lam_c + self.c_off > 1.0:
                raise InvalidSpecError("lam_c + c_off must not exceed 1")
        if self.builtin in ("toral_auto", "toral_times_contraction", "perturbed_toral"):
            if self.matrix is None:
                object.__setattr__(self, "matrix", IntMatrix([[2, 1], [1, 1]]))
            report = check_hyperbolic(self.matrix)
            if not report.is_hyperbolic:
                raise InvalidSpecError(
                    "matrix has an eigenvalue of modulus 1 and induces no "
                    "hyperbolic toral map"
                )
            if abs(self.matrix.det()) != 1:
                raise InvalidSpecError(
                    "matrix must be unimodular to act invertibly on the torus"
                )
        if self.builtin in ("toral_times_contraction", "fixed_point_sink"):
            if not 0.0 < self.rate < 1.0:
                raise InvalidSpecError("rate must lie in (0, 1)")
        if self.builtin == "perturbed_toral":
            if self.eps < 0.0:
                raise InvalidSpecError("eps must be nonnegative")
            if self.matrix.k != 2:
                raise InvalidSpecError("perturbed_toral is defined for 2 x 2 matrices")

    @property
    def ambient_dim(self) -> int:
        if self.builtin == "smale_solenoid":
            return 3
        if self.builtin == "toral_auto":
            return self.matrix.k
        if self.builtin == "toral_times_contraction":
            return self.matrix.k + 1
        if self.builtin == "fixed_point_sink":
            return 3
        return self.matrix.k

    def to_json(self) -> dict:
        out: dict = {"builtin": self.builtin}
        if self.builtin == "smale_solenoid":
            out["lam_c"] = self.lam_c
            out["c_off"] = self.c_off
        if self.builtin in ("toral_auto", "toral_times_contraction", "perturbed_toral"):
            out["matrix"] = self.matrix.to_json()
        if self.builtin in ("toral_times_contraction", "fixed_point_sink"):
            out["rate"] = self.rate
        if self.builtin == "perturbed_toral":
            out["eps"] = self.eps
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MapSpec":
        if not isinstance(data, dict) or "builtin" not in data:
            raise InvalidSpecError("a map spec is an object with a 'builtin' key")
        known = {"builtin", "matrix", "rate", "eps", "lam_c", "c_off"}
        extra = set(data) - known
        if extra:
            raise InvalidSpecError(f"unknown map spec keys: {sorted(extra)}")
        kwargs = dict(data)
        if kwargs.get("matrix") is not None:
            try:
                kwargs["matrix"] = IntMatrix.from_json(kwargs["matrix"])
            except (TypeError, ValueError) as e:
                raise InvalidSpecError(f"bad matrix: {e}") from e
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise InvalidSpecError(str(e)) from e


@dataclass(frozen=True)
class OrbitCloud:
    """Sampled orbit after a discarded transient."""

    spec: MapSpec
    points: np.ndarray
    transient: int
    seed: int

    @property
    def count(self) -> int:
        return len(self.points)

    def diameter(self) -> float:
        """Length of the bounding-box diagonal."""
        if len(self.points) == 0:
            return 0.0
        span = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.linalg.norm(span))

    def to_csv(self, stream) -> None:
        header = ",".join(f"x{i}" for i in range(self.points.shape[1]))
        np.savetxt(stream, self.points, delimiter=",", header=header, comments="")


def _start_residues(rng: np.random.Generator, k: int) -> np.ndarray:
    # nonzero residues: 0 is a fixed point of every linear map on the grid
    return rng.integers(1, _GRID_MODULUS, size=k, dtype=np.int64)


def _check_finite(x: np.ndarray, index: int, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"iterate {index} of {name} left the ambient bounds")


def _orbit_machine(
    spec: MapSpec, seed: int
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (point, tangent matrix at that point) along one orbit.

    The generator is infinite and deterministic in ``seed``.  Torus and
    angle coordinates live on the exact q-grid; contracting fibers are
    floating point, which is safe because errors there shrink.
    """
    rng = np.random.default_rng(seed)
    q = _GRID_MODULUS
    index = 0
    if spec.builtin == "smale_solenoid":
        system = SmaleSystem(lam_c=spec.lam_c, c_off=spec.c_off)
        t = int(_start_residues(rng, 1)[0])
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        while True:
            tf = t / q
            point = np.array([tf, z.real, z.imag])
            _check_finite(point, index, spec.builtin)
            if abs(z) > 1.0 + 1e-9:
                raise DivergenceError(
                    f"iterate {index} of {spec.builtin} left the solid torus"
                )
            yield point, system.tangent(tf, z)
            z = system.lam_c * z + system.c_off * cmath.exp(2j * math.pi * tf)
            t = (2 * t) % q
            index += 1
    elif spec.builtin == "toral_auto":
        a = spec.matrix.numpy().astype(np.int64)
        _check_grid_overflow(a)
        tangent = spec.matrix.numpy()
        v = _start_residues(rng, spec.matrix.k)
        while True:
            point = v / q
            yield point, tangent
            v = (a @ v) % q
            index += 1
    elif spec.builtin == "toral_times_contraction":
        a = spec.matrix.numpy().astype(np.int64)
        _check_grid_overflow(a)
        k = spec.matrix.k
        tangent = np.zeros((k + 1, k + 1))
        tangent[:k, :k] = spec.matrix.numpy()
        tangent[k, k] = spec.rate
        v = _start_residues(rng, k)
        zf = float(rng.uniform(-1.0, 1.0))
        while True:
            point = np.concatenate([v / q, [zf]])
            _check_finite(point, index, spec.builtin)
            yield point, tangent
            v = (a @ v) % q
            zf *= spec.rate
            index += 1
    elif spec.builtin == "fixed_point_sink":
        tangent = spec.rate * np.eye(3)
        x = rng.uniform(-1.0, 1.0, size=3)
        while True:
            _check_finite(x, index, spec.builtin)
            yield x.copy(), tangent
            x = spec.rate * x
            index += 1
    else:  # perturbed_toral: the sine term refreshes low-order bits each step
        system = PerturbedToral(
            matrix=spec.matrix,
            p=default_perturbation(spec.eps),
            p_sup=spec.eps / (2.0 * math.pi),
            p_lip=spec.eps,
        )
        a = spec.matrix.numpy()
        x = rng.uniform(0.0, 1.0, size=2)
        while True:
            _check_finite(x, index, spec.builtin)
            tangent = a.copy()
            tangent[0, 1] += spec.eps * math.cos(2.0 * math.pi * x[1])
            yield x.copy(), tangent
            x = system.step(x)
            index += 1


def _check_grid_overflow(a: np.ndarray) -> None:
    bound = int(np.abs(a).sum(axis=1).max()) * _GRID_MODULUS
    if bound >= 2**62:
        raise InvalidSpecError(
            "matrix entries are too large for exact 64-bit grid arithmetic"
        )


def generate_orbit(
    spec: MapSpec, transient: int = 100, count: int = 10_000, seed: int = 0
) -> OrbitCloud:
    """Sample ``count`` consecutive orbit points after ``transient`` steps."""
    if count < 1:
        raise InvalidSpecError("count must be at least 1")
    if transient < 0:
        raise InvalidSpecError("transient must be nonnegative")
    machine = _orbit_machine(spec, seed)
    points = np.empty((count, spec.ambient_dim))
    for i in range(transient + count):
        point, _ = next(machine)
        if i >= transient:
            points[i - transient] = point
    return OrbitCloud(spec=spec, points=points, transient=transient, seed=seed)


def box_counting_dimension(
    cloud: "OrbitCloud | np.ndarray",
    scale_min: float,
    scale_max: float,
    levels: int = 8,
    r2_min: float = 0.9,
) -> tuple[float, float]:
    """Least-squares box-counting dimension over dyadic scales.

    Counts occupied boxes at every dyadic scale 2^-l inside
    [scale_min, scale_max] (at most ``levels`` of them, finest first
    dropped) and fits log N against log 1/eps.  Returns the slope and
    the r^2 of the fit; raises EstimatorQualityError rather than
    returning a slope whose r^2 is below ``r2_min``.
    """
    points = cloud.points if isinstance(cloud, OrbitCloud) else np.asarray(cloud, float)
    if points.ndim != 2 or len(points) == 0:
        raise InvalidSpecError("cloud must be a nonempty (count, dim) array")
    if not 0.0 < scale_min < scale_max:
        raise InvalidSpecError("scales must satisfy 0 < scale_min < scale_max")
    lo = math.ceil(-math.log2(scale_max) - 1e-9)
    hi = math.floor(-math.log2(scale_min) + 1e-9)
    exponents = list(range(lo, hi + 1))[:levels]
    if len(exponents) < 2:
        raise InvalidSpecError(
            "need at least 2 dyadic scales between scale_min and scale_max"
        )
    # snap to a grid 2^-26 below the finest scale: coordinates separated
    # only by measurement dust (a contracted fiber hovering at -1e-31 and
    # -0.0, say) must not straddle a box boundary and double the count
    quantum = scale_min * 2.0 ** -26
    points = np.round(points / quantum) * quantum
    xs, ys = [], []
    for l in exponents:
        eps = 2.0 ** -l
        occupied = np.unique(np.floor(points / eps).astype(np.int64), axis=0)
        xs.append(l * math.log(2.0))
        ys.append(math.log(len(occupied)))
    xs_a = np.array(xs)
    ys_a = np.array(ys)
    if np.ptp(ys_a) == 0.0:
        # constant counts: exactly fit by the constant, dimension zero
        return 0.0, 1.0
    slope, intercept = np.polyfit(xs_a, ys_a, 1)
    pred = slope * xs_a + intercept
    ss_res = float(np.sum((ys_a - pred) ** 2))
    ss_tot = float(np.sum((ys_a - ys_a.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    if r2 < r2_min:
        raise EstimatorQualityError(
            f"box-count fit has r^2 = {r2:.4f} < {r2_min}; the sample does not "
            "scale like a single power law over the requested range"
        )
    return float(slope), r2


def lyapunov_spectrum(
    spec: MapSpec,
    steps: int = 4000,
    seed: int = 0,
    transient: int = 100,
) -> np.ndarray:
    """Lyapunov exponents in descending order, by QR reorthonormalization."""
    exponents, _ = _lyapunov_with_restarts(spec, steps, seed, transient)
    return exponents


def _lyapunov_with_restarts(
    spec: MapSpec, steps: int, seed: int, transient: int
) -> tuple[np.ndarray, int]:
    if steps < 1:
        raise InvalidSpecError("steps must be at least 1")
    last_error = None
    for attempt in range(4):
        try:
            return _lyapunov_once(spec, steps, seed + 1009 * attempt, transient), attempt
        except _DegenerateFrame as e:
            last_error = e
    raise EstimatorQualityError(
        f"tangent frame degenerated for 4 starting seeds: {last_error}"
    )


class _DegenerateFrame(Exception):
    pass


def _lyapunov_once(spec: MapSpec, steps: int, seed: int, transient: int) -> np.ndarray:
    machine = _orbit_machine(spec, seed)
    for _ in range(transient):
        next(machine)
    dim = spec.ambient_dim
    basis = np.eye(dim)
    sums = np.zeros(dim)
    for _ in range(steps):
        _, tangent = next(machine)
        basis = tangent @ basis
        basis, r = np.linalg.qr(basis)
        diag = np.abs(np.diag(r))
        if not np.all(np.isfinite(diag)) or np.any(diag < 1e-300):
            raise _DegenerateFrame("a tangent direction collapsed to zero")
        # keep the frame orientation stable so column order is preserved
        signs = np.sign(np.diag(r))
        basis = basis * signs
        sums += np.log(diag)
    return np.sort(sums / steps)[::-1]


def classify(dim_lambda: int, dim_eu: int) -> str:
    """Topological class of a hyperbolic attractor of dimension
    ``dim_lambda`` whose unstable bundle has rank ``dim_eu``.

    Total on {0..3} x {0..2}: the six geometrically meaningful pairs
    map to five class labels and the six impossible pairs raise
    InvalidCombinationError naming the violated constraint.
    """
    if not isinstance(dim_lambda, int) or not isinstance(dim_eu, int):
        raise InvalidSpecError("dimensions must be integers")
    if not 0 <= dim_lambda <= 3:
        raise InvalidSpecError("dim_lambda must lie in 0..3")
    if not 0 <= dim_eu <= 2:
        raise InvalidSpecError("dim_eu must lie in 0..2")
    if dim_eu > dim_lambda:
        raise InvalidCombinationError(
            f"the unstable bundle has rank {dim_eu} but lies inside a "
            f"{dim_lambda}-dimensional attractor; the expanding dimension "
            "cannot exceed the attractor dimension"
        )
    if dim_eu == 0 and dim_lambda >= 1:
        raise InvalidCombinationError(
            f"a {dim_lambda}-dimensional hyperbolic attractor expands along "
            "its unstable bundle; only a periodic sink has no expanding "
            "direction"
        )
    # dim_lambda == 1 forces dim_eu == 1: a one-dimensional attractor is a
    # union of unstable arcs.  Both violations are caught above.
    return _CLASS_TABLE[(dim_lambda, dim_eu)]


def _transverse_count(residual: float, config: ClassifierConfig) -> int:
    """Round the transverse box residual to a count of contracted
    directions inside the attractor.  Strict convention: a residual of
    exactly threshold + n contributes n."""
    shifted = residual - config.residual_threshold
    if config.residual_strict:
        s = math.ceil(shifted - 1e-12)
    else:
        s = math.floor(shifted + 1e-12) + 1 if shifted >= -1e-12 else 0
    return max(0, s)


_DEFAULT_LEVELS = {
    "smale_solenoid": (3, 6),
    "toral_times_contraction": (3, 6),
    "fixed_point_sink": (3, 6),
    "perturbed_toral": (3, 6),
}


def _default_levels(spec: MapSpec) -> tuple[int, int]:
    if spec.builtin == "toral_auto":
        # coarser boxes in higher ambient dimension keep the finest level
        # well below saturation for the default sample size
        return (3, 6) if spec.matrix.k == 2 else (2, 4)
    return _DEFAULT_LEVELS[spec.builtin]


@dataclass(frozen=True)
class AttractorReport:
    """Everything the classifier measured, decided, and assumed."""

    spec: MapSpec
    class_label: str
    dim_lambda: int
    dim_eu: int
    box_dimension: float
    box_r2: float
    lyapunov: tuple[float, ...]
    is_sink: bool
    provenance: dict

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec.to_json(),
            "class_label": self.class_label,
            "dim_lambda": self.dim_lambda,
            "dim_eu": self.dim_eu,
            "box_dimension": self.box_dimension,
            "box_r2": self.box_r2,
            "lyapunov": list(self.lyapunov),
            "is_sink": self.is_sink,
            "provenance": self.provenance,
        }

    def to_json_str(self) -> str:
        # sorted keys and exact float repr make equal reports byte-identical
        return json.dumps(self.to_json(), sort_keys=True)


def report(
    spec: MapSpec,
    config: ClassifierConfig | None = None,
    seed: int = 0,
    transient: int = 100,
    count: int = 100_000,
    steps: int = 4000,
) -> AttractorReport:
    """Run the full pipeline: sample, estimate, round, classify.

    Deterministic: the same spec, seed, and configuration produce a
    byte-identical JSON report.  Estimator failures carry the name of
    the stage that produced them.
    """
    config = config or ClassifierConfig()

    def stage(name: str, fn: Callable):
        try:
            return fn()
        except (InvalidSpecError, EstimatorQualityError) as e:
            raise type(e)(f"{name}: {e}") from e

    cloud = stage("generate", lambda: generate_orbit(spec, transient, count, seed))
    lo, hi = config.box_levels or _default_levels(spec)
    box_dim, box_r2 = stage(
        "box-count",
        lambda: box_counting_dimension(
            cloud, 2.0 ** -hi, 2.0 ** -lo, hi - lo + 1, config.r2_min
        ),
    )
    spectrum, restarts = stage(
        "lyapunov", lambda: _lyapunov_with_restarts(spec, steps, seed, transient)
    )
    margin = config.exponent_margin
    unresolved = [x for x in spectrum if -margin <= x <= margin]
    if unresolved:
        raise EstimatorQualityError(
            f"lyapunov: exponent {unresolved[0]:.6f} lies within {margin} of "
            "zero; the sampled system is not resolved as hyperbolic"
        )
    dim_eu = int(np.sum(spectrum > margin))
    is_sink = cloud.diameter() < config.sink_diameter
    if is_sink:
        dim_lambda = 0
    else:
        residual = box_dim - dim_eu
        dim_lambda = min(dim_eu + _transverse_count(residual, config), spec.ambient_dim)
    label = stage("classify", lambda: classify(dim_lambda, dim_eu))
    provenance = {
        "seed": seed,
        "transient": transient,
        "count": count,
        "steps": steps,
        "box_levels": [lo, hi],
        "config": config.to_json(),
        "lyapunov_restarts": restarts,
        "grid_modulus": _GRID_MODULUS,
    }
    return AttractorReport(
        spec=spec,
        class_label=label,
        dim_lambda=dim_lambda,
        dim_eu=dim_eu,
        box_dimension=box_dim,
        box_r2=box_r2,
        lyapunov=tuple(float(x) for x in spectrum),
        is_sink=is_sink,
        provenance=provenance,
    )


def report_many(
    specs: Sequence[MapSpec],
    config: ClassifierConfig | None = None,
    seed: int = 0,
    max_workers: int = 4,
    **kwargs,
) -> list[AttractorReport]:
    """Independent reports for several specs, in the given order."""
    with ThreadPoolExecutor(max_workers=min(max_workers, max(len(specs), 1))) as pool:
        futures = [
            pool.submit(report, spec, config, seed + i, **kwargs)
            for i, spec in enumerate(specs)
        ]
        return [f.result() for f in futures]
