"""End-to-end acceptance checks, one per shipped guarantee.

Each test exercises one guarantee at its pinned tolerance and prints a
single pass or fail line (run with ``pytest -s`` to see them inline).
The tolerances here are contractual: loosening them weakens what the
package promises, so they must not be edited to make a failing check
green.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from soldyn.classify import (
    InvalidCombinationError,
    MapSpec,
    classify,
    lyapunov_spectrum,
    report_many,
)
from soldyn.conjugacy import (
    PerturbedToral,
    default_perturbation,
    perturbed_anosov_conjugacy,
    perturbed_conjugacy_report,
    smale_conjugacy_report,
    solenoid_to_attractor,
)
from soldyn.cover import verify_cover_identities
from soldyn.linalg import IntMatrix, TorusPoint, toral_entropy
from soldyn.mme import (
    LinearModelPath,
    entropy_sft,
    enumerate_weights,
    expanding_eigenvalue,
    full_shift_transition,
    golden_mean_transition,
    path_unstable_length,
    unstable_functional,
    word_weight,
)
from soldyn.shadowing import (
    linear_toral_system,
    sample_pseudo_orbit,
    shadow,
    uniqueness_epsilon,
    verify_shadow,
)
from soldyn.solenoid import (
    Exact,
    Infinite,
    Interval,
    act,
    add,
    d_sigma,
    identity_point,
    neg,
    random_point,
    shift,
)

DOUBLE = IntMatrix([[2]])
CAT = IntMatrix([[2, 1], [1, 1]])
PLASTIC = IntMatrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]])
PHI = (1 + math.sqrt(5)) / 2
MU_CAT = (3 + math.sqrt(5)) / 2


def _finish(number: int, failures: list[str], detail: str) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"criterion {number}: {status} ({detail})")
    assert not failures, f"criterion {number}: " + "; ".join(failures)


def test_criterion_1_exact_algebra_suite():
    """Action axioms, equivariance, projection, group commutation, and the
    covering identities hold exactly on 1000 rational samples per matrix."""
    t0 = time.monotonic()
    failures: list[str] = []
    for matrix in (DOUBLE, CAT):
        k = matrix.k
        rng = random.Random(17)
        pts = [random_point(matrix, rng) for _ in range(1000)]
        for i, x in enumerate(pts):
            v = [Fraction(rng.randint(-6, 6), rng.randint(1, 9)) for _ in range(k)]
            w = [Fraction(rng.randint(-6, 6), rng.randint(1, 9)) for _ in range(k)]
            vw = [a + b for a, b in zip(v, w)]
            y = pts[(i + 1) % len(pts)]
            ok = (
                act(v, act(w, x)) == act(vw, x)
                and act([0] * k, x) == x
                and shift(act(v, x)) == act(matrix.apply(v), shift(x))
                and act(v, x).coordinate(0) == x.coordinate(0).translate(v)
                and act(v, add(x, y)) == add(act(v, x), y)
                and neg(act(v, x)) == act([-c for c in v], neg(x))
            )
            if not ok:
                failures.append(f"axiom bundle failed at sample {i} for {matrix.rows}")
                break
        entries = verify_cover_identities(matrix, samples=1000, seed=17)
        if len(entries) < 8:
            failures.append(f"identity suite has only {len(entries)} entries")
        for entry in entries:
            if entry["status"] != "pass":
                failures.append(f"{entry['identity']} failed for {matrix.rows}")
    elapsed = time.monotonic() - t0
    if elapsed >= 60.0:
        failures.append(f"took {elapsed:.1f}s, budget 60s")
    _finish(1, failures, f"2x1000 exact samples, 2x1000-sample identity suites, "
                         f"{elapsed:.1f}s")


def test_criterion_2_metric_laws():
    """Leafwise distance: translation invariance and exact halving under
    the shift on 200 resolved pairs; unit translate at distance exactly 1;
    translate by 1/3 off the leaf entirely."""
    failures: list[str] = []
    rng = random.Random(23)
    resolved = 0
    while resolved < 200:
        x = random_point(DOUBLE, rng)
        y = random_point(DOUBLE, rng)
        d = d_sigma(x, y)
        if not isinstance(d, (Exact, Interval)):
            continue
        resolved += 1
        v = [Fraction(rng.randint(1, 9), 8)]
        dt = d_sigma(act(v, x), act(v, y))
        ds = d_sigma(shift(x), shift(y))
        if isinstance(d, Exact):
            if not (isinstance(dt, Exact) and dt.value == d.value):
                failures.append(f"translation changed an exact distance ({d.value})")
            if not (isinstance(ds, Exact) and ds.value == Fraction(d.value, 2)):
                failures.append(f"shift did not halve an exact distance ({d.value})")
        else:
            if not (isinstance(dt, Interval) and dt.lower == d.lower
                    and dt.upper() == d.upper()):
                failures.append("translation changed an interval distance")
            if not (isinstance(ds, Interval) and ds.lower == Fraction(d.lower, 2)
                    and ds.upper() == Fraction(d.upper(), 2)):
                failures.append("shift did not halve an interval distance")
        if failures:
            break
    e = identity_point(DOUBLE)
    d1 = d_sigma(e, act([1], e))
    if not (isinstance(d1, Exact) and d1.value == 1):
        failures.append(f"unit translate has distance {d1!r}, expected exactly 1")
    d3 = d_sigma(e, act([Fraction(1, 3)], e))
    if not isinstance(d3, Infinite):
        failures.append(f"translate by 1/3 resolved to {d3!r}, expected infinite")
    _finish(2, failures, f"{resolved} resolved pairs, exact invariance and halving")


def test_criterion_3_shadowing():
    """Every noisy orbit is shadowed within 2.236 * L + 1e-6 for L = 0.01;
    a true orbit is recovered to 1e-10; distinct orbits separate past the
    uniqueness bound."""
    t0 = time.monotonic()
    failures: list[str] = []
    system = linear_toral_system(CAT)
    rng = np.random.default_rng(0)
    worst_sup = worst_gap = 0.0
    for i in range(100):
        orbit = sample_pseudo_orbit(system, rng, 50, 0.002)
        gap = orbit.gap(system)
        worst_gap = max(worst_gap, gap)
        if gap > 0.01:
            failures.append(f"orbit {i} has gap {gap:.5f} > 0.01")
            break
        result = shadow(system, orbit)
        verified = verify_shadow(system, orbit, result.point)
        worst_sup = max(worst_sup, verified)
        if verified > 2.236 * 0.01 + 1e-6:
            failures.append(f"orbit {i}: sup residual {verified:.6f} over budget")
            break
    exact = sample_pseudo_orbit(system, rng, 50, 0.0)
    recovered = shadow(system, exact)
    dist = system.distance(recovered.point, exact.point(0))
    if dist > 1e-10:
        failures.append(f"zero-noise recovery off by {dist:.2e}")
    for N in (5, 10, 20):
        x0 = 0.3
        y0 = x0 + 2.0 ** -(N + 1)
        xs, ys = [x0], [y0]
        for _ in range(N):
            xs.append((2 * xs[-1]) % 1.0)
            ys.append((2 * ys[-1]) % 1.0)
        sep = max(abs(a - b) for a, b in zip(xs, ys))
        eps = uniqueness_epsilon(C=0.5, c=0.0, K=0.0, lam=0.0, mu=2.0, N=N)
        if sep < eps * 0.5:
            failures.append(f"adversarial pair at N={N} stayed within {sep:.2e}")
    elapsed = time.monotonic() - t0
    if elapsed >= 30.0:
        failures.append(f"took {elapsed:.1f}s, budget 30s")
    _finish(3, failures, f"100 orbits, worst gap {worst_gap:.4f}, worst sup "
                         f"{worst_sup:.4f} <= {2.236 * 0.01 + 1e-6:.4f}, {elapsed:.1f}s")


def test_criterion_4_solid_torus_conjugacy():
    """The chart intertwines the chain shift with the solid-torus map to
    1e-6 at depth 40 on 500 exact points; the fixed chain lands on the
    attractor's fixed point."""
    failures: list[str] = []
    rng = random.Random(1)
    pts = [random_point(DOUBLE, rng) for _ in range(500)]
    rep = smale_conjugacy_report(pts, depth=40)
    if rep["max_residual"] > 1e-6:
        failures.append(f"max residual {rep['max_residual']:.2e} > 1e-6")
    t, z = solenoid_to_attractor(identity_point(DOUBLE), depth=40)
    angle_err = min(t % 1.0, 1.0 - t % 1.0)
    fixed_err = angle_err + abs(z - 2.0 / 3.0)
    if fixed_err > 1e-9:
        failures.append(f"fixed point image off by {fixed_err:.2e}")
    _finish(4, failures, f"{rep['distinct']} distinct chains, max residual "
                         f"{rep['max_residual']:.2e}, fixed point err {fixed_err:.2e}")


def test_criterion_5_perturbed_toral_conjugacy():
    """The linearizing conjugacy for a 0.05-perturbed cat map has residual
    below 1e-6 on 200 samples; the unperturbed map linearizes to the
    identity within 1e-10."""
    failures: list[str] = []
    system = PerturbedToral(
        matrix=CAT,
        p=default_perturbation(0.05),
        p_sup=0.05 / (2.0 * math.pi),
        p_lip=0.05,
    )
    rep = perturbed_conjugacy_report(system, samples=200, seed=0, J=60)
    if rep["max_residual"] > 1e-6:
        failures.append(f"max residual {rep['max_residual']:.2e} > 1e-6")
    flat = PerturbedToral(
        matrix=CAT, p=default_perturbation(0.0), p_sup=0.0, p_lip=0.0
    )
    rng = random.Random(2)
    worst = 0.0
    for _ in range(25):
        x = TorusPoint(
            (Fraction(rng.randint(0, 99), 100), Fraction(rng.randint(0, 99), 101))
        )
        h = perturbed_anosov_conjugacy(flat, x)
        for a, b in zip(h.coords, x.coords):
            gap = abs(float(a - b))
            worst = max(worst, min(gap, 1.0 - gap))
    if worst > 1e-10:
        failures.append(f"eps=0 deviates from the identity by {worst:.2e}")
    _finish(5, failures, f"max residual {rep['max_residual']:.2e}, eps=0 "
                         f"identity deviation {worst:.2e}")


def test_criterion_6_entropy():
    """Closed-form entropies: cat map, golden-mean shift, and the solid
    torus attractor's Lyapunov-based value."""
    failures: list[str] = []
    h_cat = toral_entropy(CAT)
    if abs(h_cat - math.log(MU_CAT)) > 1e-9:
        failures.append(f"toral entropy {h_cat!r} off the closed form")
    h_golden = entropy_sft(golden_mean_transition()).h
    if abs(h_golden - math.log(PHI)) > 1e-9:
        failures.append(f"shift entropy {h_golden!r} off the closed form")
    spectrum = lyapunov_spectrum(MapSpec("smale_solenoid"), steps=4000, seed=0)
    h_lyap = float(sum(x for x in spectrum if x > 0.0))
    if abs(h_lyap - math.log(2.0)) > 1e-3:
        failures.append(f"Lyapunov entropy {h_lyap:.5f} != log 2 within 1e-3")
    _finish(6, failures, f"cat {h_cat:.6f}, golden {h_golden:.6f}, "
                         f"solid torus {h_lyap:.6f}")


def test_criterion_7_measure_laws():
    """Cylinder weights: refinement additivity and e^{-h} pushforward to
    1e-10 for all words to length 12 on two shifts; the golden one-symbol
    weights take their closed-form values."""
    failures: list[str] = []
    golden = golden_mean_transition()
    for T, name in ((golden, "golden"), (full_shift_transition(2), "full-2")):
        data = entropy_sft(T)
        decay = math.exp(-data.h)
        words = dict(enumerate_weights(T, 12, data))
        worst_add = worst_push = 0.0
        for w, val in words.items():
            if len(w) < 12:
                ext = sum(words[w + str(s)] for s in range(T.n)
                          if T.allows(int(w[-1]), s))
                worst_add = max(worst_add, abs(ext - val))
                for a in range(T.n):
                    if T.allows(a, int(w[0])):
                        worst_push = max(worst_push,
                                         abs(words[str(a) + w] - decay * val))
        if worst_add > 1e-10:
            failures.append(f"{name}: additivity defect {worst_add:.2e}")
        if worst_push > 1e-10:
            failures.append(f"{name}: pushforward defect {worst_push:.2e}")
    w0 = word_weight(golden, "0")
    pair = word_weight(golden, "00") + word_weight(golden, "01")
    if abs(w0 - PHI) > 1e-10:
        failures.append(f"weight('0') = {w0!r}, expected the golden ratio")
    if abs(pair - PHI) > 1e-10:
        failures.append(f"weight('00') + weight('01') = {pair!r}")
    _finish(7, failures, f"all words to length 12 on two shifts, "
                         f"weight('0') = {w0:.12f}")


def test_criterion_8_unstable_length_laws():
    """Signed unstable length: zero on cycles, path independent, and
    scaled by exactly the expanding eigenvalue, over 500 random
    piecewise-linear paths."""
    failures: list[str] = []
    psi = unstable_functional(CAT)
    mu = expanding_eigenvalue(CAT)
    rng = random.Random(5)
    worst_cycle = worst_indep = worst_ratio = 0.0
    checked = 0
    while checked < 500:
        a = [rng.randint(-10, 10), rng.randint(-10, 10)]
        b = [rng.randint(-10, 10), rng.randint(-10, 10)]
        mids1 = [[rng.randint(-20, 20), rng.randint(-20, 20)]
                 for _ in range(rng.randint(0, 3))]
        mids2 = [[rng.randint(-20, 20), rng.randint(-20, 20)]
                 for _ in range(rng.randint(1, 4))]
        path1 = LinearModelPath(CAT, [a, *mids1, b])
        path2 = LinearModelPath(CAT, [a, *mids2, b])
        cycle = LinearModelPath(CAT, [a, *mids1, b, *mids2, a])
        l1 = path_unstable_length(path1, psi)
        l2 = path_unstable_length(path2, psi)
        worst_indep = max(worst_indep, abs(l1 - l2))
        worst_cycle = max(worst_cycle, abs(path_unstable_length(cycle, psi)))
        if abs(l1) >= 0.1:
            lm = path_unstable_length(path1.mapped(), psi)
            worst_ratio = max(worst_ratio, abs(lm / l1 - mu))
        checked += 1
    if worst_cycle > 1e-12:
        failures.append(f"cycle value defect {worst_cycle:.2e}")
    if worst_indep > 1e-12:
        failures.append(f"path independence defect {worst_indep:.2e}")
    if worst_ratio > 1e-10:
        failures.append(f"scaling ratio off by {worst_ratio:.2e}")
    _finish(8, failures, f"500 paths: cycle {worst_cycle:.1e}, independence "
                         f"{worst_indep:.1e}, ratio defect {worst_ratio:.1e}")


def test_criterion_9_classifier():
    """The 12-entry decision table is exact and the full pipeline labels
    the builtin suite correctly with calibrated estimates."""
    t0 = time.monotonic()
    failures: list[str] = []
    table = {
        (0, 0): "attracting-fixed-point",
        (1, 1): "generalized-1-solenoid",
        (2, 1): "torus-T2-automorphism",
        (2, 2): "codim1-expanding",
        (3, 1): "anosov-T3",
        (3, 2): "anosov-T3",
    }
    for dim_lambda in range(4):
        for dim_eu in range(3):
            key = (dim_lambda, dim_eu)
            try:
                label = classify(*key)
                if table.get(key) != label:
                    failures.append(f"table mismatch at {key}: {label}")
            except InvalidCombinationError:
                if key in table:
                    failures.append(f"valid combination {key} rejected")
    specs = [
        MapSpec("smale_solenoid"),
        MapSpec("toral_auto", matrix=CAT),
        MapSpec("toral_times_contraction"),
        MapSpec("toral_auto", matrix=PLASTIC),
        MapSpec("fixed_point_sink"),
    ]
    expected = [
        "generalized-1-solenoid",
        "torus-T2-automorphism",
        "torus-T2-automorphism",
        "anosov-T3",
        "attracting-fixed-point",
    ]
    reports = report_many(specs, seed=0)
    for rep, want in zip(reports, expected):
        if rep.class_label != want:
            failures.append(f"{rep.spec.builtin}: {rep.class_label} != {want}")
    smale_rep, cat_rep = reports[0], reports[1]
    if abs(smale_rep.box_dimension - 1.5) > 0.15:
        failures.append(f"solid torus box dimension {smale_rep.box_dimension:.4f}")
    if abs(cat_rep.box_dimension - 2.0) > 0.1:
        failures.append(f"cat box dimension {cat_rep.box_dimension:.4f}")
    lyap_targets = {
        0: ((math.log(2.0), 1e-2), (math.log(0.25), 1e-2), (math.log(0.25), 1e-2)),
        1: ((math.log(MU_CAT), 1e-3), (-math.log(MU_CAT), 1e-3)),
        2: ((math.log(MU_CAT), 1e-2), (math.log(0.5), 1e-2),
            (-math.log(MU_CAT), 1e-2)),
    }
    for idx, targets in lyap_targets.items():
        for got, (want, tol) in zip(reports[idx].lyapunov, targets):
            if abs(got - want) > tol:
                failures.append(
                    f"{reports[idx].spec.builtin}: exponent {got:.4f} != "
                    f"{want:.4f} within {tol}"
                )
    elapsed = time.monotonic() - t0
    if elapsed >= 300.0:
        failures.append(f"took {elapsed:.1f}s, budget 300s")
    box_line = ", ".join(f"{r.spec.builtin} {r.box_dimension:.3f}" for r in reports[:2])
    _finish(9, failures, f"12-entry table exact, suite labels correct, "
                         f"box {box_line}, {elapsed:.1f}s")
