"""Acceptance criteria 1-12, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected into the terminal summary.
"""

import itertools
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from slicekit.algebra import H, clifford, qmul
from slicekit.cli import emit_reports
from slicekit.config import RunConfig
from slicekit.diffeo import FAMILIES, family
from slicekit.operators import (
    JetFn,
    apply_G,
    apply_H_a,
    apply_H_ab,
    gyh_residual,
    jet_left,
    jet_product,
    jet_right,
    jet_sum,
    series_in_map,
)
from slicekit.slice import PowerSeriesFn, representation_array
from slicekit.theorems import FULL_IMAGE, run_suite, sample_points

SEED = 0x5EED
X = JetFn.identity(H)
XBAR = JetFn.conjugate(H)
ONE = JetFn.constant(H, 1.0)


def record(n, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def worst(reports, quantities=None):
    rows = [r for r in reports if quantities is None or r.quantity in quantities]
    assert rows, "no report rows"
    return max(r.residual for r in rows)


_cache = {}


def suite(name, cfg=None):
    """Run a suite once per session (the integral suites are expensive)."""
    key = (name, cfg)
    if key not in _cache:
        t = time.perf_counter()
        reps = run_suite(cfg or RunConfig(), [name])
        _cache[key] = (reps, time.perf_counter() - t)
    return _cache[key]


def polynomial(rng):
    c = [rng.standard_normal(4) * 0.5 for _ in range(3)]
    return jet_sum(
        jet_product(X, jet_right(X, c[0])),
        jet_product(XBAR, jet_left(c[1], X)),
        jet_product(JetFn.coordinate(H, 2), jet_right(X, c[2])),
    )


def test_criterion_01_algebra_exactness():
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    err = 0.0
    for n in range(1, 5):
        alg = clifford(n)
        gens = [alg.vector(np.eye(n)[i]) for i in range(n)]
        for i, j in itertools.product(range(n), repeat=2):
            rel = alg.mul(gens[i], gens[j]) + alg.mul(gens[j], gens[i]) - alg.scalar(-2.0 if i == j else 0.0)
            err = max(err, float(np.max(np.abs(rel))))
        a, b, c = rng.standard_normal((3, 1000, alg.dim))
        diff = alg.mul(alg.mul(a, b), c) - alg.mul(a, alg.mul(b, c))
        scale = np.prod([np.linalg.norm(v, axis=-1) for v in (a, b, c)], axis=0)
        err = max(err, float(np.max(np.linalg.norm(diff, axis=-1) / np.maximum(1.0, scale))))
    p, q, r = rng.standard_normal((3, 1000, 4))
    diff = qmul(qmul(p, q), r) - qmul(p, qmul(q, r))
    err = max(err, float(np.max(np.abs(diff))))
    elapsed = time.perf_counter() - t
    ok = record(1, err <= 1e-12 and elapsed < 5, f"max residual {err:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_02_operator_reduction():
    rng = np.random.default_rng([SEED, 2])
    ident = family("identity")
    red = 0.0
    for _ in range(500):
        f = polynomial(rng)
        x = rng.uniform(-2, 2, 4)
        lhs, rhs = apply_H_ab(ident, ONE, f, x), apply_G(f, x)
        red = max(red, float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs)))) / max(1.0, float(np.max(np.abs(rhs)))))
    exact = fd = 0.0
    for name in sorted(FAMILIES):
        a = family(name)
        f = polynomial(rng)
        x = sample_points(a, rng, 50)
        scale = np.maximum(1.0, H.norm(qmul(H.vector(a.forward(x[:, 1:])), apply_H_a(a, f, x))))
        exact = max(exact, float(np.max(gyh_residual(a, f, x) / scale)))
        fd = max(fd, float(np.max(gyh_residual(a, f, x, route="fd") / scale)))
    ok = red <= 1e-12 and exact <= 1e-12 and fd <= 1e-6
    record(2, ok, f"H_(id,1) vs G {red:.1e}; conjugation exact {exact:.1e}, FD {fd:.1e}")
    assert ok


def test_criterion_03_material_derivative():
    reps, elapsed = suite("du_relation")
    res = worst(reps)
    fams = {r.case for r in reps}
    ok = res <= 1e-12 and elapsed < 10 and fams == set(FAMILIES) and all(r.nodes >= 500 for r in reps)
    record(3, ok, f"max residual {res:.1e} over {len(fams)} families, {elapsed:.2f} s")
    assert ok


def test_criterion_04_power_series_kernel():
    reps, _ = suite("power_series")
    res = worst(reps)
    ok = res <= 1e-6 and {r.case for r in reps} == set(FAMILIES) and all(r.nodes >= 100 for r in reps)
    record(4, ok, f"max residual {res:.1e}")
    assert ok


def test_criterion_05_representation():
    rng = np.random.default_rng([SEED, 5])
    err = spread = 0.0
    for name in FULL_IMAGE:
        a = family(name)
        f = series_in_map(PowerSeriesFn.random(rng, 5, H, scale=0.5), a)
        x = sample_points(a, rng, 20)
        y = a.apply(x)
        fx = f.value(x)
        scale = np.maximum(1.0, H.norm(fx))
        vals = []
        for _ in range(10):
            J = rng.standard_normal((len(x), 3))
            J /= np.linalg.norm(J, axis=-1, keepdims=True)
            vals.append(representation_array(H, lambda p: f.value(a.apply_inverse(p)), y, J))
        err = max(err, max(float(np.max(H.norm(v - fx) / scale)) for v in vals))
        spread = max(spread, max(float(np.max(H.norm(v - vals[0]) / scale)) for v in vals))
    ok = err <= 1e-10 and spread <= 1e-10
    record(5, ok, f"residual {err:.1e}, spread over 10 axes {spread:.1e}")
    assert ok


def test_criterion_06_splitting():
    reps, _ = suite("splitting")
    reassembly = worst(reps, {"reassembly"})
    deficit = worst(reps, {"cauchy_riemann_order_deficit"})
    ok = reassembly <= 1e-12 and all(r.passed for r in reps if r.quantity == "cauchy_riemann_order_deficit")
    record(6, ok, f"reassembly {reassembly:.1e}, order deficit {deficit:.2f}")
    assert ok


def test_criterion_07_slice_cauchy():
    reps, _ = suite("slice_cauchy")
    err = worst(reps, {"formula_vs_value"})
    spread = worst(reps, {"contour_independence"})
    ok = err <= 1e-10 and spread <= 1e-10 and all(r.nodes == 256 for r in reps)
    record(7, ok, f"residual {err:.1e}, spread {spread:.1e}")
    assert ok


def test_criterion_08_quaternionic_borel_pompeiu():
    cfg = RunConfig(domain_center=(0.0, 2.0, 0.0, 0.0), domain_radius=0.5)
    reps, elapsed = suite("borel_pompeiu_G", cfg)
    inner = worst(reps, {"interior", "exterior"})
    ratio = worst(reps, {"refinement_ratio"})
    ok = inner <= 5e-2 and ratio <= 0.5 and elapsed < 300 and all(r.passed for r in reps)
    record(8, ok, f"max relative error {inner:.1e}, refinement ratio {ratio:.1e}, {elapsed:.1f} s")
    assert ok


def test_criterion_09_H_a_variants():
    reps = []
    for name in ("borel_pompeiu_Ha", "stokes_Ha"):
        reps += suite(name)[0]
    ident = worst(reps, {"identity_map_equals_G"})
    fam = [r for r in reps if r.case in ("exp", "affine")]
    err = worst(fam, {"interior", "boundary_vs_volume"})
    ratio = worst(fam, {"refinement_ratio"})
    ok = ident <= 1e-12 and err <= 5e-2 and ratio <= 0.5 and {r.case for r in fam} == {"exp", "affine"}
    record(9, ok, f"identity reduction {ident:.1e}, exp/affine error {err:.1e}, refinement ratio {ratio:.1e}")
    assert ok


def test_criterion_10_conformal_covariance():
    reps = suite("conformal_G")[0] + suite("conformal_Ha")[0]
    exact = worst(reps, {"covariance_exact", "kernel_preserved_exact", "du_form_agreement"})
    fd = worst(reps, {"covariance_fd", "kernel_preserved_fd"})
    kernel = worst(reps, {"kernel_preserved_exact"})
    ok = exact <= 1e-6 and fd <= 1e-5 and kernel <= 1e-6 and all(r.nodes >= 50 for r in reps)
    record(10, ok, f"exact {exact:.1e}, FD {fd:.1e}, kernel preservation {kernel:.1e}")
    assert ok


def test_criterion_11_cauchy_kernel_membership():
    reps, _ = suite("kernel_membership")
    deficits = {r.quantity: r for r in reps if r.quantity.endswith("order_deficit")}
    converging = [q for q, r in deficits.items() if r.passed]
    fd = {r.quantity: r.residual for r in reps if r.quantity.endswith("_fd")}
    ok = len(converging) >= 1
    detail = ", ".join(f"{q} {r.residual:.2f}" for q, r in deficits.items())
    detail += "; " + ", ".join(f"{q} {v:.1e}" for q, v in fd.items())
    record(11, ok, detail)
    assert ok


def test_criterion_12_determinism():
    cfg = RunConfig(
        timing=False,
        surface_nodes=(8, 8, 8),
        radial_nodes=8,
        suites=("representation", "splitting", "power_series", "slice_cauchy", "kernel_membership",
                "borel_pompeiu_G", "stokes_Ha", "conformal_G", "conformal_Ha", "du_relation"),
    )
    first = emit_reports(run_suite(cfg), "csv", timing=False).encode()
    second = emit_reports(run_suite(cfg), "csv", timing=False).encode()
    rows = first.count(b"\n") - 1
    ok = first == second and rows > 10
    record(12, ok, f"{rows} rows, {len(first)} bytes, identical={first == second}")
    assert ok
