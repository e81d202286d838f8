"""Acceptance contract: one test per numbered criterion, at stated tolerance.

Criteria 1, 2, 6, 7 and the calibration half of 3 run everywhere on synthetic
phantoms. The halves that compare against reference benchmark values need the
canonical 512x512 Peppers/Cameraman images and skip cleanly when those are
absent (scripts/fetch_images.py documents how to register them).
"""

import numpy as np
import pytest

import lptv
from conftest import circular_convolve_oracle, require_canonical
from lptv.shrinkage import PenaltyParams, irl1_threshold, prox_oracle_weighted_l1
from lptv.solvers import SolverConfig, apirl1_am, pirl1_am

FULL_KERNEL = (17, 7.0)  # benchmark blur for the 512x512 cells
DESK_KERNEL = (9, 2.0)

# (image, bsnr, mu, beta, psnr target, ssim target or None)
TABLE1_CELLS = (
    ("peppers", 30.0, 30.0, 0.009, 27.39, 0.759),
    ("cameraman", 30.0, 60.0, 0.009, 26.03, None),
    ("peppers", 20.0, 100.0, 0.01, 25.52, None),
    ("cameraman", 20.0, 100.0, 0.01, 24.49, None),
)
TABLE1_SEEDS = tuple(range(1, 11))

# Desk-scale benchmark cells: 64x64 phantom, gaussian(9, 2).
PHANTOM_CELLS = ((30.0, 30.0, 0.009), (20.0, 100.0, 0.01))


def _degrade(truth, size, sigma, bsnr, seed):
    kernel = lptv.gaussian_kernel(size, sigma)
    cache = lptv.build_spectral_cache(kernel, *truth.shape)
    observed, _ = lptv.degrade(
        truth, lptv.DegradationSpec(kernel=kernel, bsnr_db=bsnr, seed=seed), cache)
    return observed, cache


@pytest.fixture(scope="module")
def phantom_cells(phantom64):
    """Both desk-scale cells solved by both algorithms, traces kept."""
    out = {}
    for bsnr, mu, beta in PHANTOM_CELLS:
        observed, cache = _degrade(phantom64, *DESK_KERNEL, bsnr, seed=1)
        for accelerated in (False, True):
            cfg = SolverConfig(mu=mu, beta=beta, accelerated=accelerated)
            solver = apirl1_am if accelerated else pirl1_am
            restored, trace = solver(observed, cache, cfg)
            report = lptv.evaluate(restored, phantom64)
            out[(bsnr, accelerated)] = {"trace": trace, "report": report}
    return out


@pytest.fixture(scope="module")
def table1_results():
    """All four full-scale cells, 10 seeds each, both algorithms.

    Skips when the canonical images are missing. Minutes of compute, so the
    whole grid is solved once and shared by criteria 4 and 5.
    """
    paths = {name: require_canonical(name) for name in ("peppers", "cameraman")}
    results = {}
    for name, bsnr, mu, beta, _psnr, _ssim in TABLE1_CELLS:
        truth = lptv.load_grayscale(paths[name])
        kernel = lptv.gaussian_kernel(*FULL_KERNEL)
        cache = lptv.build_spectral_cache(kernel, *truth.shape)
        for accelerated in (False, True):
            cfg = SolverConfig(mu=mu, beta=beta, accelerated=accelerated)
            solver = apirl1_am if accelerated else pirl1_am
            runs = []
            for seed in TABLE1_SEEDS:
                observed, _ = lptv.degrade(
                    truth,
                    lptv.DegradationSpec(kernel=kernel, bsnr_db=bsnr, seed=seed),
                    cache)
                restored, trace = solver(observed, cache, cfg)
                report = lptv.evaluate(restored, truth)
                runs.append({"psnr": report.psnr_db, "ssim": report.ssim,
                             "iterations": trace.iterations,
                             "wall_ms": trace.wall_ms,
                             "terminated_by": trace.terminated_by})
            results[(name, bsnr, accelerated)] = runs
    return results


def test_criterion_1_operator_correctness():
    rng = np.random.default_rng(101)

    # Adjoint identity <grad u, z> == <u, grad^T z> on assorted shapes.
    for shape in ((16, 16), (8, 12), (31, 7)):
        u = rng.standard_normal(shape) * 100
        z = lptv.GradientField(dx=rng.standard_normal(shape),
                               dy=rng.standard_normal(shape))
        g = lptv.grad_forward(u)
        lhs = float(np.sum(g.dx * z.dx) + np.sum(g.dy * z.dy))
        rhs = float(np.sum(u * lptv.grad_adjoint(z)))
        scale = np.linalg.norm(u) * np.sqrt(
            np.linalg.norm(z.dx) ** 2 + np.linalg.norm(z.dy) ** 2)
        assert abs(lhs - rhs) <= 1e-10 * scale

    # Spectral convolution equals the direct periodic sum on 16x16.
    img = rng.random((16, 16)) * 255
    kernel = lptv.gaussian_kernel(7, 1.7)
    cache = lptv.build_spectral_cache(kernel, 16, 16)
    direct = circular_convolve_oracle(img, kernel.taps)
    assert np.abs(lptv.blur_periodic(img, cache) - direct).max() <= 1e-10

    # solve_u residual on random 32x32 systems across the beta range.
    kernel = lptv.gaussian_kernel(9, 2.0)
    cache = lptv.build_spectral_cache(kernel, 32, 32)
    for trial in range(5):
        f = rng.random((32, 32)) * 255
        z = lptv.GradientField(dx=rng.standard_normal((32, 32)),
                               dy=rng.standard_normal((32, 32)))
        beta = float(10.0 ** rng.uniform(-3, 0))
        u = lptv.solve_u(z, f, beta, cache)
        ktk_u = lptv.blur_periodic(lptv.blur_periodic(u, cache), cache)
        lap_u = lptv.grad_adjoint(lptv.grad_forward(u))
        lhs = ktk_u + beta * lap_u
        rhs = lptv.blur_periodic(f, cache) + beta * lptv.grad_adjoint(z)
        assert np.linalg.norm(lhs - rhs) <= 1e-8 * np.linalg.norm(rhs)


def test_criterion_2_prox_oracle():
    rng = np.random.default_rng(202)
    for _ in range(1000):
        v = float(rng.uniform(-100, 100))
        if abs(v) < 1e-3:
            continue
        params = PenaltyParams(p=float(rng.uniform(0.05, 1.0)),
                               lam=float(10.0 ** rng.uniform(-2, 2)))
        w = float(irl1_threshold(np.array(v), params))
        got = lptv.shrink_scalar(v, params)
        want = prox_oracle_weighted_l1(v, w)
        grid_res = abs(v) * 1e-6  # refined search spacing inside the oracle
        assert abs(got - want) <= 2 * grid_res + 1e-12

    # p = 1: plain soft thresholding, bit-exact.
    params = PenaltyParams(p=1.0, lam=0.75)
    for v in (-3.0, -0.75, -0.2, 0.0, 0.4, 0.75, 5.0):
        expected = np.sign(v) * max(0.0, abs(v) - 0.75)
        assert lptv.shrink_scalar(v, params) == expected


def test_criterion_3_bsnr_calibration():
    truth = lptv.piecewise_phantom(512, 512)
    kernel = lptv.gaussian_kernel(*FULL_KERNEL)
    cache = lptv.build_spectral_cache(kernel, 512, 512)
    blurred = lptv.blur_periodic(truth, cache)
    for target in (30.0, 20.0):
        observed, _ = lptv.degrade(
            truth, lptv.DegradationSpec(kernel=kernel, bsnr_db=target, seed=3),
            cache)
        empirical = lptv.compute_bsnr(blurred, observed - blurred)
        assert abs(empirical - target) <= 0.1


def test_criterion_3_peppers_observation_quality():
    truth = lptv.load_grayscale(require_canonical("peppers"))
    observed, _cache = _degrade(truth, *FULL_KERNEL, 30.0, seed=1)
    report = lptv.evaluate(observed, truth)
    assert abs(report.psnr_db - 22.97) <= 0.5
    assert abs(report.ssim - 0.659) <= 0.03


@pytest.mark.slow
def test_criterion_4_benchmark_means(table1_results):
    for name, bsnr, mu, beta, psnr_target, ssim_target in TABLE1_CELLS:
        for accelerated in (False, True):
            runs = table1_results[(name, bsnr, accelerated)]
            psnr_mean = float(np.mean([r["psnr"] for r in runs]))
            assert abs(psnr_mean - psnr_target) <= 1.0, (name, bsnr, accelerated)
            if ssim_target is not None:
                ssim_mean = float(np.mean([r["ssim"] for r in runs]))
                assert abs(ssim_mean - ssim_target) <= 0.05, (name, bsnr)


@pytest.mark.slow
def test_criterion_5_acceleration_full_scale(table1_results):
    for name, bsnr, *_ in TABLE1_CELLS:
        plain = table1_results[(name, bsnr, False)]
        accel = table1_results[(name, bsnr, True)]
        assert all(r["terminated_by"] == "tolerance" for r in plain + accel)
        p_itr = float(np.mean([r["iterations"] for r in plain]))
        a_itr = float(np.mean([r["iterations"] for r in accel]))
        assert a_itr < p_itr, (name, bsnr)
        p_ms = float(np.mean([r["wall_ms"] for r in plain]))
        a_ms = float(np.mean([r["wall_ms"] for r in accel]))
        assert a_ms < p_ms, (name, bsnr)
        dpsnr = abs(np.mean([r["psnr"] for r in accel])
                    - np.mean([r["psnr"] for r in plain]))
        dssim = abs(np.mean([r["ssim"] for r in accel])
                    - np.mean([r["ssim"] for r in plain]))
        assert dpsnr <= 0.05 and dssim <= 0.002, (name, bsnr)


def test_criterion_5_acceleration_desk_scale(phantom_cells):
    # Same structural property on the always-available phantom cells.
    # Wall time is compared summed over cells: single runs are ~0.1 s here
    # and per-cell timer noise would make the check flaky.
    wall = {False: 0.0, True: 0.0}
    for bsnr, _mu, _beta in PHANTOM_CELLS:
        plain = phantom_cells[(bsnr, False)]
        accel = phantom_cells[(bsnr, True)]
        assert accel["trace"].iterations < plain["trace"].iterations, bsnr
        dpsnr = abs(accel["report"].psnr_db - plain["report"].psnr_db)
        dssim = abs(accel["report"].ssim - plain["report"].ssim)
        assert dpsnr <= 0.05 and dssim <= 0.002, bsnr
        for flag in (False, True):
            wall[flag] += phantom_cells[(bsnr, flag)]["trace"].wall_ms
    assert wall[True] < wall[False]


def test_criterion_6_convergence_within_budget(phantom_cells):
    for (bsnr, accelerated), cell in phantom_cells.items():
        trace = cell["trace"]
        assert trace.terminated_by == "tolerance", (bsnr, accelerated)
        assert trace.iterations <= 1000
        assert trace.final_rel_err <= 1e-8


def test_criterion_6_zero_momentum_equivalence(phantom64):
    observed, cache = _degrade(phantom64, *DESK_KERNEL, 30.0, seed=1)
    cfg = dict(mu=30.0, beta=0.009)
    plain_iterates = []
    pirl1_am(observed, cache, SolverConfig(**cfg),
             iterate_hook=lambda k, u, r: plain_iterates.append(u.copy()))

    worst = 0.0

    def compare(k, u, _rec):
        nonlocal worst
        worst = max(worst, float(np.abs(u - plain_iterates[k - 1]).max()))

    _, trace = apirl1_am(observed, cache,
                         SolverConfig(accelerated=True, **cfg),
                         momentum_fn=lambda k: 0.0, iterate_hook=compare)
    assert trace.iterations == len(plain_iterates)
    assert worst <= 1e-12


def test_criterion_7_desk_scale_improvement(desk_problem):
    observed = desk_problem["observed"]
    truth = desk_problem["truth"]
    restored, trace = pirl1_am(observed, desk_problem["cache"],
                               SolverConfig(mu=30.0, beta=0.009))
    degraded_psnr = lptv.evaluate(observed, truth).psnr_db
    restored_psnr = lptv.evaluate(restored, truth).psnr_db
    assert trace.terminated_by == "tolerance"
    assert restored_psnr >= degraded_psnr + 2.0
