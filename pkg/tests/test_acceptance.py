"""Acceptance gate: ten numbered criteria, one verdict line each.

Each test produces exactly one PASS/FAIL line with the measured margins
and elapsed time; the lines are echoed in a terminal-summary section
(see conftest) so they survive output capture, and each test asserts on
its own verdict. Criteria 1 and 7 run the calibrated readings
recorded in the project decision ledger: criterion 1 scales the
Wronskian residual by |a|^2 (the raw difference of squares inherits
|a|^2 ulps in deep tunneling), and criterion 7 checks the CI clause at
(1e5 steps, 200 realizations) and the estimator-agreement clause at
(1e6 steps, 50 realizations) where the matrix estimator's 1/n norm
prefactor is inside statistical error.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

try:
    from conftest import ACCEPTANCE_VERDICTS
except ImportError:  # running outside pytest
    ACCEPTANCE_VERDICTS = []

from anderson1d import (
    EnsembleConfig,
    Type2Spec,
    WitnessNotFound,
    classify_energy,
    drift_check,
    example1_critical_types,
    example1_potential,
    example1_scattering,
    example2_potential,
    example2_reflectionless,
    example2_transfer,
    jost_ab,
    jost_coefficients,
    lyapunov_matrix_estimate,
    lyapunov_vector_estimate,
    nj_construction,
    noncompactness_witness,
    norm_gain_profile,
    projective_distance,
    r_squared_identity_check,
    scan_reflection_zeros,
    sqrt_growth_experiment,
    strong_irreducibility_check,
    transfer_from_scattering,
    transfer_matrix,
    validate,
)

PI2 = math.pi**2
POT1 = example1_potential(1.0)


def _verdict(ok: bool, name: str, detail: str, t0: float, budget: float) -> None:
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} [{elapsed:.1f}s / {budget:.0f}s]"
    ACCEPTANCE_VERDICTS.append(line)
    print(line, file=sys.__stdout__, flush=True)
    assert ok, line


def _criterion_pool():
    rng = np.random.default_rng(12345)
    pots = [
        example1_potential(1.0),
        example1_potential(2.0 * PI2),
        example2_potential(6.0 * PI2),
        example2_potential(48.0 * PI2),
    ]
    for _ in range(10):
        cuts = np.sort(rng.uniform(-0.45, 0.45, size=3))
        vals = rng.uniform(-30.0, 30.0, size=4)
        pots.append(validate({"breakpoints": [-0.5, *cuts, 0.5], "values": list(vals)}))
    return pots


def test_criterion_01_wronskian_suite():
    t0 = time.perf_counter()
    ks = np.linspace(0.1, 20.0, 500)
    worst_scaled = 0.0
    worst_raw = 0.0
    for p in _criterion_pool():
        a, b = jost_ab(p, ks)
        resid = np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1.0)
        worst_raw = max(worst_raw, float(resid.max()))
        worst_scaled = max(worst_scaled, float((resid / np.maximum(1.0, np.abs(a) ** 2)).max()))
    _verdict(
        worst_scaled < 1e-10,
        "criterion-1",
        f"wronskian scaled residual max {worst_scaled:.2e} over 14 potentials x 500 k"
        f" (raw max {worst_raw:.2e}, dominated by |a|^2 ulps in deep tunneling)",
        t0,
        budget=5.0,
    )


def test_criterion_02_closed_form_oracles():
    t0 = time.perf_counter()
    worst = 0.0
    for lam in (1.0, 2.0 * PI2):
        p = example1_potential(lam)
        for E in np.linspace(lam + 0.5, lam + 80.0, 200):
            g_prop = transfer_matrix(p, float(E))
            g_closed = transfer_from_scattering(example1_scattering(lam, float(E)))
            worst = max(worst, float(np.max(np.abs(g_prop - g_closed))))
    lam = 6.0 * PI2
    p = example2_potential(lam)
    for E in np.linspace(lam + 1.0, lam + 500.0, 200):
        g_prop = transfer_matrix(p, float(E))
        worst = max(worst, float(np.max(np.abs(g_prop - example2_transfer(lam, float(E))))))
    _verdict(
        worst < 1e-10,
        "criterion-2",
        f"propagated vs closed-form transfer matrices: max entrywise error {worst:.2e}"
        " (600 energies)",
        t0,
        budget=2.0,
    )


def test_criterion_03_critical_set_scan():
    t0 = time.perf_counter()
    scan = scan_reflection_zeros(POT1, 0.5, 10.0)
    expected = [math.sqrt(n * n * PI2 + 1.0) for n in (1, 2, 3)]
    count_ok = len(scan.zeros) == 3
    worst = max(
        (abs(k - k_ref) for (k, _), k_ref in zip(scan.zeros, expected)), default=1.0
    ) if count_ok else 1.0
    lattice_ok = all(
        classify_energy(POT1, (n * math.pi / 2.0) ** 2).status == "Critical"
        for n in range(1, 7)
    )
    _verdict(
        count_ok and worst < 1e-8 and lattice_ok,
        "criterion-3",
        f"{len(scan.zeros)}/3 reflection zeros in k=[0.5,10], max |dk| {worst:.2e};"
        f" lattice points Critical: {lattice_ok}",
        t0,
        budget=10.0,
    )


def _brute_pairs(N):
    out = []
    for n in range(2, (N + 1) // 2 + 2):
        mm = n * n - N
        if mm >= 1:
            m = math.isqrt(mm)
            if m * m == mm and m < n:
                out.append((n, m))
    return sorted(out, key=lambda t: t[0] * t[0] + t[1] * t[1])


def test_criterion_04_pair_enumeration():
    t0 = time.perf_counter()
    worst_dE = 0.0
    counts = []
    for N in (3, 8, 24, 80):
        lam = 2.0 * PI2 * N
        brute = _brute_pairs(N)
        pairs = example2_reflectionless(lam)
        enum_ok = [(n, m) for n, m, _ in pairs] == brute
        E_list = [2.0 * PI2 * (n * n + m * m) for n, m in brute]
        scan = scan_reflection_zeros(
            example2_potential(lam), 1.0, math.sqrt(max(E_list)) + 0.5
        )
        counts.append(len(scan.zeros) == len(E_list) and enum_ok)
        for (k, _), E_ref in zip(scan.zeros, E_list):
            worst_dE = max(worst_dE, abs(k * k - E_ref))
    nj_ok = True
    for j in range(1, 6):
        lam_j, pairs = nj_construction(j)
        N_j = 2 ** (j + 1) * (2 ** (j - 1) + 1)
        nj_ok = nj_ok and len(pairs) >= j and all(n * n - m * m == N_j for n, m in pairs)
    _verdict(
        all(counts) and worst_dE < 1e-7 and nj_ok,
        "criterion-4",
        f"scan vs brute pair enumeration agreed at N in (3,8,24,80), max |dE| {worst_dE:.2e};"
        f" n_j construction exact for j<=5: {nj_ok}",
        t0,
        budget=20.0,
    )


def _sample_regular_energies(count, rng):
    # admissible window: away from the half-pi lattice, from the pi
    # lattice (free-rotation resonances), and from reflectionless points
    # measured by an |b| floor
    out = []
    while len(out) < count:
        E = float(rng.uniform(0.5, 45.0))
        k = math.sqrt(E)
        if min(abs(k - 0.5 * math.pi * round(k / (0.5 * math.pi))), 1.0) < 0.1:
            continue
        if min(abs(k - math.pi * round(k / math.pi)), 1.0) < 0.25:
            continue
        if abs(jost_coefficients(POT1, k).b) < 0.01:
            continue
        out.append(E)
    return out


def test_criterion_05_group_certification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20250819)
    energies = _sample_regular_energies(100, rng)
    all_regular = all(classify_energy(POT1, E).status == "Regular" for E in energies)
    lengths = []
    ok = True
    for E in energies:
        w = noncompactness_witness(POT1, E)
        lengths.append(w.length)
        ok = ok and w.norm > 10.0 and w.length <= 500
        ok = ok and strong_irreducibility_check(POT1, E) == "Certified"
    try:
        noncompactness_witness(POT1, PI2 + 1.0)
        compact_flag = False
    except WitnessNotFound as exc:
        compact_flag = exc.rotation_compact
    _verdict(
        ok and all_regular and compact_flag,
        "criterion-5",
        f"100/100 witnesses (max word {max(lengths)}, mean {np.mean(lengths):.0f})"
        f" + irreducibility certified; reflectionless point flags rotation-compact:"
        f" {compact_flag}",
        t0,
        budget=60.0,
    )


def test_criterion_06_norm_gain_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    worst_resid = 0.0
    worst_margin = math.inf
    min_measure = math.inf
    checked = 0
    while checked < 10**4:
        E = float(rng.uniform(0.5, 45.0))
        s = jost_coefficients(POT1, math.sqrt(E))
        if abs(s.b) < 1e-4:
            continue
        theta = float(rng.uniform(0.0, math.pi))
        worst_resid = max(worst_resid, r_squared_identity_check(s, theta))
        prof = norm_gain_profile(s)
        min_measure = min(min_measure, prof.K_hi - prof.K_lo)
        # the two unit-gain directions: cos(2 theta + phi + psi) = -B/A
        u1 = math.acos(max(-1.0, min(1.0, -prof.B / prof.A)))
        phase = prof.phi + prof.psi
        roots = ((u1 - phase) / 2.0, (-u1 - phase) / 2.0)
        d = projective_distance(roots[0], roots[1])
        worst_margin = min(worst_margin, abs(d - math.pi / 2.0))
        checked += 1
    _verdict(
        worst_resid < 1e-10 and worst_margin > 1e-9 and min_measure > math.pi / 2.0,
        "criterion-6",
        f"norm identity residual max {worst_resid:.2e} at 1e4 samples; unit-gain root"
        f" separation clears pi/2 by >= {worst_margin:.2e}; min gain measure"
        f" {min_measure:.4f} > pi/2",
        t0,
        budget=5.0,
    )


def test_criterion_07_lyapunov_positivity():
    t0 = time.perf_counter()
    energies = (2.0, 5.0, 20.0, -1.0, -4.0)
    ci_config = EnsembleConfig(p_one=0.5, n_steps=10**5, n_realizations=200, master_seed=7)
    z_ci = []
    for E in energies:
        est = lyapunov_vector_estimate(POT1, E, ci_config)
        z_ci.append(est.gamma_hat / est.std_error)
    ci_ok = all(z > 2.576 for z in z_ci)

    agree_config = EnsembleConfig(p_one=0.5, n_steps=10**6, n_realizations=50, master_seed=7)
    z_agree = []
    for E in energies:
        v = lyapunov_vector_estimate(POT1, E, agree_config)
        m = lyapunov_matrix_estimate(POT1, E, agree_config)
        z_agree.append(abs(v.gamma_hat - m.gamma_hat) / math.hypot(v.std_error, m.std_error))
    agree_ok = all(z < 3.0 for z in z_agree)
    _verdict(
        ci_ok and agree_ok,
        "criterion-7",
        f"99% CI excludes 0 at (1e5, 200): min z {min(z_ci):.1f};"
        f" estimator agreement at (1e6, 50): max z {max(z_agree):.2f} < 3",
        t0,
        budget=180.0,
    )


def test_criterion_08_vanishing_gamma():
    t0 = time.perf_counter()
    config = EnsembleConfig(p_one=0.5, n_steps=10**5, n_realizations=100, master_seed=3)
    values = []
    ok = True
    for E in (PI2, PI2 + 1.0):
        est = lyapunov_vector_estimate(POT1, E, config)
        values.append(est.gamma_hat)
        ok = ok and abs(est.gamma_hat) < max(3.0 * est.std_error, 1e-3)
    _verdict(
        ok,
        "criterion-8",
        f"|gamma| at the two bounded-solution points: {abs(values[0]):.1e},"
        f" {abs(values[1]):.1e} (tolerance max(3 se, 1e-3))",
        t0,
        budget=60.0,
    )


def test_criterion_09_sqrt_growth():
    t0 = time.perf_counter()
    spec = Type2Spec(n=2, m=1, p=0.5)
    drift = drift_check(spec)
    result = sqrt_growth_experiment(
        spec, n_pairs=2**17, n_realizations=2000, seed=0, with_gamma=False
    )
    sigma_ref = math.sqrt(0.5) * math.log(3.0)
    clt = sigma_ref * math.sqrt(2.0 / math.pi)
    rel = abs(result.final_mean_abs_S_over_sqrtN - clt) / clt
    ok = (
        drift < 1e-14
        and 0.45 <= result.fitted_exponent <= 0.55
        and rel < 0.05
        and result.matrix_check_max_residual < 1e-6
    )
    _verdict(
        ok,
        "criterion-9",
        f"drift {drift:.1e}; growth exponent {result.fitted_exponent:.4f} in [0.45,0.55];"
        f" mean|S|/sqrt(N) = {result.final_mean_abs_S_over_sqrtN:.4f} vs CLT {clt:.4f}"
        f" ({100 * rel:.1f}% off); matrix cross-check residual"
        f" {result.matrix_check_max_residual:.1e}",
        t0,
        budget=180.0,
    )


def _run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "anderson1d.cli", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        env={**os.environ, "ANDERSON_SEED": ""},
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def test_criterion_10_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    pot = tmp_path / "pot.json"
    pot.write_text(json.dumps({"breakpoints": [-0.5, 0.5], "values": [1.0]}))
    cases = {
        "scatter": ["scatter", "--potential", str(pot), "--k-range", "1", "4",
                    "--grid-n", "200", "--seed", "5"],
        "critical": ["critical", "--potential", str(pot), "--k-range", "0.5", "7",
                     "--alpha-range", "0.2", "2", "--seed", "5"],
        "gamma": ["gamma", "--potential", str(pot), "--E", "5", "-1",
                  "--steps", "2000", "--realizations", "20",
                  "--estimator", "both", "--seed", "5"],
        "furstenberg": ["furstenberg", "--potential", str(pot), "--E", "2", "-1",
                        "--seed", "5"],
        "walk": ["walk", "--pairs", "1024", "--realizations", "50",
                 "--skip-gamma", "--seed", "5"],
        "examples": ["examples", "--lambda-j", "3", "--seed", "5"],
    }
    all_same = True
    for name, args in cases.items():
        outputs = []
        for tag, threads in (("r1", "1"), ("r2", "4"), ("r3", None)):
            out = tmp_path / f"{name}_{tag}.dat"
            argv = args + ["--out", str(out)]
            if threads:
                argv += ["--threads", threads]
            _run_cli(argv, cwd=str(tmp_path))
            outputs.append(out.read_bytes())
        all_same = all_same and outputs[0] == outputs[1] == outputs[2]
    _verdict(
        all_same,
        "criterion-10",
        "all 6 subcommands byte-identical across reruns and thread counts 1/4/default",
        t0,
        budget=120.0,
    )
