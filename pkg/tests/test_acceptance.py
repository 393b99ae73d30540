"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Every tolerance is pinned here; nothing is deferred to calibration.
"""

import shutil
import time
from pathlib import Path

import numpy as np

import crashbench as cb
from crashbench.decks import build_deck, fmt, material_for, sim_config_for
from crashbench.meshing import mesh_crashtube, mesh_starbox
from crashbench.parameterization import (
    ThicknessProfile,
    starbox_geometry,
    thickness_at,
    trigger_mapping,
    tube_bounds,
)
from crashbench.postprocess import parse_time_history
from oracles import (
    VALID_DIMENSIONS,
    bounds_oracle,
    expected_trigger_slots,
    lerp_oracle,
)

GOLDEN_DECK_SHA256 = (
    "0ef859d0b18ce9bd9da2b91c0f45b02b28c0bbbc5d4c89aad097e9113fb01c32"
)

_results = []


def _report(name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    _results.append((name, ok))
    assert ok, line


def test_criterion_bound_tables():
    """Constructed bounds match the published figures for all 104 valid
    (problem, d) pairs, exactly, in under a second."""
    t0 = time.perf_counter()
    n_pairs = 0
    for problem, dims in VALID_DIMENSIONS.items():
        for d in dims:
            lo, hi = cb.bounds_for(problem, d)
            exp_lo, exp_hi = bounds_oracle(problem, d)
            assert lo.tolist() == exp_lo, f"problem {problem} d={d}"
            assert hi.tolist() == exp_hi, f"problem {problem} d={d}"
            n_pairs += 1
    elapsed = time.perf_counter() - t0
    _report("bound tables", n_pairs == 104 and elapsed < 1.0,
            f"{n_pairs} pairs in {elapsed:.3f}s")


def test_criterion_penalty_formulas():
    """Penalty reformulations reproduce their published closed forms to
    1e-12 and keep the boundary on the feasible branch."""
    t0 = time.perf_counter()
    ok = abs(cb.penalized_sea(123.456, 70.0) - 1000.0) <= 1e-12
    ok &= abs(cb.penalized_mass(9.9, 100.0) - 14.25952) <= 1e-12
    ok &= cb.penalized_sea(500.0, 60.0) == -500.0
    ok &= cb.penalized_mass(2.0, 50.0) == 2.0
    # the infeasible branch ignores the performance value entirely
    ok &= cb.penalized_sea(1.0, 61.0) == cb.penalized_sea(1e6, 61.0)
    elapsed = time.perf_counter() - t0
    _report("penalty formulas", ok and elapsed < 1.0, f"{elapsed:.3f}s")


def test_criterion_equivalence_matrices():
    """Trigger mapping agrees with the cell-by-cell transcription of the
    equivalence matrices for every dimension and all 30 slots."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    for d in range(1, 31):
        lo, hi = tube_bounds(d)
        for _ in range(3):
            x = rng.uniform(lo, hi)
            ts = trigger_mapping(d, x)
            got = []
            for trig in ts.triggers:
                got += [trig.z, trig.epsilon, trig.h]
            assert got == expected_trigger_slots(d, x), f"d={d}"
    elapsed = time.perf_counter() - t0
    _report("equivalence matrices", elapsed < 1.0,
            f"30 dimensions x 30 slots in {elapsed:.3f}s")


def test_criterion_interpolation():
    """The published 3-point profile interpolates exactly at its control
    points and to 1e-12 elsewhere; the saturated d=34 case reads each row
    value with zero interpolation error."""
    points = ((0.0, 1.6), (60.0, 2.7), (120.0, 0.95))
    profile = ThicknessProfile(points)
    ok = thickness_at(profile, 60.0) == 2.7
    ok &= abs(thickness_at(profile, 30.0) - lerp_oracle(30.0, points)) <= 1e-12
    ok &= abs(thickness_at(profile, 30.0) - 2.15) <= 1e-12

    rng = np.random.default_rng(7)
    thick = rng.uniform(0.7, 3.0, 30)
    x = np.concatenate([[90.0, 90.0, 10.0, 10.0], thick])
    _, saturated = starbox_geometry(34, x)
    row_mid = (np.arange(30) + 0.5) * 4.0
    ok &= all(thickness_at(saturated, z) == t
              for z, t in zip(row_mid, thick))
    _report("interpolation", bool(ok))


def test_criterion_mass_oracle():
    """Mock evaluation of the d=1 crash box at x1 = 90 mm reports the
    analytic perimeter x height x thickness x density mass within 1%."""
    t0 = time.perf_counter()
    p = cb.create_problem(1, 1, [cb.ObjectiveKind.MASS])
    r = cb.evaluate(p, [0.0])  # midpoint -> x1 = 90 mm
    analytic = 0.36 * 0.12 * 0.0021 * 7830.0
    elapsed = time.perf_counter() - t0
    ok = abs(r.mass_kg - 0.7103) / 0.7103 < 0.01
    ok &= abs(r.mass_kg - analytic) / analytic < 0.01
    _report("mass oracle", ok and elapsed < 5.0,
            f"m_s={r.mass_kg:.6f} kg in {elapsed:.2f}s")


def test_criterion_mirror_symmetry():
    """1000 random tube designs with d <= 15: the meshed tube is
    invariant under both face-swap reflections to 1e-9 mm."""
    rng = np.random.default_rng(99)
    t0 = time.perf_counter()
    for k in range(1000):
        d = int(rng.integers(1, 16))
        lo, hi = tube_bounds(d)
        mesh = mesh_crashtube(trigger_mapping(d, rng.uniform(lo, hi)))
        nodes = mesh.nodes
        order = np.lexsort((nodes[:, 2], nodes[:, 1], nodes[:, 0]))
        reference = nodes[order]
        for axis in (0, 1):
            reflected = nodes.copy()
            reflected[:, axis] *= -1.0
            order_r = np.lexsort(
                (reflected[:, 2], reflected[:, 1], reflected[:, 0]))
            assert np.allclose(reflected[order_r], reference, atol=1e-9), (
                f"design {k}, axis {axis}")
    elapsed = time.perf_counter() - t0
    _report("mirror symmetry", True, f"1000 meshes in {elapsed:.1f}s")


def test_criterion_deck_golden_file():
    """Deck bytes for (problem 1, d=1, midpoint) are frozen, and the
    starter embeds the contact keyword and the full steel card."""
    cs, prof = starbox_geometry(1, [90.0])
    deck = build_deck(mesh_starbox(cs, prof), material_for(1),
                      sim_config_for(1), "p1_d1")
    text = deck.starter_text
    ok = deck.checksum == GOLDEN_DECK_SHA256
    ok &= "/INTER/TYPE24" in text
    ok &= "rho = 7830 kg/m^3" in text and fmt(7830e-9) in text
    ok &= "sigma_y = 360 MPa" in text and fmt(0.36) in text
    ok &= "C = 40, p = 5" in text and fmt(40.0) in text and fmt(5.0) in text
    steel_curve = ((0.000, 366), (0.025, 424), (0.049, 476), (0.072, 507),
                   (0.095, 529), (0.118, 546), (0.140, 559), (0.182, 584))
    for eps, sig_mpa in steel_curve:
        ok &= f"({eps:g}, {sig_mpa:g})" in text       # source comment, MPa
        ok &= f"  {fmt(eps)}  {fmt(sig_mpa / 1000.0)}" in text  # deck units
    _report("deck golden file", bool(ok), deck.checksum[:12])


def test_criterion_mock_end_to_end():
    """50 random mock evaluations per problem finish with finite
    objectives, LU >= 1 and exact energy balance, within 60 s."""
    rng = np.random.default_rng(1234)
    t0 = time.perf_counter()
    all_kinds = list(cb.ObjectiveKind)
    for problem in (1, 2, 3):
        dmax = {1: 34, 2: 40, 3: 30}[problem]
        for _ in range(50):
            d = int(rng.integers(1, dmax + 1))
            p = cb.create_problem(problem, d, all_kinds)
            x = rng.uniform(-5, 5, d)
            r = cb.evaluate(p, x, keep_workdir=True)
            try:
                assert all(np.isfinite(v) for v in r.raw.values())
                assert r.raw[cb.ObjectiveKind.LOAD_UNIFORMITY] >= 1.0
                csv = next(Path(r.work_dir).glob("*_th.csv"))
                th = parse_time_history(csv.read_bytes())
                ke0 = sim_config_for(problem).impactor_kinetic_energy_j
                assert np.all(th.internal_j + th.kinetic_j <= ke0 + 1e-9)
            finally:
                shutil.rmtree(r.work_dir, ignore_errors=True)
    elapsed = time.perf_counter() - t0
    _report("mock end-to-end", elapsed < 60.0,
            f"150 evaluations in {elapsed:.1f}s")


def test_criterion_determinism(tmp_path):
    """Identical (problem, d, x, seed) mock runs produce bit-identical
    run logs."""
    from crashbench.cli import main

    logs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        code = main(["optimize", "--problem", "2", "--dim", "3",
                     "--budget", "6", "--seed", "123",
                     "--algo", "one-plus-one-es", "--out", str(out)])
        assert code == 0
        logs.append(
            (out / "run_p2_d3_one-plus-one-es_s123.csv").read_bytes())
    _report("determinism", logs[0] == logs[1],
            f"{len(logs[0])} log bytes")
