import numpy as np
import pytest

from crashbench.errors import GeometryError
from crashbench.meshing import (
    TUBE_WALL_THICKNESS_MM,
    aspect_ratios,
    compute_mass,
    mesh_beam,
    mesh_crashtube,
    mesh_starbox,
    quad_areas,
)
from crashbench.parameterization import (
    CrossSection,
    ThicknessProfile,
    TriggerSet,
    TriggerTriplet,
    beam_rib_layout,
    starbox_geometry,
    thickness_at,
    trigger_mapping,
    tube_bounds,
)

STEEL_RHO = 7830.0
ALU_RHO = 2700.0


def neutral_triggers() -> TriggerSet:
    return TriggerSet(tuple(TriggerTriplet(0.0, 0.0, 8.0) for _ in range(10)))


def sorted_rows(a: np.ndarray) -> np.ndarray:
    return a[np.lexsort((a[:, 2], a[:, 1], a[:, 0]))]


class TestStarboxMesh:
    def test_30_rows_and_barycenter_heights(self):
        cs, prof = starbox_geometry(1, [90.0])
        mesh = mesh_starbox(cs, prof)
        assert len(mesh.parts) == 30
        z = np.unique(mesh.nodes[:, 2])
        assert len(z) == 31
        bary_z = np.unique(np.round(mesh.barycenters[:, 2], 9))
        assert np.allclose(bary_z, np.arange(2.0, 120.0, 4.0))

    def test_constant_profile_gives_uniform_parts(self):
        cs, prof = starbox_geometry(2, [80.0, 100.0])
        mesh = mesh_starbox(cs, prof)
        assert set(mesh.parts.values()) == {2.1}

    def test_row_thickness_interpolated_at_barycenter(self):
        from oracles import lerp_oracle

        cs, _ = starbox_geometry(1, [90.0])
        points = ((0.0, 1.6), (60.0, 2.7), (120.0, 0.95))
        mesh = mesh_starbox(cs, ThicknessProfile(points))
        # row 15 spans z in [56, 60]: barycenter 58
        assert mesh.parts[15] == pytest.approx(
            lerp_oracle(58.0, points), abs=1e-12)

    def test_mass_matches_analytic_perimeter_formula(self):
        cs, prof = starbox_geometry(1, [90.0])
        report = compute_mass(mesh_starbox(cs, prof), STEEL_RHO)
        analytic = 0.36 * 0.12 * 0.0021 * STEEL_RHO  # m * m * m * kg/m^3
        assert report.total_kg == pytest.approx(analytic, rel=0.005)
        assert report.total_kg == pytest.approx(0.7103, rel=0.01)
        assert sum(report.per_part_kg.values()) == pytest.approx(
            report.total_kg, rel=1e-12)

    def test_star_section_mass_analytic(self):
        cs, prof = starbox_geometry(4, [100.0, 80.0, 10.0, 20.0])
        report = compute_mass(mesh_starbox(cs, prof), STEEL_RHO)
        analytic = cs.perimeter() * 120.0 * 2.1 * STEEL_RHO * 1e-9
        assert report.total_kg == pytest.approx(analytic, rel=0.005)

    def test_mass_linear_in_thickness(self):
        cs, _ = starbox_geometry(1, [90.0])
        m1 = compute_mass(
            mesh_starbox(cs, ThicknessProfile(((0.0, 1.0),))), STEEL_RHO)
        m2 = compute_mass(
            mesh_starbox(cs, ThicknessProfile(((0.0, 2.0),))), STEEL_RHO)
        assert m2.total_kg == pytest.approx(2 * m1.total_kg, rel=1e-12)

    def test_zero_density_zero_mass(self):
        cs, prof = starbox_geometry(1, [90.0])
        assert compute_mass(mesh_starbox(cs, prof), 0.0).total_kg == 0.0

    def test_deterministic_bytes(self):
        cs, prof = starbox_geometry(3, [75.0, 110.0, 1.9])
        a = mesh_starbox(cs, prof).dump()
        b = mesh_starbox(cs, prof).dump()
        assert a == b

    def test_node_count_independent_of_x(self):
        for x in ([60.0], [90.0], [120.0]):
            cs, prof = starbox_geometry(1, x)
            mesh = mesh_starbox(cs, prof)
            assert len(mesh.nodes) == 31 * 96
            assert len(mesh.elements) == 30 * 96

    def test_positive_areas_and_bounded_aspect(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            x = [rng.uniform(60, 120), rng.uniform(60, 120),
                 rng.uniform(0, 30), rng.uniform(0, 30), rng.uniform(0.7, 3)]
            cs, prof = starbox_geometry(5, x)
            mesh = mesh_starbox(cs, prof)
            assert quad_areas(mesh).min() > 0
            assert aspect_ratios(mesh).max() < 10

    def test_degenerate_polygon_rejected(self):
        line = CrossSection(((0, 0), (1, 0), (2, 0)), 120.0)
        with pytest.raises(GeometryError):
            mesh_starbox(line, ThicknessProfile(((0.0, 2.1),)))


class TestBeamMesh:
    def test_rib_rows_and_parts(self):
        layout = beam_rib_layout(3, [1.0, 2.0, 3.0])
        mesh = mesh_beam(layout)
        assert len(mesh.parts) == 42  # 5 ribs x 8 rows + 2 flanges
        rib_constants = [mesh.parts[r * 8 + 1] for r in range(5)]
        assert rib_constants == [3.0, 1.7, 1.0, 1.7, 2.0]
        assert mesh.parts[41] == 1.7 and mesh.parts[42] == 1.7

    def test_all_constant_layout(self):
        mesh = mesh_beam(beam_rib_layout(1, [1.7]))
        assert set(mesh.parts.values()) == {1.7}

    def test_d40_saturated_distinct_rows(self):
        rng = np.random.default_rng(8)
        x = rng.uniform(0.5, 3.0, 40)
        mesh = mesh_beam(beam_rib_layout(40, x))
        rib_parts = [mesh.parts[i] for i in range(1, 41)]
        assert sorted(rib_parts) == sorted(x.tolist())

    def test_mass_analytic(self):
        mesh = mesh_beam(beam_rib_layout(1, [1.7]))
        report = compute_mass(mesh, ALU_RHO)
        analytic = (5 * 800 * 120 * 1.7 + 2 * 800 * 80 * 1.7) * ALU_RHO * 1e-9
        assert report.total_kg == pytest.approx(analytic, rel=0.005)

    def test_8_rows_per_rib(self):
        mesh = mesh_beam(beam_rib_layout(1, [1.7]))
        rib_z = np.unique(mesh.nodes[mesh.nodes[:, 1] == 40.0][:, 2])
        assert len(rib_z) == 9  # 8 rows


class TestCrashTubeMesh:
    def test_neutral_triggers_give_perfect_prism(self):
        mesh = mesh_crashtube(neutral_triggers())
        x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
        assert x.min() == -60.0 and x.max() == 60.0
        assert y.min() == -40.0 and y.max() == 40.0
        on_wall = (np.abs(x) == 60.0) | (np.abs(y) == 40.0)
        assert on_wall.all()
        assert mesh.parts == {1: TUBE_WALL_THICKNESS_MM}

    def test_mass_analytic(self):
        mesh = mesh_crashtube(neutral_triggers())
        report = compute_mass(mesh, STEEL_RHO)
        analytic = 2 * (120 + 80) * 800 * TUBE_WALL_THICKNESS_MM * STEEL_RHO * 1e-9
        assert report.total_kg == pytest.approx(analytic, rel=0.005)

    def test_single_outward_trigger_moves_both_walls_of_face_a(self):
        trips = [TriggerTriplet(0.0, 4.0, 8.0)] + [
            TriggerTriplet(0.0, 0.0, 8.0)] * 9
        mesh = mesh_crashtube(TriggerSet(tuple(trips)))
        y = mesh.nodes[:, 1]
        station = 800.0 / 6.0
        in_band = np.abs(mesh.nodes[:, 2] - station) <= 4.0
        interior = np.abs(mesh.nodes[:, 0]) < 60.0
        band_a = in_band & interior & (np.abs(np.abs(y) - 44.0) < 1e-12)
        assert band_a.any()
        assert np.all(np.abs(y) <= 44.0)
        # both signs present: complementary face carries the same offset
        assert (y[band_a] > 0).any() and (y[band_a] < 0).any()

    def test_inward_trigger(self):
        trips = [TriggerTriplet(0.0, -4.0, 8.0)] + [
            TriggerTriplet(0.0, 0.0, 8.0)] * 9
        mesh = mesh_crashtube(TriggerSet(tuple(trips)))
        y = mesh.nodes[:, 1]
        assert np.abs(y).max() == 40.0
        assert (np.abs(y) < 40.0).sum() > 0

    def test_h_zero_means_no_displacement(self):
        trips = [TriggerTriplet(0.0, 4.0, 0.0)] + [
            TriggerTriplet(0.0, 0.0, 8.0)] * 9
        mesh = mesh_crashtube(TriggerSet(tuple(trips)))
        ref = mesh_crashtube(neutral_triggers())
        assert np.array_equal(mesh.nodes, ref.nodes)

    def test_face_swap_reflection_invariance(self):
        rng = np.random.default_rng(4)
        for d in (1, 5, 9, 15):
            lo, hi = tube_bounds(d)
            mesh = mesh_crashtube(trigger_mapping(d, rng.uniform(lo, hi)))
            for axis in (0, 1):
                reflected = mesh.nodes.copy()
                reflected[:, axis] *= -1
                assert np.allclose(
                    sorted_rows(reflected), sorted_rows(mesh.nodes),
                    atol=1e-9,
                ), f"d={d} axis={axis}"

    def test_in_bounds_designs_never_overlap(self):
        # stations are 133.3 mm apart; with |z| <= 40, h <= 16 plus the
        # 4 mm ramps the closest band edges stay > 29 mm apart
        trips = [TriggerTriplet(40.0, 1.0, 16.0),
                 TriggerTriplet(-40.0, 1.0, 16.0)]
        trips += [TriggerTriplet(0.0, 0.0, 8.0)] * 8
        mesh_crashtube(TriggerSet(tuple(trips)))  # must not raise

    def test_band_overlap_rejected(self, monkeypatch):
        import crashbench.meshing as meshing

        monkeypatch.setattr(meshing, "TUBE_STATIONS_MM",
                            (100.0, 110.0, 400.0, 500.0, 600.0))
        trips = [TriggerTriplet(0.0, 1.0, 16.0),
                 TriggerTriplet(0.0, 1.0, 16.0)]
        trips += [TriggerTriplet(0.0, 0.0, 0.0)] * 8
        with pytest.raises(GeometryError, match="overlap"):
            mesh_crashtube(TriggerSet(tuple(trips)))

    def test_deterministic_nodes(self):
        lo, hi = tube_bounds(30)
        x = np.random.default_rng(9).uniform(lo, hi)
        a = mesh_crashtube(trigger_mapping(30, x))
        b = mesh_crashtube(trigger_mapping(30, x))
        assert np.array_equal(a.nodes, b.nodes)
        assert np.array_equal(a.elements, b.elements)

    def test_positive_areas_and_bounded_aspect(self):
        lo, hi = tube_bounds(30)
        x = np.random.default_rng(10).uniform(lo, hi)
        tube = mesh_crashtube(trigger_mapping(30, x))
        assert quad_areas(tube).min() > 0
        assert aspect_ratios(tube).max() < 10
        beam = mesh_beam(beam_rib_layout(1, [1.7]))
        assert quad_areas(beam).min() > 0
        assert aspect_ratios(beam).max() < 10


class TestMeshDump:
    def test_dump_roundtrip_fields(self):
        cs, prof = starbox_geometry(1, [60.0])
        mesh = mesh_starbox(cs, prof)
        text = mesh.dump()
        lines = text.strip().splitlines()
        n_nodes = sum(1 for l in lines if l.startswith("NODE"))
        n_elems = sum(1 for l in lines if l.startswith("ELEM"))
        n_parts = sum(1 for l in lines if l.startswith("PART"))
        assert (n_nodes, n_elems, n_parts) == (
            len(mesh.nodes), len(mesh.elements), len(mesh.parts))
