import numpy as np
import pytest

from morphoprint.genome import Genome
from morphoprint.organism import Organism, seed_ring
from morphoprint.params import SimParams


def make_genome(**overrides):
    base = dict(metabolism=0.01, drag=0.2, energy_capacity=5.0,
                stiffness=1.0, split_ratio=0.5)
    base.update(overrides)
    return Genome(**base)


def ring_of(energies, spacing=5.0):
    n = len(energies)
    theta = 2 * np.pi * np.arange(n) / n
    r = spacing * n / (2 * np.pi)
    pos = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    return Organism(pos, np.zeros_like(pos), np.array(energies, dtype=float),
                    np.arange(n, dtype=np.int64))


class TestRestLengths:
    def test_sqrt_of_energy_sum(self):
        params = SimParams(rest_length_scale=1.0)
        org = ring_of([4.0, 5.0, 4.0])
        org.update_rest_lengths(params)
        assert org.rest[0] == pytest.approx(3.0, abs=1e-12)  # sqrt(4 + 5)

    def test_equal_energy_ring_equal_rests(self):
        params = SimParams()
        org = ring_of([2.0] * 8)
        org.update_rest_lengths(params)
        np.testing.assert_allclose(org.rest, org.rest[0])

    def test_doubling_energy_scales_by_sqrt2(self):
        params = SimParams(rest_length_scale=1.0)
        a = ring_of([3.0, 3.0, 3.0])
        a.update_rest_lengths(params)
        b = ring_of([6.0, 6.0, 6.0])
        b.update_rest_lengths(params)
        np.testing.assert_allclose(b.rest, np.sqrt(2) * a.rest, atol=1e-12)

    def test_zero_energy_pair_uses_floor(self):
        params = SimParams(rest_length_scale=1.0, rest_energy_floor=1e-3)
        org = ring_of([0.0, 0.0, 0.0])
        org.update_rest_lengths(params)
        np.testing.assert_allclose(org.rest, np.sqrt(1e-3), atol=1e-15)


class TestSpringForces:
    def test_zero_extension_zero_force(self):
        params = SimParams()
        org = ring_of([2.0] * 6)
        org.rest = org.edge_lengths()
        f = org.spring_forces(make_genome(), params)
        np.testing.assert_allclose(f, 0.0, atol=1e-12)

    def test_hooke_magnitude(self):
        # cells 2.5 apart with rest 2.0 -> extension 0.5, k_eff = 2 -> |F| = 1
        params = SimParams(spring_scale=2.0)
        pos = np.array([[0.0, 0.0], [2.5, 0.0], [1.25, 10.0]])
        org = Organism(pos, np.zeros_like(pos), np.full(3, 2.0), np.arange(3))
        lengths = org.edge_lengths()
        org.rest = np.array([2.0, lengths[1], lengths[2]])  # other edges at rest
        f = org.spring_forces(make_genome(stiffness=1.0), params)
        np.testing.assert_allclose(f[0], [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(f[1], [-1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(f[2], [0.0, 0.0], atol=1e-12)

    def test_forces_sum_to_zero(self):
        params = SimParams()
        rng = np.random.default_rng(3)
        org = ring_of(rng.uniform(1, 5, 12))
        org.pos += rng.normal(0, 1.0, org.pos.shape)
        org.update_rest_lengths(params)
        f = org.spring_forces(make_genome(), params)
        np.testing.assert_allclose(f.sum(axis=0), 0.0, atol=1e-9)

    def test_extension_pulls_endpoints_together(self):
        params = SimParams(spring_scale=1.0)
        pos = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 3.0]])
        org = Organism(pos, np.zeros_like(pos), np.full(3, 2.0), np.arange(3))
        lengths = org.edge_lengths()
        org.rest = np.array([1.0, lengths[1], lengths[2]])  # only edge 0 stretched
        f = org.spring_forces(make_genome(stiffness=1.0), params)
        assert f[0][0] > 0  # cell 0 pulled toward +x (cell 1)
        assert f[1][0] < 0

    def test_compression_pushes_endpoints_apart(self):
        params = SimParams(spring_scale=1.0)
        pos = np.array([[0.0, 0.0], [0.5, 0.0], [0.25, 3.0]])
        org = Organism(pos, np.zeros_like(pos), np.full(3, 2.0), np.arange(3))
        lengths = org.edge_lengths()
        org.rest = np.array([2.0, lengths[1], lengths[2]])  # edge 0 compressed
        f = org.spring_forces(make_genome(stiffness=1.0), params)
        assert f[0][0] < 0  # pushed away from cell 1
        assert f[1][0] > 0


class TestEnergyDiffusion:
    def test_pairwise_transfer_amounts(self):
        params = SimParams(energy_diffusion=0.1, transfer_loss=0.0)
        org = ring_of([10.0, 10.0, 2.0, 2.0])
        org.diffuse_energy(params)
        np.testing.assert_allclose(org.energy, [9.0, 9.0, 3.0, 3.0], atol=1e-12)

    def test_equal_energies_no_transfers(self):
        params = SimParams(energy_diffusion=0.1, transfer_loss=0.0)
        org = ring_of([4.0] * 6)
        org.diffuse_energy(params)
        np.testing.assert_allclose(org.energy, 4.0, atol=1e-15)

    def test_lossless_diffusion_conserves_total(self):
        params = SimParams(energy_diffusion=0.1, transfer_loss=0.0)
        rng = np.random.default_rng(5)
        org = ring_of(rng.uniform(0.5, 8.0, 30))
        total = org.total_energy()
        for _ in range(500):
            org.diffuse_energy(params)
            assert org.total_energy() == pytest.approx(total, abs=1e-9)

    def test_transfer_skipped_when_loss_exceeds_gain(self):
        # edge length 5 at loss 0.4 -> loss 2.0 > donated 0.1 * 10 = 1.0
        params = SimParams(energy_diffusion=0.1, transfer_loss=0.4)
        org = ring_of([10.0, 10.0, 2.0, 2.0], spacing=5.0)
        before = org.energy.copy()
        org.diffuse_energy(params)
        np.testing.assert_allclose(org.energy, before, atol=1e-12)

    def test_lossy_transfer_receiver_gets_less(self):
        params = SimParams(energy_diffusion=0.5, transfer_loss=0.1)
        pos = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        org = Organism(pos, np.zeros_like(pos),
                       np.array([10.0, 10.0, 2.0, 2.0]), np.arange(4))
        org.diffuse_energy(params)
        # donors lose 5.0; receivers gain 5.0 - 0.1 * 2.0 = 4.8 over unit-2 edges
        np.testing.assert_allclose(org.energy, [5.0, 5.0, 6.8, 6.8], atol=1e-12)


class TestCellRules:
    def test_dead_cell_removed_and_ring_reconnected(self):
        params = SimParams()
        org = ring_of([3.0, 0.0, 3.0, 3.0])
        ids_before = org.ids.copy()
        alive, _ = org.apply_rules(make_genome(), params, next_id=100)
        assert alive
        assert org.n_cells == 3
        assert list(org.ids) == [ids_before[0], ids_before[2], ids_before[3]]

    def test_ring_of_three_with_death_dies_entirely(self):
        params = SimParams()
        org = ring_of([3.0, 0.0, 3.0])
        alive, _ = org.apply_rules(make_genome(), params, next_id=100)
        assert not alive

    def test_division_halves_energy_exactly(self):
        params = SimParams()
        org = ring_of([5.0, 2.0, 2.0])
        total = org.total_energy()
        alive, nid = org.apply_rules(make_genome(energy_capacity=5.0), params, next_id=100)
        assert alive and nid == 101
        assert org.n_cells == 4
        assert org.energy[0] == pytest.approx(2.5)
        assert org.energy[1] == pytest.approx(2.5)
        assert org.total_energy() == pytest.approx(total)  # conservation, exact halves
        np.testing.assert_allclose(org.pos[0], org.pos[1])  # child shares the spot

    def test_child_inserted_after_parent(self):
        params = SimParams()
        org = ring_of([2.0, 6.0, 2.0])
        alive, _ = org.apply_rules(make_genome(energy_capacity=5.0), params, next_id=50)
        assert alive
        assert org.n_cells == 4
        assert list(org.ids) == [0, 1, 50, 2]

    def test_no_rule_fires_leaves_ring_unchanged(self):
        params = SimParams()
        org = ring_of([2.0, 3.0, 4.0])
        before = org.energy.copy()
        alive, nid = org.apply_rules(make_genome(energy_capacity=5.0), params, next_id=9)
        assert alive and nid == 9
        assert org.n_cells == 3
        np.testing.assert_allclose(org.energy, before)

    def test_energies_clamped_to_capacity(self):
        params = SimParams()
        org = ring_of([12.0, 2.0, 2.0])
        alive, _ = org.apply_rules(make_genome(energy_capacity=5.0), params, next_id=50)
        assert alive
        assert (org.energy <= 5.0).all()

    def test_divide_disabled_under_flag(self):
        params = SimParams()
        org = ring_of([6.0, 2.0, 2.0])
        alive, _ = org.apply_rules(make_genome(energy_capacity=5.0), params,
                                   next_id=50, allow_divide=False)
        assert alive
        assert org.n_cells == 3


class TestSplitPairAndCut:
    def test_six_equal_cells_ratio_half(self):
        org = ring_of([2.0] * 6)
        pair = org.find_split_pair(0.5)
        assert pair == (0, 3)  # three leading edges clockwise of the anchor

    def test_cut_produces_two_rings_of_four(self):
        params = SimParams()
        org = ring_of([2.0] * 6)
        first, second, nid = org.split(0, 3, params, next_id=100)
        assert first.n_cells == 4 and second.n_cells == 4
        assert nid == 102
        assert list(first.ids) == [0, 1, 2, 3]
        assert list(second.ids) == [100, 4, 5, 101]

    def test_cut_conserves_geometry_and_duplicates_endpoints(self):
        params = SimParams()
        org = ring_of([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        first, second, _ = org.split(1, 4, params, next_id=100)
        np.testing.assert_allclose(first.pos[0], second.pos[-1])
        np.testing.assert_allclose(first.pos[-1], second.pos[0])
        assert first.n_cells + second.n_cells == org.n_cells + 2

    def test_extreme_ratio_aborts(self):
        # the walk wraps all the way back to the anchor; both guards trip
        org = ring_of([1.0, 1.0, 1.0, 97.0])
        assert org.find_split_pair(1.0 - 1e-12) is None

    def test_tiny_ring_aborts(self):
        org = ring_of([2.0, 2.0, 2.0])
        assert org.find_split_pair(0.5) is None


class TestSeedRing:
    def test_cell_count_and_energy(self):
        params = SimParams()
        org = seed_ring(params)
        assert org.n_cells == 62  # floor(2 pi 100 / (2 * 5))
        np.testing.assert_allclose(org.energy, 5.0)

    def test_even_spacing_on_circle(self):
        params = SimParams()
        org = seed_ring(params)
        centre = np.array([300.0, 300.0])
        radii = np.hypot(*(org.pos - centre).T)
        np.testing.assert_allclose(radii, 100.0, atol=1e-9)
        lengths = org.edge_lengths()
        np.testing.assert_allclose(lengths, lengths[0], atol=1e-9)
