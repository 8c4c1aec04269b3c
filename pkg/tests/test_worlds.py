"""Tests for world construction and pair delivery, against brute-force oracles."""

import math

import numpy as np
import pytest

from locclab import (
    CapacityError,
    HermitianOperator,
    build_epr_world,
    build_er_world,
    channel_purity_profile,
    deliver_pair,
    purity,
    qubits,
    singlet_density,
    trace_distance,
)
from locclab.worlds import HamiltonianDecomposition, World

import oracles


class TestErWorld:
    def test_no_channel_qubits(self):
        world = build_er_world()
        assert world.mode == "ER"
        assert world.q_dim == 0

    def test_delivers_exact_singlet(self):
        pair = deliver_pair(build_er_world())
        assert trace_distance(pair.state, singlet_density()) == 0.0
        assert abs(purity(pair.state) - 1.0) < 1e-10


class TestEprConstruction:
    def test_zero_coupling_term_is_exactly_zero(self):
        world = build_epr_world(2, 1, 0.0, seed=3)
        assert not np.any(world.decomposition.h_coupling.matrix)
        assert world.decomposition.lam == 0.0

    def test_total_dimension_includes_boundary(self):
        world = build_epr_world(2, 2, 0.5, seed=3)
        assert world.total_dim == 64

    def test_assembled_hamiltonian_is_hermitian(self):
        for seed in range(5):
            world = build_epr_world(2, 2, 0.7, seed=seed)
            h = world.decomposition.total_operator().matrix
            assert np.max(np.abs(h - h.conj().T)) < 1e-10

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            build_epr_world(8, 8, 0.1, seed=0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            build_epr_world(1, 1, 0.0, seed=0)
        with pytest.raises(ValueError):
            build_epr_world(2, 0, 0.0, seed=0)
        with pytest.raises(ValueError):
            build_epr_world(2, 1, -0.5, seed=0)

    def test_rest_hamiltonian_entries_bounded(self):
        world = build_epr_world(2, 3, 0.5, seed=11)
        assert np.max(np.abs(world.decomposition.h_rest.matrix)) <= 3.0 + 1e-12


class TestDeliverPair:
    def test_zero_coupling_gives_singlet_any_channel_size(self):
        states = []
        for q_dim in (2, 3, 4):
            pair = deliver_pair(build_epr_world(q_dim, 2, 0.0, seed=9))
            assert trace_distance(pair.state, singlet_density()) <= 1e-10
            states.append(pair.state.matrix)
        assert np.array_equal(states[0], states[1])
        assert np.array_equal(states[1], states[2])

    def test_zero_coupling_independent_of_rest_hamiltonian_oracle_path(self):
        # decoupling through the full simulation, not the factored fast path
        reference = None
        for seed in (1, 2, 3):
            world = build_epr_world(2, 2, 0.0, seed=seed)
            pair = oracles.dense_world_pair(
                world.decomposition.h_rest.matrix, 2, 2, 0.0, world.evolution_time
            )
            assert np.max(np.abs(pair - singlet_density().matrix)) < 1e-10
            if reference is not None:
                assert np.max(np.abs(pair - reference)) < 1e-10
            reference = pair

    @pytest.mark.parametrize(
        "q_dim,qbar_dim,lam,seed",
        [(2, 2, 0.8, 5), (2, 1, 0.3, 1), (3, 2, 0.6, 7), (2, 3, 1.1, 2), (4, 2, 0.5, 4)],
    )
    def test_matches_brute_force_dense_oracle(self, q_dim, qbar_dim, lam, seed):
        world = build_epr_world(q_dim, qbar_dim, lam, seed=seed)
        ours = deliver_pair(world).state.matrix
        oracle = oracles.dense_world_pair(
            world.decomposition.h_rest.matrix, q_dim, qbar_dim, lam, world.evolution_time
        )
        assert np.max(np.abs(ours - oracle)) < 1e-10

    def test_coupling_decoheres(self):
        pair = deliver_pair(build_epr_world(2, 2, 0.8, seed=5))
        assert purity(pair.state) < 1.0 - 1e-6

    def test_decoherence_detectable_iff_coupled(self):
        for lam in (0.1, 0.4, 0.9):
            for seed in (0, 1):
                pair = deliver_pair(build_epr_world(2, 2, lam, seed=seed))
                assert purity(pair.state) < 1.0 - 1e-6
        pair = deliver_pair(build_epr_world(2, 2, 0.0, seed=0))
        assert abs(purity(pair.state) - 1.0) < 1e-12

    def test_closed_form_with_idle_rest(self):
        # with the rest Hamiltonian zero, each rest qubit contributes a
        # cos(lam*t) factor to the pair coherence
        for qbar_dim, lam, t in ((1, 0.7, 1.0), (2, 0.45, 1.3), (3, 1.2, 0.5)):
            world = build_epr_world(2, qbar_dim, lam, seed=0, evolution_time=t)
            idle = HamiltonianDecomposition(
                world.decomposition.h_channel,
                HermitianOperator(
                    np.zeros_like(world.decomposition.h_rest.matrix),
                    world.decomposition.h_rest.layout,
                ),
                world.decomposition.h_coupling,
                lam,
            )
            custom = World(
                mode="EPR",
                q_dim=2,
                qbar_dim=qbar_dim,
                decomposition=idle,
                evolution_time=t,
            )
            ours = deliver_pair(custom).state.matrix
            expected = oracles.dephased_singlet(math.cos(lam * t) ** qbar_dim)
            assert np.max(np.abs(ours - expected)) < 1e-10

    def test_exact_dephasing_floor(self):
        # coherence cos(lam*t) vanishes at lam*t = pi/2: maximally mixed on
        # the pair's support, purity exactly 1/2
        world = build_epr_world(2, 1, math.pi / 2, seed=0, evolution_time=1.0)
        idle = HamiltonianDecomposition(
            world.decomposition.h_channel,
            HermitianOperator(
                np.zeros_like(world.decomposition.h_rest.matrix),
                world.decomposition.h_rest.layout,
            ),
            world.decomposition.h_coupling,
            math.pi / 2,
        )
        custom = World(mode="EPR", q_dim=2, qbar_dim=1, decomposition=idle, evolution_time=1.0)
        assert abs(purity(deliver_pair(custom).state) - 0.5) < 1e-10

    def test_location_labels_never_touch_numbers(self):
        a = deliver_pair(build_epr_world(2, 2, 0.6, seed=8, location_labels=("here", "there")))
        b = deliver_pair(build_epr_world(2, 2, 0.6, seed=8, location_labels=("x1", "x2")))
        assert np.array_equal(a.state.matrix, b.state.matrix)


class TestPurityProfile:
    def test_single_zero_grid(self):
        assert channel_purity_profile([0.0]) == [(0.0, pytest.approx(1.0, abs=1e-10))]

    def test_strictly_decreasing_in_regime(self):
        profile = channel_purity_profile(
            [0.0, 0.4, 0.8], q_dim=2, qbar_dim=2, seed=3, evolution_time=0.5
        )
        values = [p for _, p in profile]
        assert abs(values[0] - 1.0) < 1e-10
        assert values[0] > values[1] > values[2]

    def test_profile_matches_dense_oracle(self):
        profile = channel_purity_profile([0.0, 0.5, 1.0], qbar_dim=2, seed=6, evolution_time=0.5)
        for lam, p in profile[1:]:
            world = build_epr_world(2, 2, lam, seed=6, evolution_time=0.5)
            pair = oracles.dense_world_pair(
                world.decomposition.h_rest.matrix, 2, 2, lam, 0.5
            )
            assert abs(p - float(np.trace(pair @ pair).real)) < 1e-10

    def test_large_coupling_approaches_half_purity_floor(self):
        grid = [0.0] + [1.2 + 0.15 * k for k in range(12)]
        profile = channel_purity_profile(grid, q_dim=2, qbar_dim=2, seed=1)
        values = [p for _, p in profile]
        assert min(values) >= 0.5 - 1e-9
        assert min(values) < 0.56

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            channel_purity_profile([])
        with pytest.raises(ValueError):
            channel_purity_profile([0.0, 0.5, 0.5])
