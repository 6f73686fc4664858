"""Serial reference decoder and the backward-cost pruning oracle."""

import numpy as np
import pytest

from latbeam import (
    DecodeConfig,
    brute_force_extra_costs,
    decode_utterance,
    load_cost_matrix,
    load_wfst_text,
    serial_decode,
)
from latbeam.reference import lattice_oracle_inputs
from latbeam.synthetic import random_task


class TestSerialDecode:
    def test_w1(self, w1, w1_costs):
        res = serial_decode(w1, w1_costs, beam=10.0)
        assert res.words == [1]
        assert res.total_cost == pytest.approx(0.8)
        assert not res.partial
        assert len(res.alignment) == 1

    def test_cutoff_recorded_per_frame(self, w1, w1_costs):
        res = serial_decode(w1, w1_costs, beam=10.0)
        assert res.cutoffs == pytest.approx([10.0, 10.8])

    def test_pack_maps_are_sorted_by_state(self, rng):
        for seed in rng.integers(0, 10**6, size=10):
            wfst, matrix = random_task(int(seed))
            res = serial_decode(wfst, matrix, beam=6.0)
            for states, packs in res.packs:
                assert np.all(np.diff(states) > 0)
                assert len(states) == len(packs)

    def test_tiny_beam_on_chain_equals_wide_beam(self):
        # A single-successor chain makes the greedy frame-best path the
        # Viterbi path, so even a hairline beam finds the optimum.
        wfst = load_wfst_text(
            "0 1 1 1 0.4\n1 2 2 2 0.3\n2 3 1 3 0.2\n3 0.0\n")
        matrix = load_cost_matrix("3 2\n0.1 0.9\n0.8 0.2\n0.5 0.6\n")
        narrow = serial_decode(wfst, matrix, beam=1e-9)
        wide = serial_decode(wfst, matrix, beam=100.0)
        assert narrow.words == wide.words == [1, 2, 3]
        assert narrow.total_cost == pytest.approx(wide.total_cost)

    def test_acoustic_scale_applied(self, w1, w1_costs):
        res = serial_decode(w1, w1_costs, beam=10.0, acoustic_scale=2.0)
        assert res.total_cost == pytest.approx(0.5 + 2.0 * 0.3)


class TestBruteForceExtraCosts:
    def test_single_path_every_extra_zero(self):
        frame_costs = [np.array([0.0]), np.array([0.6]), np.array([1.0])]
        blocks = [
            [],
            [(False, 0, 0, 0.1, 0.5)],
            [(False, 0, 0, 0.2, 0.2)],
        ]
        _, extras, best = brute_force_extra_costs(
            frame_costs, blocks, np.array([0.0]))
        assert best == pytest.approx(1.0)
        assert extras[1] == pytest.approx([0.0])
        assert extras[2] == pytest.approx([0.0])

    def test_two_route_gap_shows_as_extra(self, diamond, diamond_costs,
                                          engine):
        res = decode_utterance(diamond, diamond_costs,
                               DecodeConfig(lattice_beam=8.0))
        fc, blocks, terminal, live_extras = lattice_oracle_inputs(
            res.work_lattice)
        _, extras, best = brute_force_extra_costs(fc, blocks, terminal)
        assert best == pytest.approx(1.0)
        flat = np.concatenate([e for e in extras if len(e)])
        assert sorted(np.round(flat, 9).tolist()) == pytest.approx(
            [0.0, 0.0, 0.0, 0.4, 0.4, 0.4])

    def test_oracle_matches_engine_extras_and_total(self, rng, engine):
        for seed in rng.integers(0, 10**6, size=20):
            wfst, matrix = random_task(int(seed), max_states=30,
                                       max_arcs=120, max_frames=10)
            cfg = DecodeConfig(beam=7.0, lattice_beam=5.0)
            res = decode_utterance(wfst, matrix, cfg)
            fc, blocks, terminal, live_extras = lattice_oracle_inputs(
                res.work_lattice)
            _, extras, best = brute_force_extra_costs(fc, blocks, terminal)
            if not res.partial:
                assert best == pytest.approx(res.total_cost, abs=1e-9)
            for mine, oracle in zip(live_extras, extras):
                assert mine == pytest.approx(oracle, abs=1e-9)

    def test_extras_are_never_negative(self, rng, engine):
        for seed in rng.integers(0, 10**6, size=10):
            wfst, matrix = random_task(int(seed))
            res = decode_utterance(wfst, matrix,
                                   DecodeConfig(beam=6.0, lattice_beam=4.0))
            fc, blocks, terminal, _ = lattice_oracle_inputs(res.work_lattice)
            _, extras, _ = brute_force_extra_costs(fc, blocks, terminal)
            for e in extras:
                assert np.all(np.asarray(e) >= 0.0)
