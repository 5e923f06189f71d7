"""
Tests for the weight check, the simulation oracle and randomized trials.
"""

import math

import numpy as np
import pytest

from recoupler.core.config import get_settings
from recoupler.core.exceptions import TargetShapeMismatchError, TooManySpinsError
from recoupler.models import GateSequence, Purpose, Rotation, SignMatrix, SpinSystem
from recoupler.services.pulsegen import cnot_wrapper, emit, interval_duration
from recoupler.services.signmatrix import (
    build_decouple,
    build_decouple_zeeman,
    build_knn_decouple,
    build_knn_recouple,
    build_parallel_recouple,
    build_recouple,
)
from recoupler.services.verify import (
    Target,
    closed_form_phases,
    compare_to_target,
    dense_gate_check,
    run_trials,
    simulate,
    simulate_restricted,
    verify_program,
    weights,
)
from recoupler.tests.helpers import EQ15_ROWS, random_system, signs_from_rows


def recoupling_program(matrix, system):
    i, j = matrix.purpose.pairs[0]
    return emit(matrix, interval_duration(system.coupling(i, j), matrix.m))


class TestWeights:
    """Exact integer weights"""

    def test_literal_decoupler(self):
        w, z = weights(SignMatrix(signs_from_rows(EQ15_ROWS), Purpose.decouple()))
        assert np.array_equal(w, 4 * np.eye(4, dtype=np.int64))
        assert z.tolist() == [4, 0, 0, 0]

    def test_recoupled_pair_weight(self, registry):
        matrix = build_recouple(6, 3, 5, registry)
        w, z = weights(matrix)
        assert w[2, 4] == matrix.m
        assert w[0, 1] == 0
        assert np.all(z == 0)


class TestTarget:
    def test_parse(self):
        assert Target.parse("identity") == Target.identity()
        assert Target.parse("zz:3,1") == Target.zz((1, 3))
        assert Target.parse("zz:1,2;3,4").pairs == ((1, 2), (3, 4))
        assert Target.parse("cnot:2,1") == Target.cnot(2, 1)
        with pytest.raises(ValueError):
            Target.parse("swap:1,2")
        with pytest.raises(ValueError):
            Target.parse("zz")

    def test_for_program(self, registry):
        program = emit(build_recouple(4, 1, 4, registry), 1e-3)
        assert Target.for_program(program) == Target.zz((1, 4))
        assert Target.for_program(emit(build_decouple(4, registry), 1e-3)) == Target.identity()


class TestOracle:
    """Brute-force simulation"""

    def test_refocusing_cancels_coupling(self):
        system = SpinSystem(2, (0.0, 0.0), {(1, 2): 2 * math.pi * 40})
        program = emit(SignMatrix(np.array([[1, 1], [1, -1]]), Purpose.decouple()), 2e-3)
        result = simulate(system, program)
        assert result.is_diagonal
        assert compare_to_target(result, Target.identity()) < 1e-12

    @pytest.mark.parametrize("n", range(2, 13))
    def test_decoupling(self, registry, rng, n):
        system = random_system(n, rng)
        program = emit(build_decouple_zeeman(n, registry), 5e-4)
        report = verify_program(system, program)
        assert report.passed
        assert report.oracle == "full"
        assert report.oracle_max_phase_dev < 1e-10

    @pytest.mark.parametrize("n", range(2, 11))
    def test_recoupling_every_pair(self, registry, rng, n):
        system = random_system(n, rng)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                program = recoupling_program(build_recouple(n, i, j, registry), system)
                result = simulate(system, program)
                assert compare_to_target(result, Target.zz((i, j))) < 1e-10

    def test_plain_decoupling_keeps_zeeman(self, registry, rng):
        system = random_system(4, rng)
        report = verify_program(system, emit(build_decouple(4, registry), 1e-3))
        assert report.passed
        assert "zeeman_phase" not in report.verdicts
        assert report.zeeman_weights["1"] == 4
        assert any("reported only" in note for note in report.notes)

    def test_zz_differs_from_identity_by_quarter_turns(self, registry, rng):
        system = random_system(4, rng)
        program = recoupling_program(build_recouple(4, 1, 2, registry), system)
        result = simulate(system, program)
        assert compare_to_target(result, Target.identity()) == pytest.approx(math.pi / 2)

    def test_column_permutation_invariance(self, registry, rng):
        matrix = build_recouple(5, 2, 4, registry)
        system = random_system(5, rng)
        for _ in range(5):
            shuffled = matrix.with_column_order(rng.permutation(matrix.m))
            result = simulate(system, recoupling_program(shuffled, system))
            assert compare_to_target(result, Target.zz((2, 4))) < 1e-10

    def test_duration_invariance_for_decoupling(self, registry, rng):
        system = random_system(4, rng)
        matrix = build_decouple_zeeman(4, registry)
        for t in (1e-5, 3.7e-4, 2e-3):
            result = simulate(system, emit(matrix, t))
            assert compare_to_target(result, Target.identity()) < 1e-10

    @pytest.mark.parametrize("n", [4, 8])
    def test_parallel_recoupling(self, registry, rng, n):
        pairs = [(1, 2), (n - 1, n)]
        system = random_system(n, rng)
        # equal couplings on both pairs so one duration serves both
        couplings = dict(system.couplings)
        couplings[(n - 1, n)] = couplings[(1, 2)]
        system = SpinSystem(n, system.zeeman, couplings)
        program = recoupling_program(build_parallel_recouple(n, pairs, registry), system)
        report = verify_program(system, program)
        assert report.target == "zz:1,2;%d,%d" % (n - 1, n)
        assert report.passed

    def test_megahertz_zeeman(self, registry, rng):
        system = random_system(4, rng, zeeman_hz=5e8)
        program = recoupling_program(build_recouple(4, 1, 2, registry), system)
        report = verify_program(system, program)
        assert report.passed
        assert report.oracle_max_phase_dev < 1e-10

    def test_wrong_duration_fails(self, registry, rng):
        system = random_system(4, rng)
        matrix = build_recouple(4, 1, 3, registry)
        program = emit(matrix, 0.5 * interval_duration(system.coupling(1, 3), matrix.m))
        report = verify_program(system, program)
        assert report.verdicts["coupling_weights"]
        assert not report.verdicts["coupling_phase"]
        assert not report.passed

    def test_restricted_matches_closed_form(self, registry, rng):
        matrix = build_decouple(6, registry)
        system = random_system(6, rng)
        program = emit(matrix, 4e-4)
        for spins in ((1, 2), (3, 5, 6)):
            result = simulate_restricted(system, program, spins)
            predicted = closed_form_phases(matrix, system, 4e-4, spins)
            assert np.allclose(np.angle(np.exp(1j * (result.phases - predicted))), 0.0, atol=1e-10)

    def test_too_many_spins(self, registry, rng):
        system = random_system(24, rng, pairs=[(1, 2)])
        program = emit(build_decouple(24, registry), 1e-3)
        with pytest.raises(TooManySpinsError):
            simulate(system, program)

    def test_target_outside_system(self, registry, rng):
        system = random_system(3, rng)
        program = emit(build_decouple(3, registry), 1e-3)
        with pytest.raises(TargetShapeMismatchError):
            verify_program(system, program, target=Target.zz((1, 5)))
        with pytest.raises(TargetShapeMismatchError):
            verify_program(system, program, target=Target.cnot(1, 2))


class TestChainOracle:
    """Pairwise oracle on long chains"""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_chain_schemes(self, registry, rng, k):
        for n in (k + 2, 12, 30):
            pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, min(i + k, n) + 1)]
            system = random_system(n, rng, pairs=pairs)
            decouple = verify_program(system, emit(build_knn_decouple(n, k, registry), 2e-4))
            assert decouple.verdicts["coupling_phase"]
            assert decouple.oracle == ("restricted" if n > 20 else "full")

            i, j = pairs[len(pairs) // 2]
            matrix = build_knn_recouple(n, k, i, j, registry)
            recouple = verify_program(system, recoupling_program(matrix, system))
            assert recouple.passed
            assert recouple.target == f"zz:{i},{j}"

    def test_restricted_mode_below_cap(self, registry, rng, monkeypatch):
        monkeypatch.setattr(get_settings().simulation, "max_spins", 4)
        system = random_system(8, rng)
        program = recoupling_program(build_recouple(8, 3, 7, registry), system)
        report = verify_program(system, program)
        assert report.oracle == "restricted"
        assert report.passed


class TestDenseCheck:
    """Full unitaries for gate sequences"""

    def test_cnot_wrapper(self):
        assert dense_gate_check(cnot_wrapper(1, 2)) < 1e-12
        assert dense_gate_check(cnot_wrapper(2, 1)) < 1e-12

    def test_cnot_wrapper_in_three_spins(self):
        assert dense_gate_check(cnot_wrapper(1, 3), spins=[1, 2, 3]) < 1e-12

    def test_coupling_is_needed(self):
        assert dense_gate_check(cnot_wrapper(1, 2).without_coupling(), Target.cnot(1, 2)) > 0.5

    def test_empty_sequence_is_identity(self):
        assert dense_gate_check(GateSequence((), "idle"), spins=[1]) == pytest.approx(0.0, abs=1e-15)

    def test_full_turn_is_identity_up_to_phase(self):
        sequence = GateSequence((Rotation(1, "x", 2 * math.pi),), "full turn")
        assert dense_gate_check(sequence) < 1e-12

    def test_too_many_spins(self):
        with pytest.raises(TooManySpinsError):
            dense_gate_check(cnot_wrapper(1, 2), spins=[1, 2, 3, 4])


class TestTrials:
    """Closed form against simulation"""

    def test_hundred_trials(self, registry):
        for matrix in (build_recouple(5, 1, 4, registry), build_decouple_zeeman(6, registry)):
            report = run_trials(matrix, trials=100, seed=7)
            assert report.passed
            assert report.max_deviation < 1e-12

    def test_weights_predict_random_sign_matrices(self, rng):
        for _ in range(120):
            n = int(rng.integers(2, 11))
            m = int(rng.integers(1, 9))
            matrix = SignMatrix(rng.choice([-1, 1], size=(n, m)), Purpose.decouple())
            system = random_system(n, rng)
            t = float(10 ** rng.uniform(-5, -2))
            simulated = simulate(system, emit(matrix, t)).phases
            predicted = closed_form_phases(matrix, system, t)
            assert np.allclose(np.angle(np.exp(1j * (simulated - predicted))), 0.0, atol=1e-10), (n, m)

    def test_seed_is_reproducible(self, registry):
        matrix = build_decouple(4, registry)
        first = run_trials(matrix, trials=10, seed=3)
        second = run_trials(matrix, trials=10, seed=3)
        assert first.max_deviation == second.max_deviation
