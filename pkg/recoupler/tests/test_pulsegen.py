"""
Tests for pulse emission, interval timing and compilation.
"""

import math

import numpy as np
import pytest

from recoupler.core.config import get_settings
from recoupler.core.exceptions import (
    BadPairError,
    CouplingMismatchError,
    InvalidParameterError,
    NonPositiveDurationError,
    TopologyMismatchError,
    UncoupledPairError,
    ZeroCouplingError,
)
from recoupler.models import CouplingGate, Purpose, SignMatrix, SpinSystem
from recoupler.schemas.compile import CompileRequest
from recoupler.services.pulsegen import (
    check_heteronuclear,
    cnot_wrapper,
    compile,
    emit,
    emit_unsimplified,
    interval_duration,
    simplify,
)
from recoupler.services.signmatrix import (
    build_decouple,
    build_decouple_zeeman,
    build_knn_decouple,
    build_knn_recouple,
    build_parallel_recouple,
    build_recouple,
)
from recoupler.tests.helpers import EQ15_ROWS, random_system, signs_from_rows

TWO_PI = 2 * math.pi


def literal_decoupler():
    return SignMatrix(signs_from_rows(EQ15_ROWS), Purpose.decouple())


def with_couplings(system, overrides):
    couplings = dict(system.couplings)
    couplings.update(overrides)
    return SpinSystem(system.n, system.zeeman, couplings)


class TestEmit:
    """Sign matrix to pulse boundaries"""

    def test_literal_four_spin_program(self):
        program = emit(literal_decoupler(), 1e-3)
        assert program.boundaries == (
            frozenset(),
            frozenset({3, 4}),
            frozenset({2, 4}),
            frozenset({3, 4}),
            frozenset({2, 4}),
        )
        assert program.pulse_count == 8
        assert program.m == 4
        assert program.total_duration == pytest.approx(4e-3)

    def test_refocusing_pair(self):
        matrix = SignMatrix(np.array([[1, 1], [1, -1]]), Purpose.decouple())
        program = emit(matrix, 0.5)
        assert program.boundaries == (frozenset(), frozenset({2}), frozenset({2}))

    def test_all_plus_emits_nothing(self):
        matrix = SignMatrix(np.ones((3, 4), dtype=int), Purpose.decouple())
        program = emit(matrix, 1.0)
        assert program.pulse_count == 0

    def test_leading_minus_pulses_before_first_interval(self):
        matrix = SignMatrix(np.array([[-1, 1], [1, 1]]), Purpose.decouple())
        program = emit(matrix, 1.0)
        assert program.boundaries == (frozenset({1}), frozenset({1}), frozenset())

    def test_frames_recover_sign_matrix(self, registry):
        matrix = build_recouple(7, 2, 6, registry)
        program = emit(matrix, 1e-3)
        assert np.array_equal(program.recover_sign_matrix().entries, matrix.entries)
        assert program.sign_matrix is matrix

    def test_unsimplified_schedule_cancels_to_emit(self, registry):
        for matrix in (literal_decoupler(), build_decouple_zeeman(6, registry), build_recouple(9, 1, 9, registry)):
            schedule = emit_unsimplified(matrix)
            assert len(schedule) == matrix.m + 1
            assert sum(len(b) for b in schedule) == 2 * int(np.count_nonzero(matrix.entries < 0))
            simplified = simplify(schedule, 1e-3, matrix.purpose, n=matrix.n)
            assert simplified.boundaries == emit(matrix, 1e-3).boundaries

    def test_unsimplified_schedule_cancels_on_random_matrices(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(1, 13))
            matrix = SignMatrix(rng.choice([-1, 1], size=(n, m)), Purpose.decouple())
            schedule = emit_unsimplified(matrix)
            assert sum(len(b) for b in schedule) == 2 * int(np.count_nonzero(matrix.entries < 0))
            simplified = simplify(schedule, 1e-3, matrix.purpose, n=n)
            assert simplified.boundaries == emit(matrix, 1e-3).boundaries
            assert np.array_equal(simplified.recover_sign_matrix().entries, matrix.entries)

    @pytest.mark.parametrize("n", range(2, 65))
    def test_pulse_count_within_bound(self, registry, n):
        matrices = [
            build_decouple(n, registry),
            build_decouple_zeeman(n, registry),
            build_recouple(n, 1, n, registry),
        ]
        if n >= 4:
            matrices.append(build_parallel_recouple(n, [(1, 2), (3, 4)], registry))
        for k in range(1, min(3, n - 1) + 1):
            matrices.append(build_knn_decouple(n, k, registry))
            matrices.append(build_knn_recouple(n, k, 1, 2, registry))
        for matrix in matrices:
            program = emit(matrix, 1e-3)
            assert program.within_pulse_bound, matrix.purpose.to_token()
            assert all(count % 2 == 0 for count in program.pulses_per_spin().values())

    def test_nonpositive_duration(self):
        with pytest.raises(NonPositiveDurationError):
            emit(literal_decoupler(), 0.0)
        with pytest.raises(NonPositiveDurationError):
            emit(literal_decoupler(), -1e-3)


class TestTiming:
    """Interval durations and the CNOT wrapper"""

    def test_hundred_hertz_coupling(self):
        assert interval_duration(TWO_PI * 100, 4) == pytest.approx(312.5e-6)

    def test_unit_product(self):
        assert interval_duration(math.pi, 1) == pytest.approx(0.25)

    def test_negative_coupling_wraps(self):
        assert interval_duration(-math.pi, 1) == pytest.approx(1.75)
        t = interval_duration(-TWO_PI * 30, 8)
        assert math.cos(-30 * TWO_PI * 8 * t) == pytest.approx(math.cos(-math.pi / 4))

    def test_zero_coupling(self):
        with pytest.raises(ZeroCouplingError):
            interval_duration(0.0, 4)
        with pytest.raises(InvalidParameterError):
            interval_duration(TWO_PI * 50, 0)

    def test_cnot_wrapper_shape(self):
        sequence = cnot_wrapper(1, 2)
        assert len(sequence) == 7
        assert sequence.gates[1] == CouplingGate(1, 2)
        assert sequence.label == "cnot(1,2)"
        assert sequence.spins == frozenset({1, 2})
        assert len(sequence.without_coupling()) == 6

    def test_cnot_wrapper_same_spin(self):
        with pytest.raises(BadPairError):
            cnot_wrapper(2, 2)


class TestCompile:
    """End-to-end compilation"""

    def test_recouple_four_spins(self, registry, rng):
        system = random_system(4, rng)
        program = compile(system, CompileRequest(op="recouple", i=2, j=3), registry)
        assert program.m == 4
        assert program.target == Purpose.recouple((2, 3))
        g = system.coupling(2, 3)
        assert program.interval_duration == pytest.approx(interval_duration(g, 4))

    def test_decouple_default_duration(self, registry, rng):
        program = compile(random_system(5, rng), CompileRequest(op="decouple"), registry)
        assert program.m == 8
        assert program.interval_duration == pytest.approx(1e-3)

    def test_decouple_explicit_duration(self, registry, rng):
        request = CompileRequest(op="decouple", t=2e-4, zeeman_free=True)
        program = compile(random_system(3, rng), request, registry)
        assert program.interval_duration == pytest.approx(2e-4)
        assert program.target == Purpose.decouple_zeeman_free()
        assert program.m == 4

    def test_parallel_pairs(self, registry, rng):
        system = with_couplings(random_system(6, rng), {(1, 2): TWO_PI * 40, (4, 5): TWO_PI * 40})
        request = CompileRequest(op="recouple", i=1, j=2, extra_pairs=[(4, 5)])
        program = compile(system, request, registry)
        assert program.target.recoupled == {(1, 2), (4, 5)}
        assert program.interval_duration == pytest.approx(interval_duration(TWO_PI * 40, program.m))

    def test_parallel_pairs_with_different_couplings(self, registry, rng):
        system = with_couplings(random_system(4, rng), {(1, 2): TWO_PI * 40, (3, 4): TWO_PI * 70})
        request = CompileRequest(op="recouple", i=1, j=2, extra_pairs=[(3, 4)])
        with pytest.raises(CouplingMismatchError) as info:
            compile(system, request, registry)
        assert info.value.details["pairs"] == [[1, 2], [3, 4]]

    def test_parallel_coupling_tolerance(self, registry, rng, monkeypatch):
        system = with_couplings(random_system(4, rng), {(1, 2): 100.0, (3, 4): 100.0 * (1 + 1e-6)})
        request = CompileRequest(op="recouple", i=1, j=2, extra_pairs=[(3, 4)])
        with pytest.raises(CouplingMismatchError):
            compile(system, request, registry)
        monkeypatch.setattr(get_settings().compile, "parallel_coupling_rtol", 1e-5)
        assert compile(system, request, registry).target.recoupled == {(1, 2), (3, 4)}

    def test_chain_recouple(self, registry, rng):
        pairs = [(i, i + 1) for i in range(1, 8)]
        system = random_system(8, rng, pairs=pairs)
        program = compile(system, CompileRequest(op="recouple", i=4, j=5, knn=1), registry)
        assert program.m == 4

    def test_chain_scheme_rejects_long_range_coupling(self, registry, rng):
        system = random_system(6, rng, pairs=[(1, 2), (2, 3), (1, 5)])
        with pytest.raises(TopologyMismatchError):
            compile(system, CompileRequest(op="decouple", knn=1), registry)

    def test_uncoupled_pair(self, registry, rng):
        system = random_system(4, rng, pairs=[(1, 2), (3, 4)])
        with pytest.raises(UncoupledPairError):
            compile(system, CompileRequest(op="recouple", i=1, j=3), registry)

    def test_same_spin(self, registry, rng):
        with pytest.raises(BadPairError):
            compile(random_system(4, rng), CompileRequest(op="recouple", i=1, j=1), registry)

    def test_request_validation(self):
        with pytest.raises(ValueError):
            CompileRequest(op="recouple", i=1)
        with pytest.raises(ValueError):
            CompileRequest(op="recouple", i=1, j=2, t=1e-3)
        with pytest.raises(ValueError):
            CompileRequest(op="decouple", i=1, j=2)
        with pytest.raises(ValueError):
            CompileRequest(op="decouple", t=0.0)
        with pytest.raises(ValueError):
            CompileRequest(op="decouple", knn=1, zeeman_free=True)


class TestHeteronuclear:
    """Frequency separation check"""

    def test_well_separated(self):
        system = SpinSystem(2, (0.0, TWO_PI * 10_000), {(1, 2): TWO_PI * 50})
        assert check_heteronuclear(system) == pytest.approx(200.0)

    def test_poorly_separated(self):
        system = SpinSystem(2, (0.0, TWO_PI * 1000), {(1, 2): TWO_PI * 50})
        assert check_heteronuclear(system) == pytest.approx(20.0)
        assert check_heteronuclear(system, ratio=10.0) == pytest.approx(20.0)

    def test_no_couplings(self):
        assert math.isinf(check_heteronuclear(SpinSystem(3, (1.0, 2.0, 3.0))))
