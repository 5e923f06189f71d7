"""
Tests for Hadamard construction, transforms and the order registry.
"""

import warnings
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from recoupler.core.exceptions import (
    IndexOutOfRangeError,
    InvalidParameterError,
    NonSignEntriesError,
    NonSquareError,
    NotHadamardError,
    NotPrimeError,
    OrderNotConstructibleError,
    RegistryExhaustedError,
    WrongResidueClassError,
)
from recoupler.models import NegateCol, NegateRow, PermuteCols, PermuteRows
from recoupler.services.hadamard import (
    OrderRegistry,
    construct,
    generate,
    is_hadamard,
    load_hadamard,
    normalization_ops,
    normalize,
    paley1,
    paley2,
    sylvester,
    transform,
)
from recoupler.utils.documents import format_matrix, write_matrix_file


def gram(matrix):
    signs = matrix.entries.astype(np.int64)
    return signs @ signs.T


class TestIsHadamard:
    """Orthogonality check on packed bits"""

    def test_literal_matrices(self, eq15, eq16):
        assert is_hadamard(eq15)
        assert is_hadamard(eq16)
        assert is_hadamard(eq16.entries)

    def test_all_ones_is_not_hadamard(self):
        assert not is_hadamard(np.ones((2, 2), dtype=int))

    def test_order_one(self):
        assert is_hadamard([[1]])
        assert is_hadamard([[-1]])

    def test_odd_order_rejected(self):
        assert not is_hadamard(np.ones((3, 3), dtype=int))

    def test_non_square(self):
        with pytest.raises(NonSquareError):
            is_hadamard(np.ones((2, 3), dtype=int))

    def test_non_sign_entries(self):
        with pytest.raises(NonSignEntriesError):
            is_hadamard([[1, 0], [1, -1]])

    def test_matches_integer_gram(self, rng):
        for _ in range(50):
            signs = rng.choice([-1, 1], size=(8, 8))
            expected = np.array_equal(signs @ signs.T, 8 * np.eye(8, dtype=int))
            assert is_hadamard(signs) == expected


class TestConstructions:
    """Sylvester and Paley constructions"""

    def test_sylvester_identity_element(self, registry):
        h12 = registry.matrix(12)
        assert sylvester(registry.matrix(1), h12) == h12

    def test_sylvester_order_four_is_equivalent_to_literal(self, registry, eq15):
        h4 = sylvester(registry.matrix(2), registry.matrix(2))
        assert h4.order == 4
        assert is_hadamard(h4)
        # normalized and sorted rows match the literal four-spin matrix
        rows = sorted(map(tuple, normalize(h4).entries.tolist()))
        assert rows == sorted(map(tuple, eq15.entries.tolist()))

    def test_sylvester_order_eight(self, registry):
        h2 = registry.matrix(2)
        h8 = sylvester(sylvester(h2, h2), h2)
        assert np.array_equal(gram(h8), 8 * np.eye(8, dtype=np.int64))
        assert h8.provenance.kind == "sylvester"

    @pytest.mark.parametrize("q", [3, 7, 11, 19, 23, 31, 43, 47])
    def test_paley1(self, q):
        matrix = paley1(q)
        assert matrix.order == q + 1
        assert np.array_equal(gram(matrix), (q + 1) * np.eye(q + 1, dtype=np.int64))

    @pytest.mark.parametrize("q", [5, 13, 17, 29, 37, 41])
    def test_paley2(self, q):
        matrix = paley2(q)
        assert matrix.order == 2 * (q + 1)
        assert is_hadamard(matrix)

    def test_paley_errors(self):
        with pytest.raises(WrongResidueClassError):
            paley1(5)
        with pytest.raises(WrongResidueClassError):
            paley2(7)
        with pytest.raises(NotPrimeError):
            paley1(15)
        with pytest.raises(NotPrimeError):
            paley2(25)
        with pytest.raises(WrongResidueClassError):
            paley1(2)

    def test_paley_without_deprecation_warnings(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert is_hadamard(paley1(11))
            assert is_hadamard(paley2(13))

    def test_generate_recipes(self, registry):
        assert generate(12, "paley1", registry).provenance.kind == "paley1"
        assert generate(12, "paley2", registry).provenance.kind == "paley2"
        with pytest.raises(OrderNotConstructibleError):
            generate(12, "sylvester", registry)
        with pytest.raises(OrderNotConstructibleError):
            generate(92, "auto", registry)
        with pytest.raises(OrderNotConstructibleError):
            generate(16, "williamson", registry)

    @pytest.mark.parametrize("order", [1, 2, 4, 8, 16, 64])
    def test_generate_sylvester_is_pure(self, registry, order):
        matrix = generate(order, "sylvester", registry)
        assert matrix.order == order
        assert is_hadamard(matrix)

        def leaves(provenance):
            if not provenance.children:
                return [provenance]
            return [leaf for child in provenance.children for leaf in leaves(child)]

        assert {leaf.kind for leaf in leaves(matrix.provenance)} == {"base"}

    def test_generate_sylvester_rejects_mixed_orders(self, registry):
        # in the registry, but only through a Paley factor
        assert 24 in registry
        with pytest.raises(OrderNotConstructibleError):
            generate(24, "sylvester", registry)


class TestTransforms:
    """Equivalence operations and normalization"""

    def test_empty_op_list_is_identity(self, eq16):
        assert transform(eq16, []) is eq16

    def test_literal_normalization(self, eq16):
        normalized = transform(eq16, [NegateRow(6), NegateCol(6)])
        assert np.all(normalized.entries[0] == 1)
        assert np.all(normalized.entries[:, 0] == 1)
        assert normalize(eq16) == normalized
        assert normalization_ops(eq16) == [NegateRow(6), NegateCol(6)]

    def test_normalized_rows_sum_to_zero(self, eq16):
        sums = normalize(eq16).entries.astype(int).sum(axis=1)
        assert sums[0] == 12
        assert np.all(sums[1:] == 0)

    def test_normalize_fixed_point(self, eq15):
        assert normalize(eq15) is eq15

    def test_normalize_after_negating_rows(self, eq15):
        flipped = transform(eq15, [NegateRow(r) for r in range(4)])
        normalized = normalize(flipped)
        assert np.all(normalized.entries[0] == 1)
        assert np.all(normalized.entries[:, 0] == 1)
        assert normalize(normalized) == normalized

    def test_normalize_uses_negations_only(self, registry):
        matrix = registry.matrix(20)
        ops = normalization_ops(matrix)
        assert all(isinstance(op, (NegateRow, NegateCol)) for op in ops)
        assert is_hadamard(normalize(matrix))

    def test_random_op_sequences_preserve_orthogonality(self, registry, rng):
        h8 = registry.matrix(8)
        for _ in range(1000):
            ops = []
            for _ in range(rng.integers(1, 6)):
                kind = rng.integers(4)
                if kind == 0:
                    ops.append(PermuteRows(tuple(rng.permutation(8).tolist())))
                elif kind == 1:
                    ops.append(PermuteCols(tuple(rng.permutation(8).tolist())))
                elif kind == 2:
                    ops.append(NegateRow(int(rng.integers(8))))
                else:
                    ops.append(NegateCol(int(rng.integers(8))))
            assert is_hadamard(transform(h8, ops))

    def test_index_errors(self, eq15):
        with pytest.raises(IndexOutOfRangeError):
            transform(eq15, [NegateRow(4)])
        with pytest.raises(IndexOutOfRangeError):
            transform(eq15, [NegateCol(-1)])
        with pytest.raises(IndexOutOfRangeError):
            transform(eq15, [PermuteRows((0, 1, 1, 2))])


class TestOrderRegistry:
    """Constructible orders and n_bar lookups"""

    def test_small_orders(self, registry):
        assert registry.orders[:8] == (1, 2, 4, 8, 12, 16, 20, 24)
        assert 1 in registry and 2 in registry
        for missing in (52, 92, 100):
            assert missing not in registry

    @pytest.mark.parametrize("n, expected", [(1, 1), (2, 2), (3, 4), (4, 4), (5, 8), (9, 12), (13, 16)])
    def test_n_bar(self, registry, n, expected):
        assert registry.n_bar(n) == expected

    @pytest.mark.parametrize("n", [0, -3])
    def test_n_bar_below_one(self, registry, n):
        with pytest.raises(InvalidParameterError) as info:
            registry.n_bar(n)
        assert info.value.details["name"] == "n"

    def test_gap_and_c(self, registry):
        assert registry.n_under(5) == 4
        assert registry.gap(5) == 4
        assert registry.c(5) == Fraction(8, 5)
        assert registry.n_under(1) == 0

    def test_closed_under_products(self, registry):
        members = [o for o in registry.orders if o <= 200]
        for a in members:
            for b in members:
                if a * b <= registry.bound:
                    assert a * b in registry

    def test_n_bar_below_twice_n(self, registry):
        orders = np.asarray(registry.orders)
        n = np.arange(1, 10001)
        n_bar = orders[np.searchsorted(orders, n)]
        assert np.all(n <= n_bar)
        assert np.all(n_bar < 2 * n)

    def test_exhausted(self):
        small = OrderRegistry.build(16)
        assert small.n_bar(16) == 16
        with pytest.raises(RegistryExhaustedError):
            small.n_bar(17)

    def test_every_recipe_up_to_1000_is_hadamard(self, registry):
        for order in registry.orders:
            if order > 1000:
                break
            assert is_hadamard(construct(registry.recipe(order))), order

    def test_no_row_extends_small_matrices(self, registry):
        for order in (4, 8, 12, 16):
            signs = registry.matrix(order).entries.astype(np.int64)
            candidates = np.array(list(product((1, -1), repeat=order)), dtype=np.int64)
            assert not np.any(np.all(candidates @ signs.T == 0, axis=1))

    @pytest.mark.parametrize("order", [20, 24, 28, 32, 64])
    def test_random_rows_never_extend_larger_matrices(self, registry, rng, order):
        signs = registry.matrix(order).entries.astype(np.int64)
        candidates = rng.choice(np.array([-1, 1], dtype=np.int64), size=(2000, order))
        products = candidates @ signs.T
        assert not np.any(np.all(products == 0, axis=1))
        # ||H v||^2 = n * ||v||^2 = n^2, so H v never vanishes
        assert np.all(np.sum(products**2, axis=1) == order * order)

    def test_extra_matrix_file(self, tmp_path, eq16):
        path = tmp_path / "h12.txt"
        write_matrix_file(path, eq16.entries)
        matrix = load_hadamard(str(path))
        assert matrix == eq16
        assert matrix.provenance.kind == "registry-file"
        extended = OrderRegistry.build(64, [str(path)])
        assert extended.extra == (12,)
        assert 12 in extended

    def test_bad_extra_matrix_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text(format_matrix(np.ones((4, 4), dtype=np.int8)))
        with pytest.raises(NotHadamardError):
            load_hadamard(str(path))
