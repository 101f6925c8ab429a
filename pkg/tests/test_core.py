import numpy as np
import pytest

from qgforge.core import (
    ElementSubset,
    div_l,
    div_r,
    find_unit,
    is_left_quasigroup,
    is_right_quasigroup,
    magma_from_array,
    magma_from_table,
    one_sided_units,
)
from qgforge.errors import AxiomError, ConstructionError
from qgforge.groups import cyclic, standard_corpus, symmetric

SUB3 = [[(a - b) % 3 for b in range(3)] for a in range(3)]


def test_from_table_round_trip():
    m = magma_from_table(3, SUB3)
    assert m.rows() == SUB3
    assert m.table.flags.writeable is False


@pytest.mark.parametrize("table, fragment", [
    ([[0, 1], [1]], "row 1"),
    ([[0, 1], [1, 2]], "cell (1, 1)"),
    ([[0, 1], [1, -1]], "cell (1, 1)"),
    ([[0, 1]], "rows"),
    ([[0, 1.0], [1, 0]], "cell (0, 1)"),
])
def test_from_table_rejects(table, fragment):
    with pytest.raises(ConstructionError, match=fragment.replace("(", r"\(").replace(")", r"\)")):
        magma_from_table(2, table)


def test_order_must_be_positive():
    with pytest.raises(ConstructionError):
        magma_from_table(0, [])


def test_subtraction_divisions_brute_force():
    m = magma_from_table(3, SUB3)
    assert is_left_quasigroup(m) and is_right_quasigroup(m)
    for a in range(3):
        for b in range(3):
            assert [x for x in range(3) if m.mul(a, x) == b] == [div_l(m, a, b)]
            assert [y for y in range(3) if m.mul(y, a) == b] == [div_r(m, a, b)]
    assert find_unit(m) is None
    assert one_sided_units(m) == ([], [0])


def test_left_not_right_projection():
    # a*b = b: rows are permutations, columns constant
    m = magma_from_array(np.tile(np.arange(4), (4, 1)))
    assert is_left_quasigroup(m) and not is_right_quasigroup(m)
    assert m.rdiv is None
    with pytest.raises(AxiomError):
        div_r(m, 0, 0)
    assert div_l(m, 2, 3) == 3
    assert one_sided_units(m) == ([0, 1, 2, 3], [])


def test_groups_have_unit_zero_and_are_associative():
    for name, g in standard_corpus().items():
        assert g.is_loop and g.unit == 0, name
        assert g.is_associative(), name


def test_equality_and_hash_follow_table():
    a, b = cyclic(5), cyclic(5)
    assert a == b and hash(a) == hash(b)
    assert a != symmetric(3)


def test_element_subset_ops():
    s = ElementSubset.of(6, [4, 0, 2])
    assert list(s) == [0, 2, 4] and len(s) == 3 and 2 in s
    assert ElementSubset.from_mask(s.mask()) == s
    assert (s & ElementSubset.of(6, [2, 3])).sorted() == [2]
    assert ElementSubset.of(6, [0]) <= s
    assert not s.is_full() and ElementSubset.of(2, [0, 1]).is_full()
    with pytest.raises(ValueError):
        ElementSubset.of(3, [3])
