import pytest
from hypothesis import given
from hypothesis import strategies as st

from jiomber.complexity import (
    CUBIC,
    Algorithm,
    complexity_table,
    count_ops,
    format_csv,
    format_table,
    instrumented_jio_mber_counts,
)


def test_worked_numbers():
    assert tuple(count_ops("jio_mber", 32, 6)) == (1225, 933)
    assert tuple(count_ops("mwf_mber", 32, 6)) == (7836, 5517)
    assert tuple(count_ops(Algorithm.JIO_MBER, 32, 6)) == (1225, 933)


@given(st.integers(1, 64).flatmap(lambda m: st.tuples(st.just(m), st.integers(1, m))))
def test_rows_by_formula(md):
    m, d = md
    assert tuple(count_ops("full_rank_lms", m, d)) == (2 * m + 1, 2 * m)
    assert tuple(count_ops("full_rank_mber", m, d)) == (4 * m + 1, 4 * m - 1)
    assert tuple(count_ops("mwf_lms", m, d)) == (d * m**2 - m**2 + 2 * d * m + 4 * d + 1, d * m**2 - m**2 + 3 * d - 2)
    assert tuple(count_ops("jio_lms", m, d)) == (3 * d * m + m + 3 * d + 6, 2 * d * m + m + 4 * d - 2)
    assert tuple(count_ops("jio_mber", m, d)) == (6 * m * d + 5 * d + m + 11, 5 * m * d + d - m - 1)


def test_eig_is_symbolic():
    assert tuple(count_ops("eig", 32, 6)) == (CUBIC, CUBIC)


@pytest.mark.parametrize("m,d", [(4, 0), (4, 5), (0, 0), (4.5, 2)])
def test_invalid_dimensions(m, d):
    with pytest.raises(ValueError):
        count_ops("jio_mber", m, d)


def test_unknown_algorithm_lists_names():
    with pytest.raises(ValueError, match="jio_mber"):
        count_ops("rls", 8, 2)


def test_table_outputs():
    rows = dict(complexity_table(32, 6))
    assert tuple(rows["JIO-MBER"]) == (1225, 933)
    assert "1225" in format_table(32, 6)
    assert "JIO-MBER,32,6,1225,933" in format_csv(32, 6).splitlines()


def test_instrumented_count_same_order():
    ref = count_ops("jio_mber", 32, 6)
    got = instrumented_jio_mber_counts(32, 6)
    for a, b in zip(got, ref):
        assert 0.5 <= a / b <= 2.0
