import numpy as np
import pytest

from exactur.exceptions import EmptySeries, ParseError, SeriesTooShort
from exactur.series import Series, batch_suffstats, center, load_series, suffstats


@pytest.fixture
def write(tmp_path):
    def _write(text, name="s.csv"):
        p = tmp_path / name
        p.write_text(text)
        return p

    return _write


def test_load_plain(write):
    s = load_series(write("1\n2\n3\n"))
    assert s.n == 3
    np.testing.assert_array_equal(s.values, [1, 2, 3])


def test_load_header_skipped(write):
    np.testing.assert_array_equal(load_series(write("x\n1\n2\n")).values, [1, 2])


def test_load_parse_error_reports_line(write):
    with pytest.raises(ParseError) as info:
        load_series(write("1\nfoo\n"))
    assert info.value.line == 2


def test_load_comments_blank_and_named_column(write):
    p = write("# source: test\nt,y\n\n1,10.5\n2,-3\n")
    np.testing.assert_array_equal(load_series(p, "y").values, [10.5, -3])
    np.testing.assert_array_equal(load_series(p, 0).values, [1, 2])


def test_load_missing_and_empty(write, tmp_path):
    with pytest.raises(FileNotFoundError):
        load_series(tmp_path / "nope.csv")
    with pytest.raises(EmptySeries):
        load_series(write("y\n# nothing\n"))


def test_series_is_immutable():
    s = Series([1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5
    with pytest.raises(EmptySeries):
        Series([])


@pytest.mark.parametrize(
    "raw, values, mean",
    [([1, 3, 2], [-1, 1, 0], 2), ([5, 5, 5], [0, 0, 0], 5), ([1, 2, 3], [-1, 0, 1], 2)],
)
def test_center(raw, values, mean):
    cs = center(Series(raw))
    np.testing.assert_array_equal(cs.values, values)
    assert cs.mean == mean


def test_suffstats_hand_sums():
    st = suffstats(Series([1, 2, 3]))
    assert (st.a, st.b, st.c, st.n) == (14, 8, 4, 3)
    st = suffstats(center(Series([1, 3, 2])))
    assert (st.a, st.b, st.c) == (2, -1, 1)
    st = suffstats(Series([0, 0, 0]))
    assert (st.a, st.b, st.c) == (0, 0, 0)


def test_suffstats_too_short():
    with pytest.raises(SeriesTooShort):
        suffstats(Series([1, 2]))


def test_batch_matches_scalar():
    z = np.random.default_rng(0).standard_normal((5, 40)).cumsum(axis=1)
    a, b, c = batch_suffstats(z)
    for i in range(5):
        st = suffstats(Series(z[i]))
        np.testing.assert_allclose([a[i], b[i], c[i]], [st.a, st.b, st.c], rtol=1e-13)
