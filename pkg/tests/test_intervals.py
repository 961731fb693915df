from hypothesis import given, strategies as st

from armchair import intervals as iv

ivl = st.tuples(st.floats(-50, 50), st.floats(0, 10)).map(lambda t: (t[0], t[0] + t[1]))
sets = st.lists(ivl, max_size=6)


def test_normalize_merges_touching():
    assert iv.normalize([(2, 3), (0, 1), (1, 2)]) == [(0.0, 3.0)]


def test_normalize_drops_short():
    assert iv.normalize([(0, 1e-12), (2, 3)], tol=1e-10) == [(2.0, 3.0)]


def test_subtract_and_intersect():
    A = [(0, 10)]
    B = [(2, 3), (5, 6)]
    assert iv.subtract(A, B) == [(0.0, 2.0), (3.0, 5.0), (6.0, 10.0)]
    assert iv.intersect(A, B) == [(2.0, 3.0), (5.0, 6.0)]
    assert iv.measure(iv.subtract(A, B)) == 8.0


@given(sets, sets, st.floats(-60, 60))
def test_membership_laws(A, B, x):
    inA, inB = iv.contains(iv.normalize(A), x), iv.contains(iv.normalize(B), x)
    assert iv.contains(iv.union(A, B), x) == (inA or inB)
    if iv.contains(iv.intersect(A, B), x):
        assert inA and inB


@given(sets, sets)
def test_measure_inclusion_exclusion(A, B):
    lhs = iv.measure(iv.union(A, B))
    rhs = iv.measure(iv.normalize(A)) + iv.measure(iv.normalize(B)) - iv.measure(iv.intersect(A, B))
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))
