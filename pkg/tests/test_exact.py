import itertools
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from upto.exact import feasible_nonneg, residual_zero, solve_linear

entries = st.integers(-2, 2).map(Fraction)


def det(m):
    if not m:
        return Fraction(1)
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def basic_solutions(a, b):
    # oracle: every basic solution by Cramer's rule on nonsingular square minors
    m, n = len(a), len(a[0])
    for k in range(0, min(m, n) + 1):
        for cols in itertools.combinations(range(n), k):
            for rows in itertools.combinations(range(m), k):
                sub = [[a[i][j] for j in cols] for i in rows]
                d = det(sub)
                if k and d == 0:
                    continue
                x = [Fraction(0)] * n
                for t, j in enumerate(cols):
                    repl = [row[:t] + [b[i]] + row[t + 1:] for row, i in zip(sub, rows)]
                    x[j] = det(repl) / d
                if residual_zero(a, x, b):
                    yield x


systems = st.integers(1, 3).flatmap(lambda m: st.integers(1, 3).flatmap(
    lambda n: st.tuples(st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m),
                        st.lists(entries, min_size=m, max_size=m))))


@settings(max_examples=80, deadline=None)
@given(systems)
def test_solve_linear_exact(system):
    a, b = system
    x = solve_linear(a, b)
    consistent = any(True for _ in basic_solutions(a, b))
    assert (x is not None) == consistent
    if x is not None:
        assert residual_zero(a, x, b)


@settings(max_examples=80, deadline=None)
@given(systems)
def test_feasible_nonneg_matches_basic_solutions(system):
    a, b = system
    x = feasible_nonneg(a, b)
    oracle = any(all(v >= 0 for v in s) for s in basic_solutions(a, b))
    assert (x is not None) == oracle
    if x is not None:
        assert all(v >= 0 for v in x) and residual_zero(a, x, b)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(entries, min_size=3, max_size=3), min_size=2, max_size=2),
       st.lists(st.integers(0, 3).map(Fraction), min_size=3, max_size=3))
def test_planted_nonneg_solution_found(a, x0):
    b = [sum(r * v for r, v in zip(row, x0)) for row in a]
    x = feasible_nonneg(a, b)
    assert x is not None and residual_zero(a, x, b)


def test_infeasible_sign():
    assert feasible_nonneg([[Fraction(1)]], [Fraction(-1)]) is None
    assert solve_linear([[Fraction(1)]], [Fraction(-1)]) == [Fraction(-1)]
