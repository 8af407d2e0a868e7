import random
from fractions import Fraction

import pytest

from polysplit.liepoly import (
    PolyVectorField,
    bracket,
    closed_form_AnB,
    field_A,
    field_B,
    format_table,
    monomial,
    nested,
    poly_degree,
    random_force,
    verify_vanishing,
    zero_field,
)


def y_sq():
    # g(y) = y^2 over variables (y, v) with d = 1
    return [{(2, 0): Fraction(1)}]


def field(dim, *comps):
    return PolyVectorField(dim, tuple(comps))


def random_field(dim, rng, degree=2):
    comps = []
    for _ in range(2 * dim):
        p = {}
        for _ in range(3):
            k = tuple(rng.randint(0, degree) for _ in range(2 * dim))
            c = rng.randint(-3, 3)
            if c and sum(k) <= degree:
                p[k] = Fraction(c)
        comps.append(p)
    return PolyVectorField(dim, tuple(comps))


def test_field_construction():
    assert field_B(y_sq()) == field(1, {}, {(2, 0): 1})
    assert field_A(1).apply({(1, 0): Fraction(1)}) == {(0, 1): 1}
    with pytest.raises(ValueError, match="y only"):
        field_B([{(0, 1): Fraction(1)}])


def test_invalid_fields():
    with pytest.raises(ValueError):
        PolyVectorField(1, ({},))
    with pytest.raises(ValueError):
        PolyVectorField(1, ({(1,): 1}, {}))


def test_bracket_A_B_example():
    assert bracket(field_A(1), field_B(y_sq())) == field(1, {(2, 0): -1}, {(1, 1): 2})


def test_bracket_A_B_general_formula():
    rng = random.Random(11)
    for dim in (1, 2, 3):
        g = random_force(dim, 2, rng)
        got = bracket(field_A(dim), field_B(g))
        assert all(got.y(i) == {k: -c for k, c in g[i].items()} for i in range(dim))
        assert got == closed_form_AnB(1, g)


def test_self_bracket_vanishes():
    rng = random.Random(1)
    for _ in range(10):
        f = random_field(2, rng)
        assert bracket(f, f).is_zero()


def test_B_AB_example():
    assert nested("BAB", y_sq()) == field(1, {}, {(3, 0): 4})


def test_AAB_example():
    assert nested("AAB", y_sq()) == field(1, {(1, 1): -4}, {(0, 2): 2})


def test_two_letter_pattern_is_bracket():
    g = y_sq()
    assert nested("AB", g) == bracket(field_A(1), field_B(g))
    with pytest.raises(ValueError):
        nested("A", g)


def test_AAAB_nonzero_for_y_squared():
    assert not nested("AAAB", y_sq()).is_zero()
    assert nested("AAAAB", y_sq()).is_zero()


def test_jacobi_identity():
    rng = random.Random(2023)
    for trial in range(25):
        dim = 1 + trial % 2
        f, g, h = (random_field(dim, rng) for _ in range(3))
        total = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
        assert total.is_zero()


def test_bilinear_antisymmetric():
    rng = random.Random(4)
    for _ in range(20):
        f, g, h = (random_field(2, rng) for _ in range(3))
        assert bracket(f, g) + bracket(g, f) == zero_field(2)
        assert bracket(f + g.scale(3), h) == bracket(f, h) + bracket(g, h).scale(3)


def test_B_A_B_structure():
    rng = random.Random(9)
    for dim in (1, 2, 3):
        for n in (1, 2, 3):
            g = random_force(dim, n, rng)
            f = nested("BAB", g)
            assert all(not f.y(i) for i in range(dim))
            assert all(all(not any(k[dim:]) for k in f.v(i)) for i in range(dim))


def test_random_force_degree_and_coefficients():
    rng = random.Random(0)
    for n in (1, 2, 3):
        g = random_force(2, n, rng)
        assert max(poly_degree(p) for p in g) == n
        assert all(-3 <= c <= 3 for p in g for c in p.values())


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("dim", [1, 2])
def test_verify_vanishing(n, dim):
    rows = verify_vanishing(n, dim, trials=10, seed=n * 10 + dim)
    assert len(rows) == 10
    assert all(r.passed for r in rows)
    assert any(r.below_threshold_nonzero for r in rows)


def test_verify_vanishing_bounds():
    with pytest.raises(ValueError):
        verify_vanishing(4, 1, 1)
    with pytest.raises(ValueError):
        verify_vanishing(2, 4, 1)


def test_table_format():
    text = format_table(verify_vanishing(2, 1, 2))
    lines = text.splitlines()
    assert len(lines) == 3 and lines[1].endswith("PASS")


def test_monomial():
    assert monomial(4, 2, 3) == {(0, 0, 1, 0): Fraction(3)}
