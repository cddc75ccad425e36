"""Schouten concomitant and the matched-pair split: exact identity tests."""

import pytest

from momentpair.corpus import Lcg64, random_graded, random_npart, random_spair, random_symtensor
from momentpair.exactpoly import Poly
from momentpair.schouten import (
    GradedTensor,
    NPart,
    OrderCapError,
    SPair,
    SymTensor,
    act_left,
    act_right,
    bracket_n,
    bracket_s,
    compat_residuals,
    double_cross_bracket,
    embed,
    lie_derivative,
    schouten_bracket,
    schouten_graded,
    split,
)

q1 = Poly.variable(1, 1)
one = Poly.constant(1, 1)


def vec(poly):
    return SymTensor(1, 1, {(1,): poly})


def fn(poly):
    return SymTensor.from_function(poly)


def test_directional_derivative():
    # [Z, sigma] with Z = q1 d1, sigma = q1^2 is the derivative Z(sigma) = 2 q1^2
    Z = vec(q1)
    sigma = fn(q1 * q1)
    assert schouten_bracket(Z, sigma) == fn(2 * q1 * q1)


def test_self_bracket_vanishes():
    rng = Lcg64(11)
    for _ in range(10):
        X = random_symtensor(rng, rng.next_int(1, 2), rng.next_int(0, 3))
        assert schouten_bracket(X, X).is_zero()


def test_order2_with_vector():
    # [X2, Y] with X2 = q1 d x d, Y = d equals -(d x d), and also -L_Y X2
    X2 = SymTensor(1, 2, {(1, 1): q1})
    Y = vec(one)
    expected = SymTensor(1, 2, {(1, 1): Poly.constant(1, -1)})
    assert schouten_bracket(X2, Y) == expected
    assert schouten_bracket(X2, Y) == -lie_derivative(Y, X2)


def test_trivial_on_functions():
    assert schouten_bracket(fn(q1), fn(q1 * q1)).is_zero()


def test_graded_bilinearity_zero():
    rng = Lcg64(12)
    X = random_graded(rng, 2)
    assert schouten_graded(X, GradedTensor.zero(2)).is_zero()


def test_graded_embedded_spair_matches_bracket_s():
    rng = Lcg64(13)
    for _ in range(10):
        a = random_spair(rng, rng.next_int(1, 2))
        b = random_spair(rng, a.dim)
        total = schouten_graded(a.to_graded(), b.to_graded())
        s_part, n_part = split(total)
        assert n_part.is_zero()
        assert s_part == bracket_s(a, b)


def test_jacobi_identity_random():
    rng = Lcg64(14)
    for _ in range(15):
        dim = rng.next_int(1, 2)
        A, B, C = (random_graded(rng, dim, 3) for _ in range(3))
        cyc = (
            schouten_graded(A, schouten_graded(B, C, 10), 10)
            + schouten_graded(B, schouten_graded(C, A, 10), 10)
            + schouten_graded(C, schouten_graded(A, B, 10), 10)
        )
        assert cyc.is_zero()


def test_order_cap_overflow():
    X = GradedTensor.from_tensor(SymTensor(1, 5, {(1,) * 5: q1}))
    with pytest.raises(OrderCapError):
        schouten_graded(X, X, order_cap=8)


def test_grading_and_antisymmetry_random():
    rng = Lcg64(15)
    for _ in range(25):
        dim = rng.next_int(1, 2)
        kx, ky = rng.next_int(0, 4), rng.next_int(0, 4)
        X = random_symtensor(rng, dim, kx, 2)
        Y = random_symtensor(rng, dim, ky, 2)
        br = schouten_bracket(X, Y)
        assert (br + schouten_bracket(Y, X)).is_zero()
        assert br.is_zero() or br.order == max(kx + ky - 1, 0)


# -- split / embed ----------------------------------------------------------


def test_split_order0_only():
    X = GradedTensor.from_tensor(fn(q1))
    s, n = split(X)
    assert s == SPair(fn(q1), SymTensor.zero(1, 1)) and n.is_zero()


def test_split_order3_only():
    t = SymTensor(1, 3, {(1, 1, 1): q1})
    X = GradedTensor.from_tensor(t)
    s, n = split(X)
    assert s.is_zero() and n == NPart(X)


def test_split_reconstruction():
    rng = Lcg64(16)
    for _ in range(10):
        X = random_graded(rng, rng.next_int(1, 2), 4, parts=3)
        s, n = split(X)
        assert embed(s, n) == X


# -- mutual actions ---------------------------------------------------------


def test_act_left_no_order2_part():
    # only the order-2 part acts from the left
    Xn = NPart(GradedTensor.from_tensor(SymTensor(1, 3, {(1, 1, 1): q1})))
    s = SPair(fn(q1), vec(one))
    assert act_left(Xn, s).is_zero()


def test_act_left_example():
    Xn = NPart(GradedTensor.from_tensor(SymTensor(1, 2, {(1, 1): q1})))
    s = SPair(fn(q1), SymTensor.zero(1, 1))
    assert act_left(Xn, s) == SPair(fn(Poly.zero(1)), vec(2 * q1))


def test_act_left_constant_sigma():
    rng = Lcg64(17)
    Xn = random_npart(rng, 1)
    s = SPair(fn(Poly.constant(1, 5)), SymTensor.zero(1, 1))
    assert act_left(Xn, s).is_zero()


def test_act_right_trivial_element():
    rng = Lcg64(18)
    Xn = random_npart(rng, 2)
    assert act_right(Xn, SPair.zero(2)).is_zero()


def test_act_right_lie_derivative_example():
    X2 = SymTensor(1, 2, {(1, 1): q1})
    Xn = NPart(GradedTensor.from_tensor(X2))
    s = SPair(SymTensor.zero(1, 0), vec(one))
    expected = NPart(GradedTensor.from_tensor(SymTensor(1, 2, {(1, 1): Poly.constant(1, -1)})))
    assert act_right(Xn, s) == expected


def test_act_right_order3_sigma_example():
    X3 = SymTensor(1, 3, {(1, 1, 1): q1})
    Xn = NPart(GradedTensor.from_tensor(X3))
    s = SPair(fn(q1), SymTensor.zero(1, 1))
    # [X^3, sigma] = 3 X^{11l} sigma_{,l} at order 2
    expected = NPart(GradedTensor.from_tensor(SymTensor(1, 2, {(1, 1): 3 * q1})))
    assert act_right(Xn, s) == expected


# -- subalgebra bracket examples --------------------------------------------


def test_functions_commute():
    assert bracket_s(SPair(fn(q1), SymTensor.zero(1, 1)),
                     SPair(fn(q1 * q1), SymTensor.zero(1, 1))).is_zero()


def test_bracket_s_directional():
    a = SPair(SymTensor.zero(1, 0), vec(one))
    b = SPair(fn(q1), SymTensor.zero(1, 1))
    assert bracket_s(a, b) == SPair(fn(one), SymTensor.zero(1, 1))


def test_bracket_s_jacobi_lie():
    a = SPair(SymTensor.zero(1, 0), vec(q1))
    b = SPair(SymTensor.zero(1, 0), vec(one))
    assert bracket_s(a, b) == SPair(SymTensor.zero(1, 0), vec(Poly.constant(1, -1)))


# -- double cross sum --------------------------------------------------------


def test_double_cross_reduces_to_s():
    rng = Lcg64(19)
    a, b = random_spair(rng, 1), random_spair(rng, 1)
    zero = NPart.zero(1)
    ds, dn = double_cross_bracket((a, zero), (b, zero))
    assert ds == bracket_s(a, b) and dn.is_zero()


def test_double_cross_reduces_to_n():
    rng = Lcg64(20)
    m, n = random_npart(rng, 1, 3), random_npart(rng, 1, 3)
    zero = SPair.zero(1)
    ds, dn = double_cross_bracket((zero, m), (zero, n))
    assert ds.is_zero() and dn == bracket_n(m, n)


def test_double_cross_equals_total_bracket():
    rng = Lcg64(21)
    for _ in range(15):
        dim = rng.next_int(1, 2)
        a = (random_spair(rng, dim), random_npart(rng, dim))
        b = (random_spair(rng, dim), random_npart(rng, dim))
        ds, dn = double_cross_bracket(a, b, 10)
        ts, tn = split(schouten_graded(embed(*a), embed(*b), 10))
        assert ds == ts and dn == tn


def test_action_reconstruction_random():
    rng = Lcg64(22)
    for _ in range(15):
        dim = rng.next_int(1, 2)
        s = random_spair(rng, dim)
        n = random_npart(rng, dim)
        total = schouten_graded(n.graded, s.to_graded(), 10)
        sp, np_ = split(total)
        assert sp == act_left(n, s)
        assert np_ == act_right(n, s)


def test_compat_residuals_zero_inputs():
    r_s, r_n = compat_residuals(SPair.zero(1), SPair.zero(1), NPart.zero(1), NPart.zero(1))
    assert r_s.is_zero() and r_n.is_zero()


def test_compat_residuals_random():
    rng = Lcg64(23)
    for _ in range(20):
        dim = rng.next_int(1, 2)
        r_s, r_n = compat_residuals(
            random_spair(rng, dim), random_spair(rng, dim),
            random_npart(rng, dim), random_npart(rng, dim), 10,
        )
        assert r_s.is_zero() and r_n.is_zero()


def test_n_bracket_closure():
    rng = Lcg64(24)
    for _ in range(10):
        a = random_npart(rng, 2, 3)
        b = random_npart(rng, 2, 3)
        assert all(o >= 2 for o in bracket_n(a, b, 10).orders())


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        schouten_bracket(random_symtensor(Lcg64(1), 1, 1), random_symtensor(Lcg64(2), 2, 1))
