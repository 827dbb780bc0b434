import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weitzenbock.casimir import tau
from weitzenbock.oracle import kernel_slice, subalgebra_slice_dim
from weitzenbock.poly import format_poly
from weitzenbock.subalgebra import (
    Evaluator,
    GeneratorInfo,
    Signature,
    SignatureError,
    SliceTracker,
    SubalgebraBasis,
    _evaluate,
    acceptable_set,
    candidate_products,
    is_member,
    kernel_slice_dim,
    monomial_count,
    name_for,
    predicted_signature,
    signature,
    signature_solutions,
)

from conftest import P, kernel


def info(p, n, name):
    return GeneratorInfo(p, signature(p, n), name, 0, name)


def test_signature_examples():
    assert signature(P("x0", 3)) == Signature(1, 3, 0)
    assert signature(P("2*x0*x2 - x1^2", 3)) == Signature(2, 2, 2)
    assert str(Signature(15, 0, 45)) == "[15, 0, 45]"
    assert predicted_signature(6, 15, 0) == Signature(15, 0, 45)
    assert signature(P("x1", 3)) == Signature(1, 2, 1)  # not a kernel element: ord != weight is allowed
    with pytest.raises(SignatureError):
        signature(P("x0 + x0^2", 3))
    with pytest.raises(SignatureError):
        signature(P("x0*x1 + x1^2", 3))


def test_signature_arithmetic_is_componentwise():
    a, b = Signature(1, 2, 3), Signature(4, 5, 6)
    assert a + b == Signature(5, 7, 9)
    assert a.scaled(3) == Signature(3, 6, 9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.data())
def test_signature_is_additive(n, data):
    gens = kernel(n).generators
    g = data.draw(st.sampled_from(gens))
    h = data.draw(st.sampled_from(gens))
    assert signature(g.poly * h.poly, n) == g.sig + h.sig


def _brute_solutions(target, sigs):
    bound = target.deg
    out = []
    for alpha in itertools.product(range(bound + 1), repeat=len(sigs)):
        total = Signature(0, 0, 0)
        for a, s in zip(alpha, sigs):
            total = total + s.scaled(a)
        if total == target:
            out.append(alpha)
    return sorted(out)


@pytest.mark.parametrize("n", [3, 4])
def test_signature_solutions_match_brute_force(n):
    sigs = kernel(n).signatures()
    for deg in range(1, 6):
        for w in range((n * deg) % 2, n * deg + 1, 2):
            target = predicted_signature(n, deg, w)
            assert sorted(signature_solutions(target, sigs)) == _brute_solutions(target, sigs)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kernel_slice_dim_matches_nullspace(n):
    for deg in range(1, 6):
        for w in range((n * deg) % 2, n * deg + 1, 2):
            assert kernel_slice_dim(n, deg, w) == len(kernel_slice(n, deg, w)), (deg, w)


def test_monomial_count():
    assert monomial_count(2, 2, 2) == 2  # x0*x2, x1^2
    assert monomial_count(3, 1, 4) == 0
    assert monomial_count(4, 0, 0) == 1


def test_membership_n3():
    n = 3
    t, dv = P("x0", n), P("2*x0*x2 - x1^2", n)
    basis = [info(t, n, "t"), info(dv, n, "dv")]
    rep = is_member(dv * dv * 3, basis)
    assert rep is not None and rep.describe() == ["3 * dv^2"]
    assert is_member(t**3, basis[:1]).terms == [((3,), 1)]
    tr = tau(1, dv)
    assert is_member(tr, basis) is None
    with pytest.raises(SignatureError):
        is_member(P("x1", n), basis)


def test_membership_is_exact_with_rational_coefficients():
    n = 4
    g = {x.name: x for x in kernel(n).generators}
    z = g["f2_4"].poly * g["f2_0"].poly * Fraction(5, 7) + g["t"].poly * g["f3_0"].poly * Fraction(-1, 3)
    rep = is_member(z, list(g.values()))
    assert rep is not None
    assert sorted(rep.describe()) == ["-1/3 * t*f3_0", "5/7 * f2_0*f2_4"]


def test_relation_tau2_d1_n4():
    n = 4
    t = P("x0", n)
    basis = [info(t, n, "t"), info(tau(2, t), n, "d1"), info(tau(4, t), n, "d2")]
    rep = is_member(tau(2, tau(2, t)), basis)
    assert rep is not None and rep.support() == [(1, 0, 1)]
    tr1 = tau(1, tau(2, t))
    assert is_member(tr1, basis) is None
    assert signature_solutions(Signature(4, 8, 4), [s.sig for s in basis]) == [(0, 2, 0), (2, 0, 1)]
    assert signature_solutions(Signature(3, 12, 0), [Signature(1, 4, 0)]) == [(3,)]
    assert signature_solutions(Signature(1, 0, 1), [Signature(2, 0, 4)]) == []


def test_candidates_n3_round_two():
    n = 3
    t, dv = P("x0", n), P("2*x0*x2 - x1^2", n)
    basis = SubalgebraBasis((info(t, n, "t"),), (info(dv, n, "dv"),))
    got = sorted(c.provenance for c in candidate_products(basis, n))
    assert got == ["tau_1(dv)", "tau_2(dv)", "tau_3(dv^2)"]


def test_candidates_and_acceptable_n3_round_three():
    n = 3
    t, dv = P("x0", n), P("2*x0*x2 - x1^2", n)
    tr = tau(1, dv)
    est = (info(t, n, "t"), info(dv, n, "dv"))
    basis = SubalgebraBasis(est, (info(tr, n, "tr"),))
    cands = candidate_products(basis, n)
    # the filter rules keep all three; tau_1(tr) = -dv^2 and tau_2(tr) = 0 then drop out on evaluation
    assert [(c.k, c.provenance) for c in cands] == [(1, "tau_1(tr)"), (2, "tau_2(tr)"), (3, "tau_3(tr)")]
    assert tau(1, tr) == -(dv * dv) and not tau(2, tr)
    new = acceptable_set(basis, n)
    assert len(new) == 1 and new[0].sig == Signature(3 + 1, 0, 6)
    assert new[0].poly == P("9*x0^2*x3^2 - 18*x0*x1*x2*x3 + 8*x0*x2^3 + 6*x1^3*x3 - 3*x1^2*x2^2", n)
    assert is_member(new[0].poly, list(basis.generators)) is None


def test_acceptable_set_is_empty_once_closed():
    for n in (1, 4):
        gens = kernel(n).generators
        basis = SubalgebraBasis((), tuple(gens))
        assert acceptable_set(basis, n) == []


def test_order_zero_basis_has_no_candidates():
    n = 4
    z = tau(4, P("x0", n))
    basis = SubalgebraBasis((), (info(z, n, "d2"),))
    assert candidate_products(basis, n) == []


def test_candidates_n5_round_two():
    n = 5
    t = P("x0", n)
    basis = SubalgebraBasis((info(t, n, "t"),), (info(tau(2, t), n, "d1"), info(tau(4, t), n, "d2")))
    got = {c.provenance for c in candidate_products(basis, n)}
    expected = {f"tau_{i}(d1)" for i in range(1, 6)} | {"tau_1(d2)", "tau_2(d2)"}
    expected |= {"tau_3(d2^2)", "tau_4(d2^2)", "tau_5(d2^3)"}
    assert got == expected


def test_candidates_need_a_fresh_factor():
    n = 3
    t = P("x0", n)
    basis = SubalgebraBasis((info(t, n, "t"),), ())
    with pytest.raises(SignatureError):
        candidate_products(SubalgebraBasis((), ()), n)
    assert candidate_products(basis, n) == []


def test_acceptable_set_first_round():
    for n in range(1, 7):
        t = P("x0", n)
        basis = SubalgebraBasis((), (info(t, n, "t"),))
        new = acceptable_set(basis, n, round_no=1)
        # only tau_i(t) with i even survive, one generator each
        assert sorted(g.sig.ord for g in new) == sorted(n + n - 2 * i for i in range(2, n + 1, 2))
        for g in new:
            assert g.poly == P(format_poly(g.poly), n)


def test_slice_tracker_is_a_lower_bound():
    n = 4
    gens = kernel(n).generators
    tracker = SliceTracker(n)
    for deg in range(1, 6):
        for w in range(0, n * deg + 1, 2):
            full = tracker.is_full(gens, deg, w)
            spanned = subalgebra_slice_dim(gens, n, deg, w) == len(kernel_slice(n, deg, w))
            assert full == spanned, (deg, w)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=4, max_size=4))
def test_modular_evaluation_matches_exact(point):
    p = P("7*x0*x2^3 - x1^2 + 3*x3 - 11", 3)
    assert _evaluate(p, point, None) % 101 == _evaluate(p, point, 101)
    ev = Evaluator(3, modulus=None, seed=5)
    assert ev.values(p, 4) == [_evaluate(p, pt, None) for pt in ev.points[:4]]


def test_name_for():
    sig = Signature(6, 6, 15)
    assert name_for(sig, set()) == "f6_6"
    assert name_for(sig, {"f6_6"}) == "f6_6b"
    assert name_for(sig, {"f6_6", "f6_6b"}) == "f6_6c"
