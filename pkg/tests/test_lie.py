import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rpkit import DomainError
from rpkit.core_model import Constant, RpeParams, State, rhs
from rpkit.integrate import integrate_rpe
from rpkit.lie import (
    DYDX,
    MAX_DEGREE,
    X,
    Y,
    Ansatz,
    VectorField,
    determining_system,
    exponent_grid,
    group_flow,
    lambda_prolong,
    prolong2,
    proportional,
    reduce_time_translation,
    scan_exponents,
    selected_exponents,
    solve_symmetries,
    symmetry_condition,
    verify_symmetry,
)
from rpkit.symbolic import Const, Param, R, Rddot, Rdot, is_zero, normalize, parse, substitute, t

from cases import CASE_1_2, CASE_2, CASE_3, FULL, GENERIC

VF = VectorField.parse


# prolongation

def test_prolong_time_translation():
    pr = prolong2(VF("1", "0"))
    assert is_zero(pr.eta1) and is_zero(pr.eta2)


def test_prolong_scaling():
    pr = prolong2(VF("t", "R"))
    assert is_zero(pr.eta1)
    assert pr.eta2 == normalize(-Rddot)


def test_prolong_case_1_2_generator():
    pr = prolong2(VF("t + 1", "2/5*R"))
    assert pr.eta1 == normalize(F(-3, 5) * Rdot)
    assert pr.eta2 == normalize(F(-8, 5) * Rddot)


def test_lambda_prolong_examples():
    assert lambda_prolong(VF("0", "R"), 1 / R).eta1 == normalize(Rdot + 1)
    c = Param("c")
    assert lambda_prolong(VF("1", "0"), c).eta1 == normalize(-c * Rdot)


def test_lambda_prolong_variants_differ():
    vf, lam = VF("t", "R^2"), normalize(R)
    printed = lambda_prolong(vf, lam)
    alternate = lambda_prolong(vf, lam, variant="alternate")
    assert printed.eta1 == alternate.eta1
    assert not is_zero(printed.eta2 - alternate.eta2)


def test_lambda_must_avoid_rddot():
    with pytest.raises(ValueError):
        lambda_prolong(VF("1", "0"), Rddot)


def test_vector_field_is_a_point_field():
    with pytest.raises(ValueError):
        VF("Rdot", "0")


fields = st.tuples(
    st.sampled_from(["1", "t", "t + 1", "R", "t*R", "t^2", "R^2 - t"]),
    st.sampled_from(["0", "R", "2/5*R", "t*R", "R^2", "t^2 + R"]),
).map(lambda pair: VF(*pair))
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@given(fields, fields, rationals)
def test_prolong_is_linear(v1, v2, a):
    combo = prolong2(v1.scale(a) + v2)
    p1, p2 = prolong2(v1), prolong2(v2)
    assert combo.eta1 == normalize(Const(a) * p1.eta1 + p2.eta1)
    assert combo.eta2 == normalize(Const(a) * p1.eta2 + p2.eta2)


@given(fields)
def test_lambda_zero_is_plain_prolongation(vf):
    a, b = lambda_prolong(vf, Const(0)), prolong2(vf)
    assert (a.eta1, a.eta2) == (b.eta1, b.eta2)


# symmetry condition

def test_condition_vanishes_for_time_translation():
    assert is_zero(symmetry_condition(FULL, VF("1", "0")))


def test_condition_vanishes_for_case_2():
    p = CASE_2.replace(re_inv=0)
    assert is_zero(symmetry_condition(p, VF("t + 1", "R/2")))
    assert is_zero(symmetry_condition(CASE_2, VF("t + 1", "R/2")))


def test_condition_nonzero_for_scaling_on_full_equation():
    assert not is_zero(symmetry_condition(FULL, VF("t", "R")))


# determining equations

def test_cubic_coefficient_structure():
    ansatz = Ansatz(4)
    system = determining_system(FULL.replace(k=F(7, 5)), ansatz, forcing="opaque", symbolic=True)
    xi = ansatz.xi
    from rpkit.symbolic import diff

    target = normalize(2 * diff(diff(xi, R), R) * R - 3 * diff(xi, R))
    ratio = proportional(system.by_rdot[3], target)
    assert ratio is not None
    assert ratio.__class__.__name__ in ("Product", "Power", "Const", "Var", "Param")


def test_four_rdot_powers():
    system = determining_system(FULL, Ansatz(2), forcing="opaque", symbolic=True)
    assert sorted(system.by_rdot) == [0, 1, 2, 3]


def test_quadratic_coefficient_matches_printed_form():
    # -1/2 R^4 times the five-term printed equation at k = 1.
    ansatz = Ansatz(2)
    system = determining_system(FULL, ansatz, forcing="opaque", symbolic=True)
    from rpkit.symbolic import diff

    xi, eta = ansatz.xi, ansatz.eta
    re = normalize(1 / Param("Re_inv"))
    printed = normalize(
        4 * re * diff(diff(xi, t), R) * R ** 2 - 2 * diff(diff(eta, R), R) * re * R ** 2
        - 3 * diff(eta, R) * re * R - 4 * diff(xi, R) + 3 * eta * re
    )
    ratio = proportional(system.by_rdot[2], printed)
    assert ratio == normalize(F(-1, 2) * R ** 4)


def test_degree_zero_forces_eta_to_vanish():
    system = determining_system(FULL, Ansatz(0))
    rows = system.matrix()
    c_col, d_col = 0, 1
    assert all(r[c_col] == 0 for r in rows)
    assert any(r[d_col] != 0 for r in rows)


def test_ansatz_guard():
    with pytest.raises(ValueError):
        Ansatz(MAX_DEGREE + 1)


# solving

def test_case_1_basis():
    assert [(str(v.xi), str(v.eta)) for v in solve_symmetries(FULL, 1)] == [("1", "0")]


def test_case_1_2_basis():
    (vf,) = solve_symmetries(CASE_1_2, 1)
    assert (vf.xi, vf.eta) == (normalize(t + 1), normalize(F(2, 5) * R))


def test_case_2_basis():
    (vf,) = solve_symmetries(CASE_2, 1)
    assert (vf.xi, vf.eta) == (normalize(t + 1), normalize(R / 2))


def test_case_3_basis():
    (vf,) = solve_symmetries(CASE_3, 1)
    assert (vf.xi, vf.eta) == (normalize(t + 1), normalize(F(2, 3) * R))


def test_generic_case_has_no_symmetry():
    assert solve_symmetries(GENERIC, 2) == []


def test_exponent_scan_selects_two_thirds():
    grid = exponent_grid(-3, 0, F(1, 3))
    entries = scan_exponents(CASE_3, grid)
    assert selected_exponents(entries) == [F(-2, 3)]
    assert [len(e.basis) for e in entries if e.e == -3] == [0]
    assert [(str(v.xi), str(v.eta)) for e in entries if e.e == 0 for v in e.basis] == [("1", "0")]


@pytest.mark.parametrize("p,degree", [(FULL, 2), (CASE_1_2, 2), (CASE_2, 1), (CASE_3, 2)])
def test_basis_satisfies_every_equation(p, degree):
    ansatz = Ansatz(degree)
    system = determining_system(p, ansatz)
    for vf in solve_symmetries(p, ansatz):
        values = _coefficients(ansatz, vf)
        assert all(is_zero(r) for r in system.residuals(values))
        assert verify_symmetry(p, vf) < 1e-9


def _coefficients(ansatz, vf):
    from rpkit.symbolic import collect

    out = []
    for comp in (vf.xi, vf.eta):
        parts = collect(comp, [t, R])
        out.extend(parts.get((i, j), Const(0)).value for i, j in ansatz.exponents)
    return out


# numeric verification

def test_verify_examples():
    assert verify_symmetry(CASE_2, VF("t + 1", "R/2")) < 1e-10
    assert verify_symmetry(FULL, VF("1", "0")) == 0.0
    assert verify_symmetry(FULL, VF("t", "R")) > 0.1


def test_flow_translation():
    assert group_flow(VF("1", "0"), 0.7, (1.0, 2.0)) == pytest.approx((1.7, 2.0), abs=1e-12)


@pytest.mark.parametrize("eps", [0.3, -0.5, 1.2])
def test_flow_scaling(eps):
    ts, rs = group_flow(VF("t + 1", "2/5*R"), eps, (0.0, 1.0))
    assert ts == pytest.approx(math.exp(eps) - 1, rel=1e-9, abs=1e-10)
    assert rs == pytest.approx(math.exp(0.4 * eps), rel=1e-9)


def test_flow_identity():
    assert group_flow(VF("t^2 + 1", "R*t"), 0.0, (0.3, 0.9)) == (0.3, 0.9)


def test_flow_leaving_domain():
    with pytest.raises(DomainError):
        group_flow(VF("0", "-1"), 2.0, (0.0, 1.0))


@pytest.mark.parametrize("p", [FULL, CASE_1_2, CASE_2, CASE_3], ids=["1", "1.2", "2", "3"])
def test_symmetry_maps_solutions_to_solutions(p):
    (vf,) = solve_symmetries(p, 1)
    tr = integrate_rpe(p, State(0.0, 1.0, 0.1), 3.0)
    eps = 0.1
    mapped = np.array([group_flow(vf, eps, (tt, float(tr(tt)[0]))) for tt in np.linspace(0.2, 2.8, 41)])
    mapped = mapped[np.argsort(mapped[:, 0])]
    # Fine stencils around each mapped point via the flow of neighbouring trajectory points.
    worst = 0.0
    h = 1e-3
    for tt in np.linspace(0.4, 2.6, 12):
        pts = [group_flow(vf, eps, (s, float(tr(s)[0]))) for s in (tt - h, tt, tt + h)]
        (t0, r0), (t1, r1), (t2, r2) = pts
        h0, h1 = t1 - t0, t2 - t1
        v = (r2 - r1) / h1 * h0 / (h0 + h1) + (r1 - r0) / h0 * h1 / (h0 + h1)
        a = 2 * ((r2 - r1) / h1 - (r1 - r0) / h0) / (h0 + h1)
        worst = max(worst, abs(a - rhs(p, State(t1, r1, v))))
    assert worst < 1e-4


# reduction

def test_reduction_inviscid_form():
    p = RpeParams(th=1, p_n=1, k=1, forcing=Constant(1))
    red = reduce_time_translation(p)
    x, y = X, Y
    target = normalize(2 * x ** 2 * y * DYDX + 3 * x * y ** 2 - 2 * x ** -2 + 2 * x)
    assert red.equation == target


def test_reduction_vanishes_at_equilibrium():
    p = RpeParams(we=1, th=1, p_n=2, k=1, forcing=Constant(1))
    red = reduce_time_translation(p)
    b = substitute(substitute(red.B, Y, Const(0)), X, Const(1))
    assert is_zero(b)


def test_reduction_slope_without_gas():
    p = RpeParams(th=1, p_n=0, k=1, forcing=Constant(2))
    red = reduce_time_translation(p)
    x, y = 1.7, -0.6
    assert red.slope(x, y) == pytest.approx(-(3 * y * y + 2 * 2) / (2 * x * y), rel=1e-14)


def test_reduction_needs_constant_forcing():
    from rpkit.errors import UnsupportedForcing

    with pytest.raises(UnsupportedForcing):
        reduce_time_translation(CASE_2)


@pytest.mark.parametrize("k", [F(1), F(2, 3), F(7, 5)])
def test_linear_and_constant_coefficients_match_printed_forms(k):
    from rpkit.symbolic import P, P1, Power, diff

    ansatz = Ansatz(2)
    system = determining_system(FULL.replace(k=k), ansatz, forcing="opaque", symbolic=True)
    xi, eta = ansatz.xi, ansatz.eta
    re, we, th, pn = normalize(1 / Param("Re_inv")), Param("We"), Param("Th"), Param("p_n")
    a, b, c, d = (Power(R, 3 * k + n) for n in (3, 2, 1, 0))
    dt, dR = (lambda e: diff(e, t)), (lambda e: diff(e, R))
    eq19 = normalize(
        re * dt(dt(xi)) * a - 2 * dt(dR(eta)) * re * a - 3 * re * P * th * dR(xi) * b - 3 * dt(eta) * re * b
        - 3 * re * we * dR(xi) * c - dt(xi) * c + 2 * eta * d + 3 * pn * re * dR(xi) * R ** 2
    )
    eq20 = normalize(
        re * dt(dt(eta)) * a + 2 * re * th * P * dt(xi) * b + re * th * P1 * xi * b - re * th * dR(eta) * P * b
        + 2 * re * we * dt(xi) * c - re * we * dR(eta) * c - re * th * eta * P * c + dt(eta) * c
        - 2 * re * we * eta * d - 2 * pn * re * dt(xi) * R ** 2 + pn * re * dR(eta) * R ** 2
        + 3 * k * pn * re * eta * R + pn * re * eta * R
    )
    assert is_zero(system.by_rdot[1] + eq19)
    assert is_zero(system.by_rdot[0] - eq20)
