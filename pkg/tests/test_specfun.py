import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, mpc

from cbcdiv.specfun import (
    DickmanTable,
    build_dickman_table,
    cheb_antideriv,
    cheb_eval,
    cheb_fit,
    cheb_nodes,
    default_dickman_table,
    e1,
    ein,
    rho,
    rho_saddle,
    truncation_bound,
    weight,
    xi,
)


@pytest.fixture(scope="module")
def table():
    return default_dickman_table()


# frozen oracle values computed by adaptive quadrature of the defining
# integral; kept as strings so they are parsed at full working precision
E1_AT_1 = "0.21938393439552027367716377546012164903104729340691"
E1_AT_10 = "4.15696892968532427740285981027818038e-6"


def test_e1_frozen_oracles():
    with mp.workdps(60):
        assert abs(e1(mpf(1), 50) - mpf(E1_AT_1)) < mpf(10) ** -45
        ref10 = mpf(E1_AT_10)
        assert abs(e1(mpf(10), 50) - ref10) / ref10 < mpf(10) ** -30


def test_e1_rejects_zero():
    with pytest.raises((ValueError, ZeroDivisionError)):
        e1(0, 30)


def test_e1_series_cf_crossover_agreement():
    # both evaluation paths agree on a ring spanning the switchover radius
    with mp.workdps(60):
        r = mpf(max(4, 50 // 3))
        for frac in ("0.9", "1.0", "1.1"):
            for arg in ("0.3", "1.0", "2.0"):
                z = r * mpf(frac) * mp.exp(1j * mpf(arg))
                lo = e1(z, 50)
                hi = e1(z, 80)
                assert abs(lo - hi) / abs(hi) < mpf(10) ** -45


def test_ein_identity_and_entirety():
    with mp.workdps(40):
        for z in (mpf("0.7"), mpc(2, 3), mpf(-4)):
            # Ein(z) = gamma + log z + E1(z) off the branch cut
            if mp.re(z) > 0:
                lhs = ein(z, 40)
                rhs = mp.euler + mp.log(z) + e1(z, 40)
                assert abs(lhs - rhs) < mpf(10) ** -35
        # entire: converges on the negative axis where E1 has its cut
        v = ein(mpf(-4), 40)
        assert mp.isfinite(v)


def test_xi_defining_equation():
    with mp.workdps(40):
        assert xi(1, 40) == 0
        for u in (2, 5, 10, 40):
            x = xi(u, 40)
            assert abs(mp.exp(x) - 1 - u * x) < mpf(10) ** -35
        approx = mp.log(10 * mp.log(10))
        assert abs(xi(10, 40) - approx) / approx < 0.25


def test_rho_analytic_values(table):
    with mp.workdps(30):
        assert abs(rho(mpf(2), table) - (1 - mp.log(2))) < mpf(10) ** -10
        assert abs(rho(mpf("1.5"), table) - (1 - mp.log(mpf("1.5")))) < mpf(10) ** -12
        assert abs(rho(mpf(3), table) - mpf("0.048608388291131632")) < mpf(10) ** -12
        assert rho(mpf("0.5"), table) == 1


def test_rho_monotone_positive(table):
    with mp.workdps(30):
        prev = rho(mpf(1), table)
        for i in range(1, 120):
            u = 1 + mpf(i) / 2
            cur = rho(u, table)
            assert 0 < cur < prev
            prev = cur


def test_rho_deep_values(table):
    # marching stays accurate deep into the tail (vs saddle point form)
    with mp.workdps(40):
        for u in (10, 30, 40):
            ratio = rho_saddle(mpf(u), 40) / rho(mpf(u), table)
            assert abs(ratio - 1) < 0.01


def test_rho_out_of_table_raises(table):
    with pytest.raises(ValueError):
        rho(mpf(table.u_max + 1), table)


def test_table_refinement_stability(table):
    fine = build_dickman_table(u_max=12, degree=32, precision=40)
    with mp.workdps(30):
        for u in ("2.5", "7.25", "11.5"):
            a = rho(mpf(u), table)
            b = rho(mpf(u), fine)
            assert abs(a - b) / b < mpf(10) ** -11


def test_weight_values():
    with mp.workdps(30):
        assert weight(2, 1, 30) == mpf(1) / 2
        total = sum(weight(k, 1, 30) for k in range(2, 61))
        assert abs(total - (1 - mpf(2) ** -59)) < mpf(10) ** -25
        with pytest.raises(ValueError):
            weight(3, 3, 30)


@pytest.mark.parametrize("ell", range(1, 9))
def test_weight_moment_identities(ell):
    with mp.workdps(40):
        kmax = truncation_bound(ell, 1e-30)
        ws = [(k, weight(k, ell, 40)) for k in range(ell + 1, kmax + 1)]
        total = mp.fsum(w for _, w in ws)
        mean = mp.fsum(k * w for k, w in ws)
        assert abs(total - 1) < mpf(10) ** -25
        assert abs(mean - (2 * ell + 1)) < mpf(10) ** -20


def test_truncation_bound_tail_control():
    with mp.workdps(30):
        for ell in (1, 2, 4):
            for tol in (1e-10, 1e-20):
                kmax = truncation_bound(ell, tol)
                tail = mp.fsum(weight(k, ell, 30) for k in range(kmax + 1, kmax + 400))
                assert tail < tol
    assert truncation_bound(3, 1e-60) >= 200  # deep-tolerance floor


def test_cheb_roundtrip():
    with mp.workdps(40):
        xs = cheb_nodes(16)
        vals = [mp.exp(x) for x in xs]
        cs = cheb_fit(vals)
        for t in ("-0.77", "0.0", "0.5"):
            assert abs(cheb_eval(cs, mpf(t)) - mp.exp(mpf(t))) < mpf(10) ** -18
        anti = cheb_antideriv(cs)
        want = mp.exp(mpf("0.5")) - mp.exp(-1)
        assert abs(cheb_eval(anti, mpf("0.5")) - want) < mpf(10) ** -17


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=200))
@settings(max_examples=60, deadline=None)
def test_weight_positive_and_bounded(ell, offset):
    k = ell + 1 + offset
    with mp.workdps(25):
        w = weight(k, ell, 25)
        assert 0 < w <= mpf(1) / 2


def test_dickman_csv_dump(table):
    text = table.to_csv()
    lines = text.strip().split("\n")
    assert lines[0].startswith("u,")
    assert len(lines) > 10
