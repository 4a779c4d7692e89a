import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zcorr.correlators import (
    CorrelationQuery,
    G_wick_enumerate,
    evaluate,
    f_m_eval,
    g_l_eval,
    generalized_binomial,
    k_npoint_berezin,
    kappa_low_codim_closed,
    kappa_pair_berezin,
    kappa_pair_expansion,
    kappa_point_closed,
    kappa_point_fm,
    kappa_point_wick,
    moment_permanent,
    permanent,
    wick_terms,
)
from zcorr.errors import CapacityError, DomainError
from zcorr.kernel import PointConfig, build_covariance, pair_kernel, standard_pair_config


def rel(a, b):
    return abs(a - b) / abs(b)


def random_unitary(rng, m):
    Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / abs(np.diag(R)))


# -- general n-point route --------------------------------------------------

@pytest.mark.parametrize("k,m", [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3), (4, 4)])
def test_single_point_normalization(k, m):
    cfg = PointConfig(np.linspace(0.1, 0.7, m) * (1 - 0.5j))
    assert k_npoint_berezin(cfg, k) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("k,m,r", [(1, 1, 0.7), (1, 2, 1.3), (2, 2, 0.4), (2, 3, 2.0)])
def test_two_points_match_pair_route(k, m, r):
    cfg = standard_pair_config(r, m)
    assert rel(k_npoint_berezin(cfg, k), kappa_pair_berezin(r, k, m)) < 1e-10


def test_pair_route_sees_only_the_distance():
    rng = np.random.default_rng(11)
    r, m = 0.9, 2
    z = rng.normal(size=m) + 1j * rng.normal(size=m)
    d = rng.normal(size=m) + 1j * rng.normal(size=m)
    cfg = PointConfig([z, z + r * d / np.linalg.norm(d)])
    assert rel(k_npoint_berezin(cfg, 2), kappa_point_closed(r, m)) < 1e-10


def _triangle(rng, scale=1.0):
    return PointConfig(scale * (rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))))


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("k", [1, 2])
def test_three_point_symmetry_and_motion(seed, k):
    rng = np.random.default_rng(seed)
    cfg = _triangle(rng)
    base = k_npoint_berezin(cfg, k)
    assert base >= 0
    for order in [(1, 0, 2), (2, 1, 0), (1, 2, 0)]:
        assert rel(k_npoint_berezin(cfg.permuted(order), k), base) < 1e-12
    moved = cfg.transformed(random_unitary(rng, 2), rng.normal(size=2) + 1j * rng.normal(size=2))
    assert rel(k_npoint_berezin(moved, k), base) < 1e-9


def test_three_far_points_decorrelate():
    cfg = PointConfig([[0, 0], [9, 0], [0, 9j]])
    for k in (1, 2):
        assert k_npoint_berezin(cfg, k) == pytest.approx(1, abs=1e-8)


def test_three_points_factorize_when_one_is_far():
    # the far point drops out and the remaining pair correlation survives
    r = 0.8
    cfg = PointConfig([[0, 0], [r, 0], [30, 30]])
    assert rel(k_npoint_berezin(cfg, 1), kappa_low_codim_closed(r, 1, 2)) < 1e-10


def test_npoint_capacity():
    cfg = PointConfig(np.arange(1, 10)[:, None] * np.ones((9, 2)))
    with pytest.raises(CapacityError):
        k_npoint_berezin(cfg, 2)


# -- pair routes ------------------------------------------------------------

def test_kappa11_matches_lambda_formula():
    r = 0.6
    pk = pair_kernel(r)
    # (L11 L22 + L12 L21) / det A with L11 = L22 = P and L12 = L21 = Q
    assert rel(kappa_pair_berezin(r, 1, 1), (pk.P**2 + pk.Q**2) / pk.detA) < 1e-13


def test_kappa22_neutrality():
    assert kappa_pair_berezin(0.01, 2, 2) == pytest.approx(0.75, abs=1e-3)


@pytest.mark.parametrize("k,m", [(1, 1), (1, 3), (2, 2), (2, 4), (3, 3), (4, 4)])
def test_far_pair_is_uncorrelated(k, m):
    for f in (kappa_pair_berezin, kappa_pair_expansion):
        assert f(10.0, k, m) == pytest.approx(1, abs=1e-10)


def test_expansion_matches_berezin():
    assert rel(kappa_pair_expansion(1.0, 1, 2), kappa_pair_berezin(1.0, 1, 2)) < 1e-10


def test_expansion_matches_codim2_formula():
    assert rel(kappa_pair_expansion(0.7, 2, 3), kappa_low_codim_closed(0.7, 2, 3)) < 1e-10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_expansion_has_2k_plus_1_real_terms(k):
    _, terms = kappa_pair_expansion(0.8, k, 3, return_terms=True)
    assert len(terms) == 2 * k + 1
    assert all(isinstance(t, float) for t in terms)


def test_expansion_at_m1_uses_t0_only():
    assert [generalized_binomial(-1 + t, t) for t in range(3)] == [1, 0, 0]
    assert rel(kappa_pair_expansion(0.5, 1, 1), kappa_pair_berezin(0.5, 1, 1)) < 1e-12


def test_generalized_binomial_matches_comb():
    for top in range(8):
        for t in range(6):
            assert generalized_binomial(top, t) == math.comb(top, t)


def test_float_expansion_loses_digits_at_small_r():
    # documents why the expansion route runs in extended precision
    exact = kappa_point_closed(0.1, 4)
    assert rel(kappa_pair_expansion(0.1, 4, 4, dps=None), exact) > 1e-9
    assert rel(kappa_pair_expansion(0.1, 4, 4), exact) < 1e-13


@pytest.mark.parametrize("f", [kappa_pair_berezin, kappa_pair_expansion])
def test_pair_domain(f):
    with pytest.raises(DomainError, match="r > 0"):
        f(0.0, 1, 1)
    with pytest.raises(DomainError):
        f(1.0, 3, 2)


# -- closed forms -----------------------------------------------------------

@pytest.mark.parametrize("m", range(1, 7))
def test_codim1_far_limit(m):
    assert kappa_low_codim_closed(30.0, 1, m) == pytest.approx(1, abs=1e-12)


def test_kappa11_closed_reduces_to_p2_plus_q2():
    pk = pair_kernel(1.7)
    assert rel(kappa_low_codim_closed(1.7, 1, 1), (pk.P**2 + pk.Q**2) / pk.detA) < 1e-14


@pytest.mark.parametrize("m", [3, 4, 6])
def test_codim2_leading_term(m):
    r = 0.05
    assert kappa_low_codim_closed(r, 2, m) * r**4 == pytest.approx((m - 2) / m, rel=0.02)


def test_low_codim_domain():
    with pytest.raises(DomainError):
        kappa_low_codim_closed(1.0, 4, 5)
    with pytest.raises(DomainError):
        kappa_low_codim_closed(1.0, 3, 2)
    with pytest.raises(DomainError, match="r > 0"):
        kappa_low_codim_closed(-1.0, 1, 1)


@pytest.mark.parametrize("m", range(1, 7))
def test_point_closed_far_limit(m):
    assert kappa_point_closed(10.0, m) == pytest.approx(1, abs=1e-10)


def test_point_closed_m2_neutral():
    assert kappa_point_closed(0.01, 2) == pytest.approx(0.75, abs=1e-3)


def test_point_closed_m1_series_value():
    u = 0.25
    series = u / 2 - u**3 / 36 + u**5 / 720
    assert kappa_point_closed(0.5, 1) == pytest.approx(series, abs=1e-4)
    assert kappa_point_closed(0.5, 1) == pytest.approx(0.12459, abs=1e-4)


@pytest.mark.parametrize("m", range(1, 7))
def test_point_leading_term(m):
    r = 0.05
    assert kappa_point_closed(r, m) * r ** (2 * m - 4) == pytest.approx((m + 1) / 4, rel=0.02)


@given(st.floats(min_value=0.05, max_value=6), st.integers(min_value=1, max_value=8))
@settings(max_examples=80, deadline=None)
def test_point_closed_matches_fm_route(r, m):
    assert rel(kappa_point_closed(r, m), kappa_point_fm(r, m)) < 1e-12


@given(st.floats(min_value=0.05, max_value=8), st.integers(min_value=1, max_value=6))
@settings(max_examples=60, deadline=None)
def test_point_correlation_nonnegative(r, m):
    assert kappa_point_closed(r, m) >= -1e-10
    assert kappa_low_codim_closed(r, 1, m) >= -1e-10


# -- f_m, g_l ---------------------------------------------------------------

def test_f1_is_one():
    assert f_m_eval(1, 0.3, 1.7) == 1
    assert f_m_eval(1, 0.3, 1.7, form="rational") == pytest.approx(1)


@pytest.mark.parametrize("m", range(1, 9))
def test_fm_at_one_one(m):
    assert f_m_eval(m, 1, 1) == m * (m + 1) // 2


def test_fm_rational_singular_at_diagonal():
    with pytest.raises(DomainError):
        f_m_eval(3, 0.5, 0.5, form="rational")


def test_fm_forms_agree():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = rng.uniform(0, 1, size=2)
        m = int(rng.integers(1, 9))
        a, b = f_m_eval(m, x, y), f_m_eval(m, x, y, form="rational")
        assert abs(a - b) <= 1e-12 * max(1, abs(a))


@given(st.integers(min_value=1, max_value=8),
       st.floats(min_value=0, max_value=2), st.floats(min_value=0, max_value=2))
@settings(max_examples=60, deadline=None)
def test_fm_gl_identity(l, x, y):
    # x f_l(x, y) + y f_l(y, x) = l g_l(x, y)
    lhs = x * f_m_eval(l, x, y) + y * f_m_eval(l, y, x)
    assert lhs == pytest.approx(l * g_l_eval(l, x, y), rel=1e-12, abs=1e-12)


def test_gl_small_cases():
    assert g_l_eval(0, 3.0, 5.0) == 1
    assert g_l_eval(2, 2.0, 3.0) == 4 + 6 + 9


# -- Wick -------------------------------------------------------------------

def test_wick_m1():
    pk = pair_kernel(0.9)
    assert G_wick_enumerate(pk, 1) == pytest.approx(pk.P**2 + pk.Q**2, rel=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_wick_matches_G_formula(m, r):
    pk = pair_kernel(r)
    R2, S2 = pk.R**2, pk.S**2
    formula = math.factorial(m - 1) * math.factorial(m) * (
        pk.P**2 * f_m_eval(m, R2, S2) + pk.Q**2 * f_m_eval(m, S2, R2))
    assert rel(G_wick_enumerate(pk, m), formula) < 1e-12
    assert rel(kappa_point_wick(r, m), kappa_point_closed(r, m)) < 1e-12


def test_wick_terms_are_products_of_nonnegative_factors():
    terms = wick_terms(0.7, 3)
    assert terms
    for t in terms:
        assert len(t.factors) == 3 and all(f >= 0 for f in t.factors)
        assert t.value == pytest.approx(np.prod(t.factors))
        for q in range(3):
            assert {t.mu[q], t.nu[q]} == {t.alpha[q], t.beta[q]}
    G = math.factorial(3) * sum(t.value for t in terms)
    assert rel(G, G_wick_enumerate(0.7, 3)) < 1e-14


def test_wick_moments_match_permanents_of_lambda():
    # the factorized moment against the permanent of the covariance submatrix
    r, m = 0.8, 3
    L = build_covariance(standard_pair_config(r, m), 1).LambdaInf
    for t in wick_terms(r, m):
        assert moment_permanent(L, t.alpha, t.beta, t.mu, t.nu) == pytest.approx(t.value, abs=1e-13)


def test_ryser_permanent():
    assert permanent(np.ones((3, 3))) == pytest.approx(6)
    assert permanent(np.array([[1, 2], [3, 4]])) == pytest.approx(10)


def test_wick_capacity():
    with pytest.raises(CapacityError):
        G_wick_enumerate(1.0, 6)


# -- query / dispatcher -----------------------------------------------------

def test_query_validation():
    with pytest.raises(DomainError):
        CorrelationQuery(2, 3, 2, 1.0)
    with pytest.raises(DomainError):
        CorrelationQuery(3, 1, 2, 1.0)
    with pytest.raises(DomainError, match="r > 0"):
        CorrelationQuery(2, 1, 1, -1.0)
    with pytest.raises(DomainError):
        CorrelationQuery(2, 1, 3, standard_pair_config(1.0, 2))


@pytest.mark.parametrize("method", ["berezin", "expansion", "closed", "wick"])
def test_evaluate_methods_agree(method):
    q = CorrelationQuery(2, 3, 3, 1.0)
    assert rel(evaluate(q, method), kappa_point_closed(1.0, 3)) < 1e-10


def test_evaluate_point_config():
    cfg = standard_pair_config(1.2, 2)
    q = CorrelationQuery(2, 1, 2, cfg)
    assert rel(evaluate(q), kappa_low_codim_closed(1.2, 1, 2)) < 1e-10
    with pytest.raises(DomainError):
        evaluate(q, "closed")


def test_evaluate_rejects_unknown_or_uncovered():
    with pytest.raises(DomainError):
        evaluate(CorrelationQuery(2, 1, 1, 1.0), "magic")
    with pytest.raises(DomainError):
        evaluate(CorrelationQuery(2, 1, 2, 1.0), "wick")
    with pytest.raises(DomainError):
        evaluate(CorrelationQuery(2, 4, 5, 1.0), "closed")
