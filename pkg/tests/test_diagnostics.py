import numpy as np
import numpy.testing as npt
import pytest

from addsel import (AssumptionError, BasisSpec, BudgetError, Dataset,
                    UniformDensity, bennett_truncation_bound, check_cprime,
                    chi2_tail_bounds, corollary_conditions, event_A_check,
                    event_E_check, rip_constant, sample_subsets,
                    selection_error_bound, subset_count_bound,
                    truncation_residual_norm_sq)
from addsel.basis import build_design_blocks
from addsel.diagnostics import _union_collection
from addsel.simulate import AdditiveModel, gen_design, DesignLaw


def test_chi2_tail_bounds_oracle():
    # [DERIVED] upper = exp(-x^2/(2(2d+2x))), lower = exp(-x^2/(4d))
    up, lo = chi2_tail_bounds(2, 2.0)
    npt.assert_allclose(up, np.exp(-4.0 / (2.0 * 8.0)))
    npt.assert_allclose(lo, np.exp(-4.0 / 8.0))
    assert chi2_tail_bounds(5, 0.0) == (1.0, 1.0)
    with pytest.raises(AssumptionError):
        chi2_tail_bounds(0, 1.0)


def test_chi2_tail_bounds_dominate_empirical_tails():
    # the closed forms really are upper bounds on the chi-square tails
    from scipy.stats import chi2
    for d in (1, 4, 16):
        for x in (0.5, 2.0, 8.0):
            up, lo = chi2_tail_bounds(d, x)
            assert chi2.sf(d + x, d) <= up + 1e-12
            assert chi2.cdf(d - x, d) <= lo + 1e-12


def test_bennett_truncation_bound_value():
    npt.assert_allclose(bennett_truncation_bound(100, 0.5, 2.0),
                        np.exp(-3.0 * 100 * 0.5 / 16.0))
    with pytest.raises(AssumptionError):
        bennett_truncation_bound(10, -1.0, 1.0)


def test_subset_count_bound_oracle():
    # [DERIVED] sum_{j<=2} C(8,j) = 1 + 8 + 28 = 37; bound = (e*8/2)^2
    exact, bound = subset_count_bound(8, 2)
    assert exact == 37
    npt.assert_allclose(bound, (np.e * 4.0) ** 2)
    assert exact <= bound


def test_check_cprime_boundary():
    assert check_cprime(0.5, 0.001)
    assert not check_cprime(0.5, 0.01)
    with pytest.raises(AssumptionError):
        check_cprime(1.0, 0.001)


def test_union_collection_dedup():
    unions = list(_union_collection(4, 1, (0,)))
    # J in {(),(0,),(1,),(2,),(3,)} -> unions {0},{0,1},{0,2},{0,3}
    assert sorted(unions) == [(0,), (0, 1), (0, 2), (0, 3)]


def test_sample_subsets_deterministic_and_covering():
    a = sample_subsets(10, 3, 50, seed=4)
    b = sample_subsets(10, 3, 50, seed=4)
    assert a == b
    assert all((j,) in a for j in range(10))
    assert max(len(J) for J in a) == 3


def test_rip_constant_concentrates_for_large_n():
    # empirical Grams of independent uniform designs concentrate near identity
    rng = np.random.default_rng(0)
    blocks = build_design_blocks(rng.random((400, 3)), BasisSpec.create(3, 4))
    delta = rip_constant(blocks, 2)
    assert 0.0 < delta < 0.5
    blocks_big = build_design_blocks(rng.random((8000, 3)), BasisSpec.create(3, 4))
    assert rip_constant(blocks_big, 2) < delta


def test_rip_constant_lower_bound_when_sampled():
    rng = np.random.default_rng(1)
    blocks = build_design_blocks(rng.random((100, 6)), BasisSpec.create(6, 3))
    full = rip_constant(blocks, 2)
    sampled = rip_constant(blocks, 2, subsets=sample_subsets(6, 2, 5, seed=0))
    assert sampled <= full + 1e-12


def test_rip_budget_error():
    rng = np.random.default_rng(1)
    blocks = build_design_blocks(rng.random((50, 30)), BasisSpec.create(30, 2))
    with pytest.raises(BudgetError):
        rip_constant(blocks, 3, budget=10)


def _model_with_tail(q=3, m_keep=3):
    # active component with energy beyond the truncation level
    theta = [np.zeros(0) for _ in range(q)]
    theta[0] = np.array([1.0, 0.0, 0.0, 0.0, 0.3, 0.0])  # phi_2 and phi_6 (freq 3)
    return AdditiveModel(q=q, J0=(0,), theta=theta, alpha=(2.0,) * q,
                         Kbound=(50.0,) * q)


def test_truncation_residual_uniform_oracle():
    # [DERIVED] with V keeping phi_2..phi_4 the residual is 0.3 phi_6; its
    # empirical norm converges to 0.09 under the uniform law
    model = _model_with_tail()
    spec = BasisSpec.create(3, 4)
    X = gen_design(DesignLaw(), 40000, 3, seed=2)
    resid = truncation_residual_norm_sq(X, model, spec, UniformDensity())
    npt.assert_allclose(resid, 0.09, rtol=0.1)


def test_truncation_residual_zero_when_fully_captured():
    model = _model_with_tail()
    spec = BasisSpec.create(3, 7)  # keeps phi_2..phi_7, covers everything
    X = gen_design(DesignLaw(), 500, 3, seed=3)
    npt.assert_allclose(truncation_residual_norm_sq(X, model, spec, UniformDensity()),
                        0.0, atol=1e-20)


def test_event_A_check_threshold():
    model = _model_with_tail()
    spec = BasisSpec.create(3, 4)
    X = gen_design(DesignLaw(), 2000, 3, seed=4)
    kappa = 1.09  # total component energy
    assert event_A_check(X, model, spec, UniformDensity(), 0.0, kappa, cprime=0.1)
    assert not event_A_check(X, model, spec, UniformDensity(), 0.0, kappa, cprime=1e-4)


def test_event_E_matches_rip_for_uniform_population():
    # under the uniform law the population Gram is the identity, so the event
    # deviation coincides with the RIP constant computed from A^T A
    rng = np.random.default_rng(5)
    X = rng.random((300, 4))
    Y = np.zeros(300)
    spec = BasisSpec.create(4, 3)
    blocks = build_design_blocks(X, spec)
    delta_full = rip_constant(blocks, 2, J0=(0,))
    holds, dev = event_E_check(Dataset(X, Y), spec, UniformDensity(), 2, (0,), 0.9)
    assert holds
    npt.assert_allclose(dev, delta_full, rtol=1e-8)


def test_selection_error_bound_monotone_in_n():
    kw = dict(sigma2=0.25, rho=0.0, kappa_l=[1.0, 2.0], d_l=[4, 8], s=2,
              qstar=2, q=8, delta=0.5, cprime=0.001)
    small = selection_error_bound(200, **kw)
    mid = selection_error_bound(5000, **kw)
    # the proof-level constants are conservative (factors like 2^10 in the
    # exponent), so only very large n drives the bound below any fixed level
    large = selection_error_bound(10 ** 6, **kw)
    assert large < mid < small
    assert large < 1e-6


def test_selection_error_bound_terms_sum():
    total, terms = selection_error_bound(
        1000, 0.25, 0.0, [1.0, 2.0], [4, 8], 2, 2, 8, 0.5, 0.001,
        p_event_c=0.01, return_terms=True)
    npt.assert_allclose(total, sum(terms.values()), rtol=1e-12)
    assert terms["p_event_c"] == 0.01


def test_selection_error_bound_validates_inputs():
    with pytest.raises(AssumptionError):
        selection_error_bound(100, 1.0, 1.0, [1.0], [2], 1, 1, 4, 0.5, 0.001)
    with pytest.raises(AssumptionError):
        selection_error_bound(100, 1.0, 0.0, [0.0], [2], 1, 1, 4, 0.5, 0.001)
    with pytest.raises(AssumptionError):
        # inadmissible (delta, cprime)
        selection_error_bound(100, 1.0, 0.0, [1.0], [2], 1, 1, 4, 0.5, 0.5)


def test_corollary_conditions_scale_with_n():
    kw = dict(sigma2=1.0, rho=0.0, kappa=1.0, kappa1=1.0, kappa_l=[1.0, 2.0],
              eps_s=0.0, d_l=[4, 8], s=2, qstar=2, q=16, alpha=2.0)
    tiny = corollary_conditions(n=5, **kw)
    big = corollary_conditions(n=10 ** 6, **kw)
    assert not all(tiny.values())
    assert all(big.values())
    assert set(big) == {"corollary2", "corollary3", "condition14", "nonparametric18"}
