"""Concentration events, explicit tail bounds, and sample-size condition checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, exp, log, sqrt

import numpy as np

from .basis import BasisSpec, DesignBlocks, basis_matrix, build_design_blocks, full_block_gram
from .densities import Density
from .errors import AssumptionError, BudgetError
from .geometry import _inv_sqrt, count_subsets_up_to, subsets_up_to

DEFAULT_BUDGET = 10 ** 6


@dataclass
class DiagnosticsReport:
    delta_qstar: float = float("nan")
    event_E_holds: dict = field(default_factory=dict)
    event_A_holds: bool | None = None
    bound_terms: dict = field(default_factory=dict)
    conditions: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "delta_qstar": self.delta_qstar,
            "event_E_holds": {str(k): v for k, v in self.event_E_holds.items()},
            "event_A_holds": self.event_A_holds,
            "bound_terms": self.bound_terms,
            "conditions": self.conditions,
        }


def _union_collection(q, qstar, J0, subsets=None, budget=DEFAULT_BUDGET):
    """Deduplicated J cup J0 column sets over all candidate J."""
    J0 = tuple(sorted(J0))
    if subsets is None:
        count = count_subsets_up_to(q, qstar, include_empty=True)
        if count > budget:
            raise BudgetError(
                f"{count} candidate subsets exceed the budget {budget}; "
                "pass an explicit (sampled) subset collection",
                count=count, budget=budget,
            )
        subsets = subsets_up_to(q, qstar, include_empty=True)
    seen = set()
    for J in subsets:
        union = tuple(sorted(set(J) | set(J0)))
        if union and union not in seen:
            seen.add(union)
            yield union


def sample_subsets(q, qstar, n_samples, seed=0):
    """Deterministic subset collection: all singletons plus random larger subsets."""
    rng = np.random.default_rng(seed)
    out = [(j,) for j in range(q)]
    sizes = list(range(2, qstar + 1))
    if sizes:
        per_size = max(1, n_samples // len(sizes))
        for r in sizes:
            for _ in range(per_size):
                out.append(tuple(sorted(rng.choice(q, size=r, replace=False))))
    return sorted(set(out))


def rip_constant(blocks: DesignBlocks, qstar: int, J0=(), subsets=None,
                 budget=DEFAULT_BUDGET) -> float:
    """max over |J| <= qstar of the operator norm of A_{J u J0}^T A_{J u J0} - I.

    With an explicit ``subsets`` collection the result is the maximum over
    that collection only (a lower bound of the full constant).
    """
    delta = 0.0
    for union in _union_collection(blocks.q, qstar, J0, subsets, budget):
        G = blocks.gram(union)
        w = np.linalg.eigvalsh(G)
        delta = max(delta, float(max(w[-1] - 1.0, 1.0 - w[0])))
    return delta


def rip_constant_greedy(blocks: DesignBlocks, qstar: int, seed=0, restarts=8,
                        n_samples=2000) -> float:
    """Heuristic lower bound on the RIP constant via sampling plus swap ascent.

    Used when full enumeration is infeasible; the true constant is >= this.
    """
    q = blocks.q
    rng = np.random.default_rng(seed)

    def dev(J):
        w = np.linalg.eigvalsh(blocks.gram(J))
        return float(max(w[-1] - 1.0, 1.0 - w[0]))

    best = rip_constant(blocks, qstar,
                        subsets=sample_subsets(q, qstar, n_samples, seed=seed))
    for _ in range(restarts):
        J = list(rng.choice(q, size=qstar, replace=False))
        cur = dev(tuple(J))
        improved = True
        while improved:
            improved = False
            for pos in range(len(J)):
                for j in range(q):
                    if j in J:
                        continue
                    cand = J.copy()
                    cand[pos] = j
                    v = dev(tuple(sorted(cand)))
                    if v > cur:
                        cur, J = v, sorted(cand)
                        improved = True
        best = max(best, cur)
    return best


def event_E_from_grams(G_emp, G_pop, slices, qstar: int, J0, delta: float,
                       subsets=None, budget=DEFAULT_BUDGET):
    """(holds, max_deviation): whether all normalized empirical Grams on
    V_{J u J0} have eigenvalues in [1-delta, 1+delta]."""
    q = len(slices)
    worst = 0.0
    for union in _union_collection(q, qstar, J0, subsets, budget):
        c = np.concatenate([np.arange(slices[j].start, slices[j].stop) for j in union])
        W = _inv_sqrt(G_pop[np.ix_(c, c)], f"population Gram on {union}")
        w = np.linalg.eigvalsh(W @ G_emp[np.ix_(c, c)] @ W)
        worst = max(worst, float(max(w[-1] - 1.0, 1.0 - w[0])))
    return worst <= delta, worst


def event_E_check(dataset, spec: BasisSpec, density: Density, qstar: int, J0,
                  delta: float, subsets=None, budget=DEFAULT_BUDGET):
    """(holds, max_deviation): uniform two-sided norm equivalence over all
    candidate additive subspaces."""
    blocks = build_design_blocks(dataset.X, spec)
    A = blocks.concat(range(spec.q))
    G_emp = A.T @ A
    G_pop, slices = full_block_gram(spec, density)
    return event_E_from_grams(G_emp, G_pop, slices, qstar, J0, delta,
                              subsets, budget)


def truncation_residual_norm_sq(X, model, spec: BasisSpec, density: Density) -> float:
    """Empirical squared norm of f - sum_j Pi_{V_j} f_j at the sample rows."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    resid = np.zeros(n)
    for j in sorted(model.J0):
        theta = np.asarray(model.theta[j], dtype=float)
        full_ks = np.arange(2, len(theta) + 2)
        B = basis_matrix(full_ks, X[:, j])
        f_vals = B @ theta
        proj_coef = _component_projection_coef(theta, spec, density, j)
        v_vals = basis_matrix(spec.basis_indices(j), X[:, j]) @ proj_coef
        resid += f_vals - v_vals
    return float(resid @ resid) / n


def _component_projection_coef(theta, spec, density, j):
    """Coefficients of Pi_{V_j} f_j in the V_j basis (population projection)."""
    from .basis import QUAD_NODES_1D, _quad_nodes

    d = spec.dim(j)
    if d == 0:
        return np.zeros(0)
    if isinstance(density, Density) and density.c == 1.0 and not _has_table(density, j):
        # uniform marginal: the trig system is orthonormal, projection = truncation
        out = np.zeros(d)
        k = min(d, len(theta))
        out[:k] = theta[:k]
        return out
    t = _quad_nodes(QUAD_NODES_1D)
    p = density.marginal_pdf(j, t)
    BV = basis_matrix(spec.basis_indices(j), t)
    Bfull = basis_matrix(np.arange(2, len(theta) + 2), t)
    GV = (BV * p[:, None]).T @ BV / QUAD_NODES_1D
    cross = (BV * p[:, None]).T @ Bfull / QUAD_NODES_1D
    return np.linalg.solve(GV, cross @ theta)


def _has_table(density, j):
    tables = getattr(density, "tables", None)
    return bool(tables) and j in tables


def event_A_check(X, model, spec: BasisSpec, density: Density, rho: float,
                  kappa: float, cprime: float) -> bool:
    """Whether the truncation residual satisfies |f - v|_n^2 <= 2 c'(1-rho^2) kappa."""
    resid = truncation_residual_norm_sq(X, model, spec, density)
    return resid <= 2.0 * cprime * (1.0 - rho * rho) * kappa


def chi2_tail_bounds(d: int, x: float):
    """Closed-form (upper, lower) tail bounds for chi-square(d) deviations.

    upper bounds P(chi2 - d >= x), lower bounds P(chi2 - d <= -x).
    """
    if d < 1:
        raise AssumptionError(f"degrees of freedom must be >= 1, got {d}")
    if x < 0:
        raise AssumptionError(f"deviation must be >= 0, got {x}")
    upper = exp(-x * x / (2.0 * (2.0 * d + 2.0 * x))) if x > 0 else 1.0
    lower = exp(-x * x / (4.0 * d)) if x > 0 else 1.0
    return upper, lower


def bennett_truncation_bound(n: int, x: float, sup_norm_sq: float) -> float:
    """exp(-3 n x / (8 |f - v|_inf^2)) for the truncation-residual event."""
    if x <= 0 or sup_norm_sq <= 0:
        raise AssumptionError("x and sup_norm_sq must be positive")
    return exp(-3.0 * n * x / (8.0 * sup_norm_sq))


def subset_count_bound(q: int, qstar: int):
    """(exact, bound): sum_{j<=qstar} C(q,j) and its (e q / qstar)^qstar bound."""
    if not 1 <= qstar <= q:
        raise AssumptionError(f"need 1 <= qstar <= q, got qstar={qstar}, q={q}")
    exact = sum(comb(q, j) for j in range(qstar + 1))
    log_bound = qstar * (1.0 + log(q / qstar))
    bound = exp(log_bound) if log_bound < 700 else float("inf")
    return exact, bound


def check_cprime(delta: float, cprime: float) -> bool:
    """(2/3)(1 - sqrt(c'))^2 - 8 (1+delta)/(1-delta)^2 c' >= 1/2."""
    if not 0.0 < delta < 1.0 or not 0.0 < cprime < 1.0:
        raise AssumptionError("need 0 < delta < 1 and 0 < cprime < 1")
    lhs = (2.0 / 3.0) * (1.0 - sqrt(cprime)) ** 2
    lhs -= 8.0 * (1.0 + delta) / (1.0 - delta) ** 2 * cprime
    return lhs >= 0.5


def selection_error_bound(n, sigma2, rho, kappa_l, d_l, s, qstar, q, delta,
                          cprime, p_event_c=0.0, include_truncation=True,
                          return_terms=False):
    """Upper bound on P(J0 not within the selected set).

    Sums the proof-level exponential terms over the (l, m) grid of missed and
    spurious covariates, plus the truncation-residual term and a supplied
    estimate for the norm-equivalence failure probability.

    ``kappa_l[l-1]`` is the minimal squared norm of size-l partial sums;
    ``d_l[l-1]`` the largest additive dimension over subsets of size l.
    """
    kappa_l = np.asarray(kappa_l, dtype=float)
    d_l = np.asarray(d_l, dtype=float)
    if not 0.0 <= rho < 1.0:
        raise AssumptionError(f"rho must lie in [0,1), got {rho}")
    if np.any(kappa_l[:s] <= 0.0):
        raise AssumptionError("all kappa_l must be strictly positive")
    if len(d_l) < qstar:
        raise AssumptionError(f"d_l must cover sizes 1..{qstar}")
    if not check_cprime(delta, cprime):
        raise AssumptionError(
            f"(delta={delta}, cprime={cprime}) violates the c' feasibility condition"
        )
    c_delta = (1.0 - delta) ** 2 / (1.0 + delta)
    one_mr = 1.0 - rho * rho
    terms = {"p_event_c": float(p_event_c)}
    total = float(p_event_c)
    if include_truncation:
        trunc = exp(-3.0 * n / (16.0 * d_l[qstar - 1]))
        terms["truncation"] = trunc
        total += trunc
    chi_sum = gauss1_sum = gauss2_sum = 0.0
    for l in range(1, s + 1):
        kl = kappa_l[l - 1]
        d_eff = d_l[qstar - s + l - 1]
        signal = one_mr * kl
        chi = 2.0 * exp(
            -(1.0 / 32.0) * (c_delta ** 2) * (n ** 2) * signal ** 2
            / (8.0 * sigma2 ** 2 * d_eff + c_delta * sigma2 * n * signal)
        )
        g1 = exp(-(c_delta / 2.0 ** 10) * n * signal / sigma2)
        g2 = exp(-(c_delta ** 2 / (2.0 ** 14 * cprime)) * n * signal / sigma2)
        weight = comb(s, l) * sum(comb(q - s, m) for m in range(qstar - (s - l) + 1))
        chi_sum += weight * chi
        gauss1_sum += weight * g1
        gauss2_sum += weight * g2
    terms["chi_square"] = chi_sum
    terms["gaussian_projection"] = gauss1_sum
    terms["gaussian_truncation"] = gauss2_sum
    total += chi_sum + gauss1_sum + gauss2_sum
    if return_terms:
        return total, terms
    return total


def corollary_conditions(n, sigma2, rho, kappa, kappa1, kappa_l, eps_s, d_l,
                         s, qstar, q, alpha, c3=1.0):
    """Named sample-size conditions from the consistency corollaries."""
    d_l = np.asarray(d_l, dtype=float)
    kappa_l = np.asarray(kappa_l, dtype=float)
    one_mr = 1.0 - rho * rho
    d_qstar = d_l[qstar - 1]
    d_s = d_l[s - 1]
    d_1 = d_l[0]
    out = {}
    out["corollary2"] = max(
        sigma2 * sqrt(qstar * d_qstar * log(np.e * q / qstar)) / (one_mr * kappa),
        sigma2 * qstar * log(np.e * q / qstar) / (one_mr * kappa),
        d_qstar * log(q),
    ) <= c3 * n
    out["corollary3"] = max(
        sigma2 * sqrt(d_1 * log(q)) / (one_mr * (1.0 - eps_s) * kappa1),
        sigma2 * log(q) / (one_mr * (1.0 - eps_s) * kappa1),
        d_s * log(q),
    ) <= c3 * n
    cond14 = True
    for l in range(1, s + 1):
        cond14 &= max(
            sigma2 * sqrt(l * d_l[l - 1] * log(np.e * q / l)) / (one_mr * kappa_l[l - 1]),
            sigma2 * l * log(np.e * q / l) / (one_mr * kappa_l[l - 1]),
            d_s * log(q),
        ) <= c3 * n
    out["condition14"] = bool(cond14)
    out["nonparametric18"] = max(
        sigma2 * s ** (1.0 / (4.0 * alpha)) * sqrt(log(q))
        / kappa1 ** ((4.0 * alpha + 1.0) / (4.0 * alpha)),
        sigma2 * log(q) / kappa1,
        s ** ((2.0 * alpha + 1.0) / (2.0 * alpha)) * log(q) ** 4 / kappa1 ** (1.0 / (2.0 * alpha)),
    ) <= c3 * n
    return out
