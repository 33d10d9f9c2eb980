"""How correlated covariates bend the geometry of additive subspaces.

Walks through the population-level constants that govern when variable
selection can work: the minimal angle between disjoint groups of component
spaces, the eigenvalue spread of normalized Grams, the signal strengths
kappa_l, and the sup-norm ratio of the function system.
"""

import numpy as np

from addsel import (BasisSpec, GaussianCopulaDensity, UniformDensity,
                    geometry_report, min_angle_cos, population_gram)
from addsel.simulate import AdditiveModel


def model_with_energies(q, J0, energies):
    theta = [np.zeros(0) for _ in range(q)]
    for j, e in zip(J0, energies):
        theta[j] = np.array([np.sqrt(e), 0.0])
    return AdditiveModel(q=q, J0=tuple(J0), theta=theta,
                         alpha=(2.0,) * q, Kbound=(40.0,) * q)


def main():
    q, qstar = 4, 2
    spec = BasisSpec.create(q, 5)
    model = model_with_energies(q, (0, 2), (1.0, 2.25))

    print("=== independent uniform covariates ===")
    rep = geometry_report(spec, UniformDensity(), qstar, model=model, grid_size=256)
    print(f"rho_qstar          = {rep.rho_qstar:.3e}  (subspaces orthogonal)")
    print(f"eps_2qstar         = {rep.eps_2qstar:.3e}")
    print(f"kappa_l            = {np.round(rep.kappa_l, 3)}")
    print(f"phi_2qstar         = {rep.phi_2qstar:.4f}  "
          "(paired cos/sin frequencies give exactly 1)")

    print("\n=== equicorrelated Gaussian copula, increasing dependence ===")
    print(f"{'r':>5} {'rho':>8} {'eps':>8} {'kappa':>8}")
    for r in (0.2, 0.4, 0.6, 0.8):
        dens = GaussianCopulaDensity(r=r)
        rep = geometry_report(spec, dens, qstar, model=model, grid_size=128)
        print(f"{r:5.1f} {rep.rho_qstar:8.4f} {rep.eps_2qstar:8.4f} {rep.kappa:8.4f}")
    print("dependence shrinks angles (rho -> 1) and can erode the smallest")
    print("signal kappa; both enter the selection guarantees as (1 - rho^2) kappa.")

    print("\n=== the angle is a worst case over functions ===")
    dens = GaussianCopulaDensity(r=0.6)
    G = population_gram(spec, dens, [0, 1])
    d = spec.dim(0)
    rho = min_angle_cos(G[:d, :d], G[d:, d:], G[:d, d:])
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(2000):
        a = rng.standard_normal(d)
        b = rng.standard_normal(d)
        n1 = a @ G[:d, :d] @ a
        n2 = b @ G[d:, d:] @ b
        worst = max(worst, abs(a @ G[:d, d:] @ b) / np.sqrt(n1 * n2))
    print(f"rho (whitened SVD)          = {rho:.4f}")
    print(f"best of 2000 random cosines = {worst:.4f}  (never exceeds rho)")


if __name__ == "__main__":
    main()
