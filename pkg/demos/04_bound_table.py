"""
Certified truncation bounds for the half-moment series
======================================================

The volatility-swap strike is the half moment E[sqrt(RV)] of a truncated
Laguerre-type series.  A closed-form bound certifies the truncation error
after K + 1 terms.  This script prints the bound across mean-reversion
speeds and volatilities, showing how fast the series converges -- and how
conservative the certificate becomes when the chi-square component count
grows large.

Run:  python3 demos/04_bound_table.py
"""

from volswap import rvdist
from volswap.model import Schedule, SchwartzParams, return_moments

# moderate component count: the certificate is sharp enough to be useful
print("N = 52 observations, spectral chi-square weights")
print(f"{'kappa':>6} {'sigma':>6} | " + " ".join(f"{f'K={k}':>10}" for k in range(4)))
for kappa in (0.5, 1.5, 3.0):
    for sigma in (0.05, 0.08, 0.10):
        params = SchwartzParams(s0=2.0, mu=0.6, sigma=sigma, kappa=kappa)
        rm = return_moments(params, Schedule(t1=0.0, horizon=1.0, n_obs=52))
        bounds = []
        for K in range(4):
            cfg = rvdist.ExpansionConfig.defaults(rm, k_max=K)
            bounds.append(rvdist.truncation_bound(rm, cfg, 0.5, K))
        print(f"{kappa:6.1f} {sigma:6.2f} | " + " ".join(f"{b:10.3e}" for b in bounds))

# the bound certifies far smaller errors at larger K
params = SchwartzParams(s0=2.0, mu=0.6, sigma=0.08, kappa=1.5)
rm = return_moments(params, Schedule(t1=0.0, horizon=1.0, n_obs=52))
print("\nbound vs series length at kappa=1.5, sigma=0.08:")
for K in (3, 10, 25, 50):
    cfg = rvdist.ExpansionConfig.defaults(rm, k_max=K)
    print(f"  K={K:<3d} bound = {rvdist.truncation_bound(rm, cfg, 0.5, K):.3e}")

# caveat: the leading factor of the certificate grows explosively with the
# component count when the per-interval variance is small, so at daily
# sampling (N = 252) the certified bound is astronomically conservative even
# though the actual truncation error stays tiny
params = SchwartzParams(s0=2.0, mu=0.6, sigma=0.05, kappa=0.5)
rm = return_moments(params, Schedule(t1=0.0, horizon=1.0, n_obs=252),
                    independent_increments=True)
cfg = rvdist.ExpansionConfig.defaults(rm, k_max=3)
print(f"\nN=252, K=3 certified bound: {rvdist.truncation_bound(rm, cfg, 0.5, 3):.3e}"
      "   (vacuous: see README, 'Bound-table caveat')")
