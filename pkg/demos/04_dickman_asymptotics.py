"""How c_ell tracks the Dickman function as ell grows.

c_ell ~ rho(u*) up to a sub-polynomial prefactor, with
u* = 2l+1 - log(2l log 2l) - loglog(2l)/log(2l).  The prefactor's
exponent grows like log^2(l)/sqrt(l), so the raw ratio keeps drifting for
small l; what shrinks is its share of log c_ell itself.
"""

from mpmath import mp

from cbcdiv.constants import asymptotic_cl, compute_cl
from cbcdiv.specfun import rho

with mp.workdps(30):
    print("rho(2) =", mp.nstr(rho(mp.mpf(2)), 20), " (exactly 1 - log 2)")

for ell in (2, 4):
    est = compute_cl(ell, precision=50, nodes=32, tol=1e-8)
    asym = asymptotic_cl(ell, precision=30)
    with mp.workdps(20):
        logr = abs(mp.log(est.value / asym.value))
        share = logr / abs(mp.log(est.value))
        print(
            f"ell={ell}: c_ell={mp.nstr(est.value, 8)}  "
            f"rho(u*)={mp.nstr(asym.value, 8)}  "
            f"|log ratio|={mp.nstr(logr, 4)}  share of |log c|={mp.nstr(share, 3)}"
        )
