"""Limiting densities of {n : n^ell | C(2n,n)} for small ell.

Each density c_ell is f(1) for a delay differential equation
t f'(t) = -sum_k a_{k,ell} f(t - 1/k) with f = 1 near 0, solved by
piecewise Chebyshev marching at high precision.  The estimate carries a
node-doubling stability delta as its error certificate.
"""

from mpmath import mp

from cbcdiv.constants import compute_cl

for ell in (1, 2, 3):
    est = compute_cl(ell, precision=50, nodes=32, tol=1e-10)
    with mp.workdps(20):
        print(
            f"c_{ell} = {mp.nstr(est.value, 12)}   "
            f"(truncation k <= {est.k_max}, stability {mp.nstr(est.stability_delta, 2)})"
        )
    print(est.to_json())
