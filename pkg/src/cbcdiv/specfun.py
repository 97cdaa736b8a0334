"""Special functions for the density computations.

Arbitrary precision sits on mpmath's mpf/mpc scalar types; every public
entry point takes an explicit decimal precision.  Provided here:

  * E1 (principal branch, dual evaluation paths), Ein (entire),
  * the saddle parameter xi(u) solving e^xi = 1 + u*xi,
  * the Dickman function via Chebyshev panels marched through the delay
    equation -u rho'(u) = rho(u-1), and its saddle-point approximation,
  * the binomial weights a_{k,l} = 2^(1-k) C(k-2, l-1) with tail
    truncation bounds.

The Chebyshev fit/antiderivative helpers are shared with the density
engine in constants.py, which marches a closely related delay equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from mpmath import mp, mpc, mpf

# ---------------------------------------------------------------------------
# Chebyshev panel helpers (Lobatto grid, degree-N interpolation)


def cheb_nodes(N: int):
    """Chebyshev-Lobatto points cos(pi*j/N), j = 0..N, descending from 1."""
    return [mp.cos(mp.pi * j / N) for j in range(N + 1)]


def cheb_fit(vals):
    """Chebyshev coefficients of the interpolant through values on the
    Lobatto grid (same ordering as cheb_nodes)."""
    N = len(vals) - 1
    half = mpf(1) / 2
    cs = []
    for j in range(N + 1):
        s = mpf(0)
        for m in range(N + 1):
            w = half if (m == 0 or m == N) else mpf(1)
            s += w * vals[m] * mp.cos(mp.pi * j * m / N)
        cs.append(s * 2 / N)
    cs[0] /= 2
    cs[N] /= 2
    return cs


def cheb_eval(coeffs, x):
    """Clenshaw evaluation of a Chebyshev series at x in [-1, 1]."""
    b0 = b1 = mpf(0)
    for cj in reversed(coeffs[1:]):
        b0, b1 = 2 * x * b0 - b1 + cj, b0
    return coeffs[0] + x * b0 - b1


def cheb_antideriv(coeffs):
    """Coefficients of the antiderivative, normalized to vanish at x = -1."""
    n = len(coeffs) - 1
    C = [mpf(0)] * (n + 2)
    C[1] = coeffs[0] - (coeffs[2] / 2 if n >= 2 else mpf(0))
    for j in range(2, n + 1):
        C[j] = (coeffs[j - 1] - (coeffs[j + 1] if j + 1 <= n else mpf(0))) / (2 * j)
    C[n + 1] = coeffs[n] / (2 * (n + 1))
    v = mpf(0)
    for j in range(1, n + 2):
        v += C[j] * (-1 if j % 2 else 1)
    C[0] = -v
    return C


# ---------------------------------------------------------------------------
# E1 and Ein


def _e1_series(z, precision: int):
    # -gamma - log z + sum (-1)^(k+1) z^k / (k k!); alternating cancellation
    # costs about 0.44*|z| digits, padded below
    guard = int(mpf("0.45") * abs(z)) + 10
    with mp.workdps(precision + guard):
        total = -mp.euler - mp.log(z)
        term = mpc(1)
        k = 1
        eps = mpf(10) ** (-(precision + guard))
        while True:
            term *= z / k
            add = term / k if k % 2 else -term / k
            total += add
            if abs(term) < eps and k > abs(z):
                break
            k += 1
    return +total


def _e1_lentz(z, precision: int):
    # continued fraction E1(z) = e^-z / (z + 1/(1 + 1/(z + 2/(1 + 2/(z+...)))))
    # evaluated by the modified Lentz algorithm
    with mp.workdps(precision + 10):
        tiny = mpf(10) ** (-(precision + 30))
        eps = mpf(10) ** (-(precision + 5))
        f = z if z != 0 else tiny
        C = f
        D = mpc(0)
        n = 1
        while True:
            # terms alternate: a = n//2 numerators against b = z or 1
            a = mpf((n + 1) // 2)
            b = z if n % 2 == 0 else mpf(1)
            if n == 1:
                a = mpf(1)
            D = b + a * D
            if D == 0:
                D = tiny
            C = b + a / C
            if C == 0:
                C = tiny
            D = 1 / D
            delta = C * D
            f *= delta
            if abs(delta - 1) < eps:
                break
            n += 1
            if n > 100000:
                raise ArithmeticError("continued fraction for E1 did not converge")
        return +(mp.exp(-z) / f)


def e1(z, precision: int = 50):
    """Principal-branch exponential integral E1(z), z off (-inf, 0]."""
    z = mpc(z) if (isinstance(z, complex) or isinstance(z, mpc)) else mpf(z)
    if z == 0:
        raise ZeroDivisionError("E1 has a logarithmic singularity at 0")
    if isinstance(z, mpf) and z < 0:
        raise ValueError("E1 on the negative real axis (branch cut) is unsupported")
    r = abs(z)
    if r <= max(4, precision / 3):
        out = _e1_series(z, precision)
    else:
        out = _e1_lentz(z, precision)
    if isinstance(z, mpf):
        return out.real if isinstance(out, mpc) else out
    return out


def ein(s, precision: int = 50):
    """Entire exponential integral Ein(s) = gamma + log s + E1(s)."""
    s = mpc(s) if (isinstance(s, complex) or isinstance(s, mpc)) else mpf(s)
    if s == 0:
        return mpf(0)
    guard = int(mpf("0.45") * abs(s)) + 10
    with mp.workdps(precision + guard):
        total = mpc(0) if isinstance(s, mpc) else mpf(0)
        term = mpc(1) if isinstance(s, mpc) else mpf(1)
        eps = mpf(10) ** (-(precision + guard))
        k = 1
        while True:
            term *= s / k
            total += term / k if k % 2 else -term / k
            if abs(term) < eps and k > abs(s):
                break
            k += 1
    return +total


# ---------------------------------------------------------------------------
# xi(u): positive solution of e^xi = 1 + u xi


def xi(u, precision: int = 50):
    if u < 1:
        raise ValueError(f"xi needs u >= 1, got {u}")
    with mp.workdps(precision + 10):
        u = mpf(u)
        if u == 1:
            return mpf(0)
        x = mp.log(u * mp.log(u)) if u >= 3 else mpf(1) / 2
        lo, hi = mpf(10) ** -9, 2 * mp.log(u * mp.log(u) + 2)
        eps = mpf(10) ** (-(precision + 5))
        for _ in range(200):
            g = mp.exp(x) - 1 - u * x
            dg = mp.exp(x) - u
            step = g / dg if dg != 0 else mpf(1)
            nxt = x - step
            if not (lo <= nxt <= hi):
                # bisection fallback keeps the bracket
                glo = mp.exp(lo) - 1 - u * lo
                nxt = (lo + hi) / 2
                gm = mp.exp(nxt) - 1 - u * nxt
                if (glo < 0) == (gm < 0):
                    lo = nxt
                else:
                    hi = nxt
            if abs(nxt - x) < eps * max(1, abs(x)):
                x = nxt
                break
            x = nxt
        return +x


# ---------------------------------------------------------------------------
# Dickman rho


@dataclass
class DickmanTable:
    u_max: int
    degree: int
    tolerance: float
    precision: int
    work_precision: int
    panels: list  # (lo, hi, coeffs) per unit interval

    def to_csv(self, step: float = 0.5) -> str:
        lines = ["u,rho"]
        u = mpf(0)
        while u <= self.u_max:
            lines.append(f"{mp.nstr(u, 6)},{mp.nstr(rho(u, self), 17)}")
            u += mpf(step)
        return "\n".join(lines) + "\n"


def build_dickman_table(
    u_max: int = 64, degree: int = 16, tolerance: float = 1e-12, precision: int = 40
) -> DickmanTable:
    """March rho(u) = rho(j) - int_j^u rho(t-1)/t dt one unit interval at a
    time, each interval holding a degree-`degree` Chebyshev interpolant of
    rho with the memory integral done by Chebyshev (Clenshaw-Curtis) weights.

    Marching loses about log10(rho(j)/rho(j+1)) digits per interval to the
    subtraction rho(j) - integral, roughly 2*u_max digits in total, so the
    internal precision is padded accordingly.
    """
    work = precision + 2 * u_max
    with mp.workdps(work):
        xs = cheb_nodes(degree)
        panels = [(mpf(0), mpf(1), [mpf(1)] + [mpf(0)] * degree)]
        fprev = mpf(1)

        def rho_local(t):
            if t <= 1:
                return mpf(1)
            j = min(int(mp.floor(t)), len(panels) - 1)
            lo, hi, c = panels[j]
            return cheb_eval(c, (2 * t - lo - hi) / (hi - lo))

        for j in range(1, u_max):
            lo, hi = mpf(j), mpf(j + 1)
            dvals = []
            for x in xs:
                t = (lo + hi) / 2 + x * (hi - lo) / 2
                dvals.append(-rho_local(t - 1) / t)
            C = cheb_antideriv(cheb_fit(dvals))
            scale = (hi - lo) / 2
            Cc = [cj * scale for cj in C]
            Cc[0] += fprev
            panels.append((lo, hi, Cc))
            fprev = cheb_eval(Cc, mpf(1))
        return DickmanTable(
            u_max=u_max,
            degree=degree,
            tolerance=tolerance,
            precision=precision,
            work_precision=work,
            panels=panels,
        )


_default_table: DickmanTable | None = None


def default_dickman_table() -> DickmanTable:
    global _default_table
    if _default_table is None:
        _default_table = build_dickman_table()
    return _default_table


def rho(u, table: DickmanTable | None = None):
    """Dickman rho(u) from a marched table."""
    if table is None:
        table = default_dickman_table()
    with mp.workdps(table.work_precision):
        u = mpf(u)
        if u < 0:
            raise ValueError(f"rho needs u >= 0, got {u}")
        if u <= 1:
            return mpf(1)
        if u > table.u_max:
            raise ValueError(f"u = {u} beyond table u_max = {table.u_max}")
        j = min(int(mp.floor(u)), table.u_max - 1)
        lo, hi, c = table.panels[j]
        return +cheb_eval(c, (2 * u - lo - hi) / (hi - lo))


def rho_saddle(u, precision: int = 50):
    """Saddle-point approximation of rho(u), exact to a 1 + O(1/u) factor."""
    if u < 2:
        raise ValueError(f"rho_saddle needs u >= 2, got {u}")
    with mp.workdps(precision + 10):
        u = mpf(u)
        x = xi(u, precision)
        pref = mp.sqrt(x / (2 * mp.pi * (u * (x - 1) + 1)))
        return +(pref * mp.exp(mp.euler - u * x - ein(-x, precision)))


# ---------------------------------------------------------------------------
# binomial weights a_{k,l}


def weight(k: int, ell: int, precision: int = 50):
    """a_{k,l} = 2^(1-k) * C(k-2, l-1), exact rational at working precision."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if k <= ell:
        raise ValueError(f"k must exceed ell, got k={k}, ell={ell}")
    with mp.workdps(precision):
        return +(mpf(comb(k - 2, ell - 1)) * mpf(2) ** (1 - k))


def truncation_bound(ell: int, tol) -> int:
    """Smallest k_max (>= 2*ell) whose Hoeffding-style tail bound
    exp(-(k-2l)^2 / 2k) certifies sum_{k > k_max} a_{k,l} < tol, with a
    hundredfold safety margin; floored at 200 for tol <= 1e-50, ell <= 6."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    tol = mpf(tol)
    if not 0 < tol < 1:
        raise ValueError(f"tol must be in (0,1), got {tol}")
    target = -mp.log(tol / 100)
    k = 2 * ell
    while (k - 2 * ell) ** 2 < 2 * k * target:
        k += 1
    if tol <= mpf(10) ** -50 and ell <= 6:
        k = max(k, 200)
    return k
