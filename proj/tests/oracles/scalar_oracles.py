"""Independent oracles for the frozen expected values in the C++ unit tests.

Run with `python3 tests/oracles/scalar_oracles.py`; the printed values are
pasted into the corresponding tests.  Nothing here imports the C++ code.
"""
from itertools import product
from math import comb

import numpy as np
from mpmath import mp, mpf, tanh, log, exp
from scipy.integrate import solve_ivp

mp.dps = 40


def attention_example():
    return mpf("0.5") + mpf("0.1") * mpf("0.5") ** 2


def rhs_example():
    # lambda=1, omega=1, u0=1.25, K=0.25, gamma=0.5, alpha=0.2, z=0, b=2
    return tanh(-mpf("0.5") * 2)


def lemma_values():
    nu = tanh(mpf("5.7"))
    thr = log((1 + nu) / nu)
    beta = -exp(-1) + nu * (1 - exp(-1))
    thr_hetero = max(log((1 + nu) / nu), log((2 + nu) / nu) / 2)
    return nu, thr, beta, thr_hetero


def p_nash(n, beta, psi):
    return min(comb(q, s) * beta**s * (1 - psi) ** (q - s)
               for q in range(1, n + 1) for s in range(1, q + 1))


def integration_example():
    n = 10
    lam, om, u0, K, gam, al = 1.0, 1.0, 1.25, 0.25, 0.5, 0.2
    A = -np.ones((n, n))
    b = np.full(n, 2.0)

    def f(_t, z):
        social = A @ z - np.diag(A) * z
        return -lam * z + np.tanh(om * (u0 + K * z * z) * z + al * social - gam * b)

    sol = solve_ivp(f, (0.0, 0.1), np.zeros(n), method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[:, -1]


def nash_brute(profile):
    na = profile.count(1)
    nb = len(profile) - na
    for p in profile:
        if p == 1 and nb + 1 < na:
            return False
        if p == -1 and na + 1 < nb:
            return False
    return True


if __name__ == "__main__":
    print("attention(0.5, 0.1, 0.5) =", attention_example())
    print("rhs example =", rhs_example())
    nu, thr, beta, thr_h = lemma_values()
    print("nu =", nu)
    print("dtD threshold (lambda=1) =", thr)
    print("beta (dt_D=1) =", beta)
    print("dtD threshold (lambda in {1,2}) =", thr_h)
    print("p_N(2, 0.26, 0.9) =", p_nash(2, 0.26, 0.9))
    print("bound(10, 0.2, 0.052) =", 10 / 0.2 + 1 / 0.052)
    print("integration example z(0.1) =", repr(integration_example()[0]))
    counts = {n: sum(nash_brute(list(p)) for p in product([1, -1], repeat=n)) for n in range(2, 9)}
    print("nash profile counts N=2..8 =", counts)
