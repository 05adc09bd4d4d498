"""Golden values for the two equilibrium models at the figure defaults.

Works from the defining integrals (mpmath quadrature over the shock and
endowment densities) and plain root finding, not from the closed forms used
by the C++ library. Output is frozen into tests/unit/*_test.cpp.
"""
from mpmath import mp, mpf, sqrt, exp, log, quad, findroot, lambertw, e

mp.dps = 40

# ---- range model ----
v, eta, lam, ell, h, r, Gamma = 1, mpf("0.1"), 1, 1, 2, mpf("0.001"), 1
Delta = mpf("1.1") * (1 + r) * sqrt(1 + h)


def frac(u, f):
    # tau*/T with u = sqrt(1+delta)
    s = sqrt(1 + f)
    return min(1, (1 + r) / r * max(0, 1 - s / u))


def pay(x):
    # numeraire per unit of pool tokens for buying fraction x
    return v * (1 + r) * x / (x + (1 + r) * (1 - x))


def cuts(f):
    s = sqrt(1 + f)
    return [0, s, min(Delta, s * (1 + r)), Delta]


def yield_(f):
    return quad(lambda u: 2 * f * pay(frac(u, f)), cuts(f)) / Delta


def adverse(f):
    return quad(lambda u: v * u * u * frac(u, f) - (1 + f) * pay(frac(u, f)), cuts(f)) / Delta


def depletion(f):
    s = sqrt(1 + f)
    return 1 - s * (1 + r) / Delta


def gains(f):
    return quad(lambda u: (u * u - 1) * frac(u, f), cuts(f)) / Delta


def profit(q, f):
    return q * ((1 - eta) * yield_(f) - eta * adverse(f)) - eta * Gamma * depletion(f)


q_lo_h = eta * Gamma * depletion(h) / ((1 - eta) * yield_(h) - eta * adverse(h))
q_t = findroot(lambda q: profit(q, ell) - profit(q, h), (q_lo_h, 10), solver="bisect")


def supply_above(q):
    return quad(lambda x: x * exp(-x / lam) / lam, [q, mp.inf])


w = supply_above(q_t) / supply_above(q_lo_h)

print("range.Delta      ", mp.nstr(Delta, 17))
print("range.yield_l    ", mp.nstr(yield_(ell), 17))
print("range.yield_h    ", mp.nstr(yield_(h), 17))
print("range.adverse_l  ", mp.nstr(adverse(ell), 17))
print("range.adverse_h  ", mp.nstr(adverse(h), 17))
print("range.gains_l    ", mp.nstr(gains(ell), 17))
print("range.q_lo_h     ", mp.nstr(q_lo_h, 17))
print("range.q_t        ", mp.nstr(q_t, 17))
print("range.w_low      ", mp.nstr(w, 17))

# ---- cycle model ----
Q, theta, lam_c, ell_c, h_c, G = 3, mpf("0.66"), mpf("0.5"), mpf("0.75"), 1, 1
g, Theta = 1, 2
K = mpf(Q) / (Q - 1)


def pool_low(qt):
    return quad(lambda q: q * K / q**2, [qt, Q])


def d_low(L):
    # E[min(Exp(lam), L/theta)]
    return quad(lambda t: exp(-lam_c * t), [0, L / theta])


q_lo = max(G / h_c, 1)


def pi_diff(qt):
    return (qt * ell_c - G) / d_low(pool_low(qt)) - (qt * h_c - G) * lam_c


qt_c = findroot(pi_diff, (mpf("1.2"), mpf("2.9")), solver="bisect")
Ll = pool_low(qt_c)
Lh = quad(lambda q: q * K / q**2, [q_lo, qt_c])
print("cycle.q_t        ", mp.nstr(qt_c, 17))
print("cycle.L_low      ", mp.nstr(Ll, 17))
print("cycle.L_high     ", mp.nstr(Lh, 17))
print("cycle.w_low      ", mp.nstr(Ll / (Ll + Lh), 17))
print("cycle.d_low      ", mp.nstr(d_low(Ll), 17))


def single_is(f):
    a = G / f
    S = quad(lambda q: q * K / q**2, [max(a, 1), Q]) if a < Q else 0
    return f * S + g * (Theta - S)


fstar = findroot(lambda f: mp.diff(single_is, f), mpf("0.6"))
print("cycle.f_star     ", mp.nstr(fstar, 17))
print("cycle.f_star_W0  ", mp.nstr(g / lambertw(e * g * Q / G), 17))
print("cycle.is_min     ", mp.nstr(single_is(fstar), 17))
