"""High-precision reference values for the ETH/USDT two-provider walkthrough.

Independent of the C++ engine: solves the per-tick virtual-reserve equations
directly with 50-digit arithmetic. The printed values are frozen into
tests/pool_engine_test.cpp and tests/acceptance/acceptance_main.cpp.
"""
from mpmath import mp, mpf, sqrt

mp.dps = 50

def tick_price(t):
    return mpf("1.0001") ** t

spacing = 60
t_c = 73140
p = [tick_price(t_c + spacing * k) for k in (-1, 0, 1, 2, 3)]
p_a_lo, p_c, p1, p2, p_hi = p
capital = mpf(20000)
fee = mpf("0.01")

# provider A spans [p_a_lo, p_hi] around the current price
L_A = capital / (p_c * (1 / sqrt(p_c) - 1 / sqrt(p_hi)) + (sqrt(p_c) - sqrt(p_a_lo)))
# provider B spans [p1, p_hi], entirely above the current price
L_B = capital / (p_c * (1 / sqrt(p1) - 1 / sqrt(p_hi)))

usdt_A = L_A * (sqrt(p_c) - sqrt(p_a_lo))
eth_A = L_A * (1 / sqrt(p_c) - 1 / sqrt(p_hi))
eth_B = L_B * (1 / sqrt(p1) - 1 / sqrt(p_hi))

# stage 1: exhaust [p_c, p1) on L_A alone
x1 = L_A * (1 / sqrt(p_c) - 1 / sqrt(p1))
# (x_virtual)(y_virtual) = L^2 solved for the numeraire deposit
dy1 = L_A**2 / (L_A / sqrt(p1)) - L_A * sqrt(p_c)

# stage 2: remaining quantity against L_A + L_B above p1
L2 = L_A + L_B
x2 = 10 - x1
tick2_depth = L2 * (1 / sqrt(p1) - 1 / sqrt(p2))
virt_x = tick2_depth - x2 + L2 / sqrt(p2)
dy2 = L2**2 / virt_x - L2 * sqrt(p1)
p_end = (dy2 + L2 * sqrt(p1)) / virt_x

fee1 = fee * dy1
fee2 = fee * dy2
fee2_A = fee2 * L_A / L2
fee2_B = fee2 * L_B / L2

rows = [
    ("p_current", p_c), ("p_tick1_upper", p1), ("p_tick2_upper", p2),
    ("L_A", L_A), ("L_B", L_B), ("usdt_A", usdt_A), ("eth_A", eth_A), ("eth_B", eth_B),
    ("x1", x1), ("dy1", dy1), ("x2", x2), ("dy2", dy2), ("p_end", p_end),
    ("fee1", fee1), ("fee2", fee2), ("fee2_A", fee2_A), ("fee2_B", fee2_B),
]
for name, value in rows:
    print(f"{name:14s} {mp.nstr(value, 17)}")
