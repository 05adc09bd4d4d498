#include "ammlab/cycle_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ammlab/numeric.hpp"

namespace ammlab::cycle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketEps = 1e-9;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double pareto_scale(double Q) { return Q / (Q - 1.0); }

}  // namespace

void CycleModelParams::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(Q) && Q > 1.0, "Q: endowment upper bound must exceed 1");
    require(finite(theta_rate) && theta_rate > 0.0, "theta_rate: small-trader flow must be positive");
    require(finite(lambda_rate) && lambda_rate > 0.0, "lambda_rate: large-trader rate must be positive");
    require(finite(ell) && ell >= 0.0, "ell: low fee must be nonnegative");
    require(finite(h) && h > ell, "h: high fee must exceed ell");
    require(finite(Gamma) && Gamma >= 0.0, "Gamma: gas cost must be nonnegative");
    require(finite(Delta_gft) && Delta_gft >= 0.0, "Delta_gft: gains from trade must be nonnegative");
    require(finite(Theta_big) && Theta_big > 0.0, "Theta_big: large-trader demand must be positive");
}

std::vector<std::string> CycleModelParams::assumption_violations() const {
    std::vector<std::string> out;
    if (!(Theta_big > total_supply(Q))) {
        out.push_back("Theta_big: must exceed total supply (Q/(Q-1)) log Q");
    }
    if (!(Q * ell - Gamma > 0.0)) {
        out.push_back("Gamma: Q*ell - Gamma must be positive for the low pool to attract liquidity");
    }
    return out;
}

double CycleModelParams::exponent() const {
    return lambda_rate / theta_rate * pareto_scale(Q);
}

double total_supply(double Q) {
    return pareto_scale(Q) * std::log(Q);
}

double supply_between(double a, double b, double Q) {
    a = std::clamp(a, 1.0, Q);
    b = std::clamp(b, 1.0, Q);
    if (b <= a) return 0.0;
    return pareto_scale(Q) * (std::log(b) - std::log(a));
}

double endowment_pdf(double q, double Q) {
    if (q < 1.0 || q > Q) return 0.0;
    return pareto_scale(Q) / (q * q);
}

PoolSizes pool_sizes(double q_t, double q_lo, double Q) {
    require(Q > 1.0, "Q must exceed 1");
    require(1.0 <= q_lo && q_lo <= q_t && q_t <= Q, "pool_sizes: need 1 <= q_lo <= q_t <= Q");
    const double k = pareto_scale(Q);
    return {k * (std::log(Q) - std::log(q_t)), k * (std::log(q_t) - std::log(q_lo))};
}

Durations cycle_durations(double L_low, const CycleModelParams& p) {
    require(L_low >= 0.0, "L_low must be nonnegative");
    Durations d;
    d.high = 1.0 / p.lambda_rate;
    d.low = -std::expm1(-L_low * p.lambda_rate / p.theta_rate) / p.lambda_rate;
    return d;
}

double f1(double q_t, const CycleModelParams& p) {
    return p.h * std::pow(q_t / p.Q, p.exponent()) - (p.h - p.ell);
}

double f2(double q_t, const CycleModelParams& p) {
    const double x = std::pow(q_t / p.Q, p.exponent());
    const double den = p.h * x - (p.h - p.ell);
    if (!(den > 0.0)) {
        return p.Gamma > 0.0 ? kInf : -kInf;
    }
    return p.Gamma * x / den - q_t;
}

std::optional<double> f1_root(const CycleModelParams& p) {
    // h (q/Q)^E = h - l  =>  q = Q ((h-l)/h)^(1/E)
    const double q = p.Q * std::pow((p.h - p.ell) / p.h, 1.0 / p.exponent());
    if (q >= 1.0 && q < p.Q) return q;
    return std::nullopt;
}

double participation_floor(const CycleModelParams& p) {
    return std::clamp(p.Gamma / p.h, 1.0, p.Q);
}

double profit_rate_low(double q, double q_t, const CycleModelParams& p) {
    const auto sizes = pool_sizes(q_t, 1.0, p.Q);
    const double d = cycle_durations(sizes.low, p).low;
    if (!(d > 0.0)) return -kInf;
    return (q * p.ell - p.Gamma) / d;
}

double profit_rate_high(double q, const CycleModelParams& p) {
    return (q * p.h - p.Gamma) * p.lambda_rate;
}

double f2_root_in(double lo, double hi, const CycleModelParams& p) {
    auto f = [&p](double q) { return f2(q, p); };
    return numeric::bisect(f, lo, hi, 0.0, 1e-15).root;
}

namespace {

void fill_sizes(CycleEquilibrium& eq, const CycleModelParams& p) {
    const auto sizes = pool_sizes(std::max(eq.q_t, eq.q_lo), eq.q_lo, p.Q);
    eq.L_low = sizes.low;
    eq.L_high = sizes.high;
    const auto d = cycle_durations(eq.L_low, p);
    eq.d_low = d.low;
    eq.d_high = d.high;
    eq.w_low = market_share_low_cycle(eq);
}

}  // namespace

CycleEquilibrium solve_cycle_equilibrium(const CycleModelParams& p) {
    p.validate();
    CycleEquilibrium eq;
    eq.q_lo = participation_floor(p);
    const double Q = p.Q;
    const double E = p.exponent();
    const double c1 = (p.h - p.ell) / p.h * std::pow(Q, E);

    // ii. f2(Q) = Gamma/l - Q > 0: no interior root
    if (p.Gamma > Q * p.ell) {
        eq.regime = CycleRegime::AllHigh;
        eq.q_t = Q;
        fill_sizes(eq, p);
        return eq;
    }
    if (p.Gamma == Q * p.ell) {
        eq.boundary_tie = true;
        eq.alternative_regime = CycleRegime::AllHigh;
    }

    double lo = 1.0;
    if (c1 > 1.0) {
        // f1 has its root q_r inside (1, Q); f2 is +inf just above it
        const double qr = *f1_root(p);
        lo = qr * (1.0 + kBracketEps);
        for (int i = 0; i < 60 && !(f2(lo, p) > 0.0); ++i) {
            lo = qr + 0.5 * (lo - qr);
        }
    } else {
        // f2 is continuous on [1, Q]
        const double Gh = p.Gamma / p.h;
        if (Gh < 1.0) {
            const double edge = 1.0 - c1;
            if (Gh < edge) {
                eq.regime = CycleRegime::AllLow;
                eq.q_t = eq.q_lo;
                fill_sizes(eq, p);
                return eq;
            }
            if (Gh == edge) {
                eq.boundary_tie = true;
                eq.alternative_regime = CycleRegime::AllLow;
            }
        } else {
            lo = std::min(Gh, Q);
        }
    }

    eq.regime = CycleRegime::Fragmented;
    if (f2(lo, p) <= 0.0) {
        eq.q_t = lo;  // root sits on the lower edge (tie cases)
    } else if (f2(Q, p) >= 0.0) {
        eq.q_t = Q;
    } else {
        eq.q_t = f2_root_in(lo, Q, p);
    }
    fill_sizes(eq, p);
    return eq;
}

double market_share_low_cycle(const CycleEquilibrium& eq) {
    // L_low / (L_low + L_high) = (log Q - log q_t) / (log Q - log q_lo)
    const double all = eq.L_low + eq.L_high;
    if (!(all > 0.0)) return 0.0;
    return eq.L_low / all;
}

std::string to_string(CycleRegime r) {
    switch (r) {
        case CycleRegime::AllLow: return "AllLow";
        case CycleRegime::AllHigh: return "AllHigh";
        case CycleRegime::Fragmented: return "Fragmented";
    }
    return "?";
}

// ==== implementation shortfall ====

double implementation_shortfall(std::span<const FeePool> menu, const CycleModelParams& p) {
    require(!menu.empty(), "fee menu must be nonempty");
    double fees = 0.0;
    double supply = 0.0;
    for (const auto& k : menu) {
        require(k.liquidity >= 0.0, "pool liquidity must be nonnegative");
        fees += k.fee * k.liquidity;
        supply += k.liquidity;
    }
    return fees + p.Delta_gft * (p.Theta_big - supply);
}

double single_pool_is(double f, const CycleModelParams& p) {
    require(f >= 0.0, "fee must be nonnegative");
    double s = 0.0;
    if (f > 0.0) {
        const double a = p.Gamma / f;
        if (a < p.Q) s = supply_between(std::max(a, 1.0), p.Q, p.Q);
    }
    const FeePool one{f, s};
    return implementation_shortfall(std::span(&one, 1), p);
}

double menu_is(double h, double ell, const CycleModelParams& p) {
    require(ell <= h, "menu_is: ell must not exceed h");
    if (ell == h) return single_pool_is(h, p);
    CycleModelParams q = p;
    q.h = h;
    q.ell = ell;
    const auto eq = solve_cycle_equilibrium(q);
    const FeePool pools[2] = {{ell, eq.L_low}, {h, eq.L_high}};
    return implementation_shortfall(pools, q);
}

OptimalFee optimal_single_fee(const CycleModelParams& p) {
    p.validate();
    OptimalFee out;
    auto is = [&p](double f) { return single_pool_is(f, p); };
    const double g = p.Delta_gft;
    if (p.Gamma == 0.0) {
        // every LP joins at any positive fee, so the fee is pure cost
        out.f_star = 0.0;
    } else {
        // below Gamma/Q nobody participates; above Gamma everyone does
        const double lo = p.Gamma / p.Q;
        const double hi = std::max(p.Gamma, lo * (1.0 + 1e-12));
        const auto m = numeric::golden_section_min(is, lo, hi, 1e-13 * hi);
        out.f_star = m.x;
        // polish on the sign of the derivative, which is monotone in f
        auto d = [&](double f) {
            const double a = p.Gamma / f;
            if (a >= p.Q || a <= 1.0) return numeric::central_difference(is, f, 1e-7 * f);
            return std::log(p.Q * f / p.Gamma) + 1.0 - g / f;
        };
        const double a_star = p.Gamma / out.f_star;
        if (a_star > 1.0 && a_star < p.Q) {
            const double l = std::max(lo, out.f_star * (1.0 - 1e-4));
            const double u = std::min(hi, out.f_star * (1.0 + 1e-4));
            if (d(l) < 0.0 && d(u) > 0.0) {
                out.f_star = numeric::bisect(d, l, u, 0.0, 1e-15).root;
            }
        }
    }
    out.is_min = is(out.f_star);
    const double step = std::max(1e-7, 1e-6 * out.f_star);
    out.dis_df = out.f_star > step ? numeric::central_difference(is, out.f_star, step) : 0.0;
    const double a = out.f_star > 0.0 ? p.Gamma / out.f_star : kInf;
    // golden section stops a hair inside a corner, so compare with slack
    out.interior = a > 1.0 + 1e-9 && a < p.Q * (1.0 - 1e-9);

    const double z = p.Gamma > 0.0 ? std::exp(1.0) * g * p.Q / p.Gamma : kInf;
    auto check = [&](const std::string& name, bool defined, double f) {
        LambertCheck c;
        c.branch = name;
        c.defined = defined && std::isfinite(f);
        if (c.defined) {
            c.f_star = f;
            const double denom = std::max(std::abs(out.f_star), 1e-300);
            c.rel_error = std::abs(f - out.f_star) / denom;
            c.matches = c.rel_error <= 1e-6;
        }
        out.lambert.push_back(c);
        if (c.matches && out.matching_branch.empty()) out.matching_branch = name;
    };
    if (std::isfinite(z)) {
        check("W0 reciprocal", true, g / numeric::lambert_w0(z));
        // reading W^{-1} as the functional inverse of W, i.e. x e^x
        check("W inverse", true, g * z * std::exp(std::min(z, 700.0)));
        // W_{-1} exists only on [-1/e, 0)
        const bool wm1_ok = z >= -std::exp(-1.0) && z < 0.0;
        check("W-1", wm1_ok, wm1_ok ? g / numeric::lambert_wm1(z) : 0.0);
    }
    return out;
}

}  // namespace ammlab::cycle
