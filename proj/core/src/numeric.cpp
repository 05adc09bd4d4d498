#include "ammlab/numeric.hpp"

#include <algorithm>
#include <cstdio>

namespace ammlab::numeric {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double abs_tol, double rel_tol, int max_iter) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("bisect: lo must not exceed hi");
    }
    double flo = f(lo);
    double fhi = f(hi);
    RootResult out;
    if (flo == 0.0) { out.root = lo; out.converged = true; return out; }
    if (fhi == 0.0) { out.root = hi; out.converged = true; return out; }
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw std::invalid_argument("bisect: f(lo) and f(hi) have the same sign");
    }
    for (int it = 0; it < max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        out.iterations = it + 1;
        if (mid <= lo || mid >= hi) {
            break;  // bracket is one ulp wide
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            out.root = mid;
            out.converged = true;
            return out;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= abs_tol + rel_tol * std::abs(mid)) {
            out.converged = true;
            break;
        }
    }
    if (hi - lo <= abs_tol + rel_tol * std::abs(lo) ||
        std::nextafter(lo, hi) >= hi) {
        out.converged = true;
    }
    out.root = lo + 0.5 * (hi - lo);
    return out;
}

void expand_bracket_up(const std::function<double(double)>& f, double& lo, double& hi,
                       double max_hi, double factor) {
    const double flo = f(lo);
    if (flo == 0.0) {
        hi = lo;
        return;
    }
    double step = hi - lo;
    if (!(step > 0.0)) {
        step = std::max(1e-12, std::abs(lo) * 1e-6);
        hi = lo + step;
    }
    while (true) {
        const double fhi = f(hi);
        if (fhi == 0.0 || std::signbit(fhi) != std::signbit(flo)) {
            return;
        }
        if (hi >= max_hi) {
            throw std::runtime_error("expand_bracket_up: no sign change below the search limit");
        }
        lo = hi;
        step *= factor;
        hi = std::min(max_hi, lo + step);
    }
}

MinResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol, int max_iter) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    MinResult out;
    int it = 0;
    for (; it < max_iter && (b - a) > x_tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    out.iterations = it;
    if (fc <= fd) {
        out.x = c;
        out.fx = fc;
    } else {
        out.x = d;
        out.fx = fd;
    }
    return out;
}

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;

double halley(double x, double w) {
    for (int i = 0; i < 64; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
            break;
        }
    }
    return w;
}

}  // namespace

double lambert_w0(double x) {
    if (std::isnan(x) || x < -kInvE) {
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (x == -kInvE) return -1.0;
    if (std::isinf(x)) return x;
    double w;
    if (x < -0.3) {
        // branch-point series in p = sqrt(2(e x + 1))
        const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
        w = w * (1.0 - std::log1p(w) / (2.0 + w));
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    return halley(x, w);
}

double lambert_wm1(double x) {
    if (std::isnan(x) || x < -kInvE || x >= 0.0) {
        throw std::domain_error("lambert_wm1: argument outside [-1/e, 0)");
    }
    if (x == -kInvE) return -1.0;
    double w;
    if (x < -0.25) {
        const double p = -std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        const double l1 = std::log(-x);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }
    return halley(x, w);
}

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

void RunningStats::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) { *this = o; return; }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

double RunningStats::variance() const {
    if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
    return m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::std_error() const {
    if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(variance() / static_cast<double>(n_));
}

void RatioStats::add(double x, double y) {
    ++n_;
    sx_ += x;
    sy_ += y;
    sxx_ += x * x;
    syy_ += y * y;
    sxy_ += x * y;
}

void RatioStats::merge(const RatioStats& o) {
    n_ += o.n_;
    sx_.merge(o.sx_);
    sy_.merge(o.sy_);
    sxx_.merge(o.sxx_);
    syy_.merge(o.syy_);
    sxy_.merge(o.sxy_);
}

double RatioStats::ratio() const {
    const double y = sy_.value();
    return y != 0.0 ? sx_.value() / y : std::numeric_limits<double>::quiet_NaN();
}

double RatioStats::std_error() const {
    if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
    const double r = ratio();
    const double n = static_cast<double>(n_);
    const double ybar = sy_.value() / n;
    // sum of squared residuals x - r y
    const double ss = std::max(0.0, sxx_.value() - 2.0 * r * sxy_.value() + r * r * syy_.value());
    return std::sqrt(ss / (n * (n - 1.0))) / std::abs(ybar);
}

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw std::invalid_argument("percentile_sorted: empty input");
    }
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

std::string format_sig(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace ammlab::numeric
