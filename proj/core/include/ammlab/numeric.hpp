#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace ammlab::numeric {

struct RootResult {
    double root = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
};

// Bracketed bisection. f(lo) and f(hi) must have opposite signs (or one is zero).
// Stops when the bracket is narrower than abs_tol + rel_tol*|mid|, or when the
// midpoint no longer splits the bracket in floating point.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double abs_tol, double rel_tol = 0.0, int max_iter = 2000);

// Grows hi geometrically (hi = lo + step, step *= factor) until f changes sign.
// Returns the bracket through lo/hi; throws if no sign change before max_hi.
void expand_bracket_up(const std::function<double(double)>& f, double& lo, double& hi,
                       double max_hi, double factor = 2.0);

struct MinResult {
    double x = std::numeric_limits<double>::quiet_NaN();
    double fx = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

// Golden-section search for a minimum of a unimodal f on [lo, hi].
MinResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol, int max_iter = 500);

// Lambert W, principal branch (x >= -1/e) and the lower branch W_{-1}
// (-1/e <= x < 0). Halley iteration from series / log initial guesses.
double lambert_w0(double x);
double lambert_wm1(double x);

double central_difference(const std::function<double(double)>& f, double x, double h);

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) { add(v); return *this; }
    void merge(const CompensatedSum& o) { add(o.sum_); add(o.comp_); }
    double value() const { return sum_ + comp_; }
private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Running mean / variance (Welford), mergeable across shards.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& o);
    long long count() const { return n_; }
    double mean() const { return n_ ? mean_ : std::numeric_limits<double>::quiet_NaN(); }
    double variance() const;   // sample variance, n-1
    double std_error() const;  // sqrt(variance / n)
    double sum() const { return n_ ? mean_ * static_cast<double>(n_) : 0.0; }
private:
    long long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Ratio estimator sum(x)/sum(y) over iid blocks, with a delta-method
// standard error.
class RatioStats {
public:
    void add(double x, double y);
    void merge(const RatioStats& o);
    long long count() const { return n_; }
    double sum_x() const { return sx_.value(); }
    double sum_y() const { return sy_.value(); }
    double ratio() const;
    double std_error() const;
private:
    long long n_ = 0;
    CompensatedSum sx_, sy_, sxx_, syy_, sxy_;
};

double percentile_sorted(std::span<const double> sorted, double q);

// Formats with a fixed number of significant digits; round-trippable at that precision.
std::string format_sig(double v, int digits = 12);

}  // namespace ammlab::numeric
