#include <cmath>
#include <limits>

#include "viewrank/errors.hpp"
#include "viewrank/evaluation.hpp"

namespace viewrank {
namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kEpsilon = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw InputError("incomplete beta needs positive shape parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw InputError("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test(const PerQuery& a, const PerQuery& b) {
    std::vector<double> diffs;
    for (const auto& [qid, va] : a) {
        if (auto it = b.find(qid); it != b.end()) diffs.push_back(va - it->second);
    }
    TTestResult result;
    result.n = diffs.size();
    if (result.n < 2) {
        throw InputError("paired t-test needs at least two shared queries (found " +
                         std::to_string(result.n) + ")");
    }
    const double n = static_cast<double>(result.n);
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= n;
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    if (sd == 0.0) {
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            result.p = 0.0;
            result.degenerate_variance = true;
        }
        return result;
    }
    result.t = mean / (sd / std::sqrt(n));
    result.p = student_t_two_sided_p(result.t, n - 1.0);
    return result;
}

TTestResult compare_reports(const MetricReport& a, const MetricReport& b) {
    auto usable = [](const MetricReport& r, const MetricReport& other) {
        PerQuery out;
        for (const auto& [qid, v] : r.per_query) {
            if (!r.no_positive_judgments.contains(qid) && !other.no_positive_judgments.contains(qid)) {
                out.emplace(qid, v);
            }
        }
        return out;
    };
    return paired_t_test(usable(a, b), usable(b, a));
}

}  // namespace viewrank
