#include "narmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "narmine/error.hpp"

namespace narmine::stats {

namespace {

// B_2, B_4, ..., B_14
constexpr double kBernoulli[] = {1.0 / 6,   -1.0 / 30,    1.0 / 42, -1.0 / 30,
                                 5.0 / 66, -691.0 / 2730, 7.0 / 6};

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double hurwitz_zeta(double s, double a) {
    if (s <= 1.0) throw Error("hurwitz_zeta requires s > 1");
    if (a <= 0.0) throw Error("hurwitz_zeta requires a > 0");
    // Shift a upward so the Euler-Maclaurin tail converges fast.
    double sum = 0.0;
    double aa = a;
    while (aa < 12.0) {
        sum += std::pow(aa, -s);
        aa += 1.0;
    }
    const double inv = 1.0 / aa;
    sum += std::pow(aa, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(aa, -s);
    // Correction terms: B_{2j}/(2j)! * s(s+1)...(s+2j-2) * aa^{-s-2j+1}
    double rising = s;                       // (s)_{2j-1}
    double factor = std::pow(aa, -s - 1.0);  // aa^{-s-2j+1}
    double fact = 2.0;                       // (2j)!
    for (int j = 0; j < 7; ++j) {
        double term = kBernoulli[j] / fact * rising * factor;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        factor *= inv * inv;
        fact *= (2 * j + 3) * (2 * j + 4);
    }
    return sum;
}

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return gamma_q(dof / 2.0, x / 2.0);
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    p = std::min(std::max(p, 1e-300), 1.0 - 1e-16);
    if (p == 0.5) return 0.0;
    // Bracketed Newton on the CDF. The bracket [-40, 40] covers all
    // representable tail probabilities.
    double lo = -40.0, hi = 40.0;
    double x = 0.0;
    // Crude initial guess that has the right tail growth.
    double q = std::min(p, 1.0 - p);
    double r = std::sqrt(-2.0 * std::log(q));
    x = (p < 0.5) ? -r : r;
    for (int it = 0; it < 100; ++it) {
        double f = normal_cdf(x) - p;
        if (f > 0.0) hi = x;
        else lo = x;
        double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        double step = (pdf > 0.0) ? f / pdf : 0.0;
        double nx = x - step;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::fabs(nx - x) < 1e-15 * (1.0 + std::fabs(x))) return nx;
        x = nx;
    }
    return x;
}

double kolmogorov_sf(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double ks_uniform_pvalue(std::vector<double> values) {
    if (values.empty()) throw Error("ks_uniform_pvalue: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(values[i] - lo, hi - values[i]));
    }
    double en = std::sqrt(n);
    return kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("pearson: vectors must have equal size >= 2");
    Eigen::VectorXd xc = x.array() - x.mean();
    Eigen::VectorXd yc = y.array() - y.mean();
    double sxx = xc.squaredNorm();
    double syy = yc.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return xc.dot(yc) / std::sqrt(sxx * syy);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw Error("quantile_sorted: empty sample");
    if (sorted.size() == 1) return sorted[0];
    p = std::min(std::max(p, 0.0), 1.0);
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double brent_maximize(const std::function<double(double)>& f, double lo,
                      double hi, double tol, int max_iter) {
    // Brent minimization of -f.
    const double golden = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = -f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double xm = 0.5 * (a + b);
        double tol1 = tol * std::fabs(x) + 1e-12;
        double tol2 = 2.0 * tol1;
        if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::fabs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double pn = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) pn = -pn;
            q = std::fabs(q);
            double etemp = e;
            e = d;
            if (std::fabs(pn) < std::fabs(0.5 * q * etemp) && pn > q * (a - x) &&
                pn < q * (b - x)) {
                parabolic = true;
                d = pn / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = golden * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + ((d >= 0) ? tol1 : -tol1);
        double fu = -f(u);
        if (fu <= fx) {
            if (u >= x) a = x;
            else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u;
            else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u;
                fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return x;
}

}  // namespace narmine::stats
