#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

namespace narmine::stats {

// Hurwitz zeta sum_{k>=0} (a+k)^(-s) for s > 1, a > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double a);

// Regularized incomplete gamma functions.
double gamma_p(double a, double x);  // P(a,x)
double gamma_q(double a, double x);  // Q(a,x) = 1 - P(a,x)

double chi_square_sf(double x, double dof);

double logistic(double x);  // 1 / (1 + exp(-x)), stable for large |x|

double normal_cdf(double x);
double normal_sf(double x);
// Inverse of normal_cdf; p clamped to [1e-300, 1-1e-16].
double normal_quantile(double p);

// Survival function of the Kolmogorov distribution, Q_KS(lambda).
double kolmogorov_sf(double lambda);

// One-sample KS test of values against U(0,1); returns p-value
// (asymptotic with Stephens' small-sample correction).
double ks_uniform_pvalue(std::vector<double> values);

// Pearson correlation; NaN when either vector has zero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Quantile with linear interpolation between order statistics (R type 7).
// `sorted` must be ascending and non-empty.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Maximizes f on [lo, hi] by Brent's method; returns argmax.
double brent_maximize(const std::function<double(double)>& f, double lo,
                      double hi, double tol = 1e-10, int max_iter = 200);

}  // namespace narmine::stats
