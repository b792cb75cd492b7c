#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace narmine::ordinal {

struct Observation {
    double x = 0.0;
    int y = 1;  // ordinal category in 1..K
};

// Cumulative-logit model logit(P(Y <= j | x)) = alpha_j - beta * x.
// Positive beta moves probability mass toward higher categories.
struct PomFit {
    int k = 0;                       // category count
    std::int64_t n = 0;              // sample size
    std::vector<double> intercepts;  // strictly ascending, size k-1
    double slope = 0.0;
    std::vector<double> intercept_se;
    double slope_se = 0.0;
    std::vector<double> intercept_t;
    double slope_t = 0.0;
    std::vector<double> intercept_p;
    double slope_p = 0.0;
    double log_likelihood = 0.0;
    int iterations = 0;
    Eigen::MatrixXd covariance;  // over (alpha_1..alpha_{k-1}, beta)
};

struct FitOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-8;
};

PomFit fit_pom(const std::vector<Observation>& data, int k, const FitOptions& opts = {});

struct OddsRatioReport {
    double or_value = 1.0;
    double ci_low = 1.0;
    double ci_high = 1.0;
};

OddsRatioReport odds_ratio(const PomFit& fit);

struct Prediction {
    std::vector<double> probabilities;  // size k, sums to 1
    int category = 1;                   // argmax; ties go to the lower category
};

Prediction predict_category(const PomFit& fit, double x);

// delta = 1 - sum |predicted - actual| / (n (K-1)), in [0, 1].
double absolute_distance_coefficient(const std::vector<int>& predicted,
                                     const std::vector<int>& actual, int k);

struct Diagnostics {
    double deviance = 0.0;      // vs the saturated-by-covariate-pattern model
    std::int64_t dof = 0;       // n_patterns * (K-1) - n_params
    double p_value = 1.0;       // chi-square tail of the deviance
    std::int64_t n_patterns = 0;
    bool reliable = true;       // false when patterns cannot support the test
};

Diagnostics fit_diagnostics(const PomFit& fit, const std::vector<Observation>& data);

}  // namespace narmine::ordinal
