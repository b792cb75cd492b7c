#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "narmine/rng.hpp"

namespace narmine::tailfit {

// Complementary CDF over distinct sample values: (x, P(X > x)).
std::vector<std::pair<std::int64_t, double>> ccdf(const std::vector<std::int64_t>& samples);

struct PowerLawFit {
    std::int64_t x_min = 1;
    double alpha = 2.0;
    std::int64_t n_tail = 0;
    double ks_statistic = 1.0;
    double log_likelihood = 0.0;
    bool small_sample_warning = false;  // fewer than 50 samples
};

struct FitOptions {
    double alpha_lo = 1.000001;
    double alpha_hi = 6.0;
    std::int64_t min_tail = 2;  // candidate lower bounds need this many tail samples
};

// Discrete power law p(x) ∝ x^(-alpha) on x >= x_min. The lower bound is
// chosen by minimizing the KS distance between the tail and the fitted
// model; alpha by exact maximum likelihood with Hurwitz-zeta normalization.
PowerLawFit fit_power_law(const std::vector<std::int64_t>& samples,
                          const FitOptions& opts = {});

// Model CDF P(X <= x | X >= x_min).
double power_law_cdf(double alpha, std::int64_t x_min, std::int64_t x);

// Log-likelihood of a tail sample under (alpha, x_min).
double power_law_loglik(double alpha, std::int64_t x_min, std::int64_t n_tail,
                        double sum_log_tail);

// Exact inverse-CDF sampler; table-backed with a zeta fallback deep in the tail.
class PowerLawSampler {
public:
    PowerLawSampler(double alpha, std::int64_t x_min);
    std::int64_t draw(rng::Rng& rng) const;

private:
    double alpha_;
    std::int64_t x_min_;
    double zeta_;                // hurwitz_zeta(alpha, x_min)
    std::vector<double> cdf_;    // cdf_[i] = P(X <= x_min + i)
};

struct BootstrapGof {
    double p_value = 1.0;
    int replicates = 0;
};

// Semiparametric KS bootstrap; expensive, off the default paths.
BootstrapGof bootstrap_gof(const std::vector<std::int64_t>& samples,
                           const PowerLawFit& fit, int replicates, rng::Rng rng,
                           const FitOptions& opts = {});

// Output rows: group,metric,x_min,alpha,n_tail,ks
struct FitRow {
    std::string group;
    std::string metric;
    PowerLawFit fit;
};

void save_fit_rows(const std::vector<FitRow>& rows, std::ostream& out);

}  // namespace narmine::tailfit
