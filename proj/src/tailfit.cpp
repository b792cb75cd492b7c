#include "narmine/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"

namespace narmine::tailfit {

std::vector<std::pair<std::int64_t, double>> ccdf(const std::vector<std::int64_t>& samples) {
    if (samples.empty()) throw Error("ccdf: empty sample");
    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    std::vector<std::pair<std::int64_t, double>> out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::int64_t v = sorted[i];
        while (i < sorted.size() && sorted[i] == v) ++i;
        out.emplace_back(v, static_cast<double>(sorted.size() - i) / n);
    }
    return out;
}

double power_law_cdf(double alpha, std::int64_t x_min, std::int64_t x) {
    if (x < x_min) return 0.0;
    double z0 = stats::hurwitz_zeta(alpha, static_cast<double>(x_min));
    double zt = stats::hurwitz_zeta(alpha, static_cast<double>(x + 1));
    return 1.0 - zt / z0;
}

double power_law_loglik(double alpha, std::int64_t x_min, std::int64_t n_tail,
                        double sum_log_tail) {
    return -static_cast<double>(n_tail) *
               std::log(stats::hurwitz_zeta(alpha, static_cast<double>(x_min))) -
           alpha * sum_log_tail;
}

PowerLawFit fit_power_law(const std::vector<std::int64_t>& samples, const FitOptions& opts) {
    for (std::int64_t v : samples)
        if (v < 1) throw Error("fit_power_law: samples must be positive integers");
    std::set<std::int64_t> distinct(samples.begin(), samples.end());
    if (distinct.size() < 2) throw Error("degenerate sample: fewer than 2 distinct values");

    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    // suffix log sums: log_suffix[i] = sum of log(sorted[j]) for j >= i
    std::vector<double> log_suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;)
        log_suffix[i] = log_suffix[i + 1] + std::log(static_cast<double>(sorted[i]));

    PowerLawFit best;
    bool have_best = false;

    for (std::int64_t cand : distinct) {
        auto tail_begin = std::lower_bound(sorted.begin(), sorted.end(), cand);
        std::size_t ti = static_cast<std::size_t>(tail_begin - sorted.begin());
        std::int64_t n_tail = static_cast<std::int64_t>(n - ti);
        if (n_tail < std::max<std::int64_t>(opts.min_tail, 2)) continue;
        if (sorted[ti] == sorted[n - 1]) continue;  // single distinct tail value

        double sum_log = log_suffix[ti];

        // Continuous-approximation estimate seeds the search bracket.
        double approx =
            1.0 + static_cast<double>(n_tail) /
                      (sum_log - static_cast<double>(n_tail) *
                                     std::log(static_cast<double>(cand) - 0.5));
        double lo = std::max(opts.alpha_lo, approx - 2.0);
        double hi = std::min(opts.alpha_hi, approx + 2.0);
        if (!(lo < hi)) {
            lo = opts.alpha_lo;
            hi = opts.alpha_hi;
        }
        auto objective = [&](double a) { return power_law_loglik(a, cand, n_tail, sum_log); };
        double alpha = stats::brent_maximize(objective, lo, hi);
        // Expand to the full range if the seeded bracket clipped the optimum.
        if (alpha <= lo + 1e-6 && lo > opts.alpha_lo + 1e-12)
            alpha = stats::brent_maximize(objective, opts.alpha_lo, lo + 1e-3);
        else if (alpha >= hi - 1e-6 && hi < opts.alpha_hi - 1e-12)
            alpha = stats::brent_maximize(objective, hi - 1e-3, opts.alpha_hi);

        // KS distance between the empirical tail CDF and the model CDF,
        // taken over the full step functions.
        double z0 = stats::hurwitz_zeta(alpha, static_cast<double>(cand));
        double ks = 0.0;
        std::size_t j = ti;
        double prev_emp = 0.0;
        while (j < n) {
            std::int64_t v = sorted[j];
            std::size_t j2 = j;
            while (j2 < n && sorted[j2] == v) ++j2;
            double emp =
                static_cast<double>(j2 - ti) / static_cast<double>(n_tail);
            double model =
                1.0 - stats::hurwitz_zeta(alpha, static_cast<double>(v + 1)) / z0;
            double model_before =
                1.0 - stats::hurwitz_zeta(alpha, static_cast<double>(v)) / z0;
            ks = std::max(ks, std::fabs(emp - model));
            ks = std::max(ks, std::fabs(prev_emp - model_before));
            prev_emp = emp;
            j = j2;
        }

        if (!have_best || ks < best.ks_statistic - 1e-15) {
            best.x_min = cand;
            best.alpha = alpha;
            best.n_tail = n_tail;
            best.ks_statistic = ks;
            best.log_likelihood = power_law_loglik(alpha, cand, n_tail, sum_log);
            have_best = true;
        }
    }

    if (!have_best) throw Error("degenerate sample: no feasible lower bound candidate");
    best.small_sample_warning = n < 50;
    return best;
}

PowerLawSampler::PowerLawSampler(double alpha, std::int64_t x_min)
    : alpha_(alpha), x_min_(x_min) {
    if (alpha <= 1.0) throw ConfigError("power-law alpha must exceed 1");
    if (x_min < 1) throw ConfigError("power-law x_min must be >= 1");
    zeta_ = stats::hurwitz_zeta(alpha_, static_cast<double>(x_min_));
    cdf_.reserve(4096);
    double cum = 0.0;
    for (std::int64_t x = x_min_; x < x_min_ + 65536; ++x) {
        cum += std::pow(static_cast<double>(x), -alpha_) / zeta_;
        cdf_.push_back(cum);
        if (cum > 1.0 - 1e-4) break;
    }
}

std::int64_t PowerLawSampler::draw(rng::Rng& rng) const {
    double u = rng.uniform();
    if (u <= cdf_.back()) {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return x_min_ + static_cast<std::int64_t>(it - cdf_.begin());
    }
    // Deep tail: invert the CCDF with doubling + bisection on the zeta tail.
    double target = 1.0 - u;  // find smallest x with zeta(alpha, x+1)/zeta_ <= target
    auto ccdf_after = [&](std::int64_t x) {
        return stats::hurwitz_zeta(alpha_, static_cast<double>(x + 1)) / zeta_;
    };
    std::int64_t lo = x_min_ + static_cast<std::int64_t>(cdf_.size()) - 1;
    std::int64_t hi = std::max<std::int64_t>(lo * 2, lo + 1);
    while (ccdf_after(hi) > target) {
        lo = hi;
        hi *= 2;
        if (hi > (std::int64_t{1} << 56)) break;
    }
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (ccdf_after(mid) <= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

BootstrapGof bootstrap_gof(const std::vector<std::int64_t>& samples, const PowerLawFit& fit,
                           int replicates, rng::Rng rng, const FitOptions& opts) {
    if (replicates < 1) throw ConfigError("bootstrap_gof: replicates must be >= 1");
    std::vector<std::int64_t> body;
    for (std::int64_t v : samples)
        if (v < fit.x_min) body.push_back(v);
    double tail_prob = static_cast<double>(fit.n_tail) / static_cast<double>(samples.size());
    PowerLawSampler sampler(fit.alpha, fit.x_min);

    int worse = 0;
    for (int r = 0; r < replicates; ++r) {
        rng::Rng rep = rng.stream(static_cast<std::uint64_t>(r));
        std::vector<std::int64_t> synth;
        synth.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (body.empty() || rep.uniform() < tail_prob)
                synth.push_back(sampler.draw(rep));
            else
                synth.push_back(body[rep.below(body.size())]);
        }
        try {
            PowerLawFit refit = fit_power_law(synth, opts);
            if (refit.ks_statistic >= fit.ks_statistic) ++worse;
        } catch (const Error&) {
            ++worse;  // degenerate bootstrap draw counts against the model
        }
    }
    BootstrapGof out;
    out.replicates = replicates;
    out.p_value = static_cast<double>(worse) / static_cast<double>(replicates);
    return out;
}

void save_fit_rows(const std::vector<FitRow>& rows, std::ostream& out) {
    out << "group,metric,x_min,alpha,n_tail,ks\n";
    for (const auto& r : rows) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%lld,%.6f,%lld,%.6f",
                      static_cast<long long>(r.fit.x_min), r.fit.alpha,
                      static_cast<long long>(r.fit.n_tail), r.fit.ks_statistic);
        out << r.group << ',' << r.metric << ',' << buf << '\n';
    }
}

}  // namespace narmine::tailfit
