#include "narmine/survival.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"

namespace narmine::survival {

namespace {

struct SpanAccumulator {
    std::int64_t first = 0;
    std::int64_t last = 0;
    std::int64_t count = 0;

    void add(std::int64_t t) {
        if (count == 0) {
            first = last = t;
        } else {
            first = std::min(first, t);
            last = std::max(last, t);
        }
        ++count;
    }
};

}  // namespace

LifetimeSample lifetimes(const corpus::Corpus& c, LifetimeUnit unit,
                         const std::map<std::string, std::string>& post_labels,
                         const std::string& topic, const LifetimeOptions& opts) {
    auto in_scope = [&](const corpus::Post& p) {
        auto it = post_labels.find(p.post_id);
        if (it == post_labels.end() || it->second.empty()) return false;
        return topic.empty() || it->second == topic;
    };

    LifetimeSample sample;
    sample.group = topic.empty() ? "all" : topic;

    auto push = [&](const SpanAccumulator& span) {
        double duration = static_cast<double>(span.last - span.first);
        if (duration == 0.0 && !opts.include_zero_durations) return;
        bool observed = true;
        if (opts.censor_horizon &&
            span.last > c.window_max - *opts.censor_horizon)
            observed = false;
        sample.durations.emplace_back(duration, observed);
    };

    if (unit == LifetimeUnit::kPost) {
        for (const auto& p : c.posts) {
            if (!in_scope(p)) continue;
            SpanAccumulator span;
            for (const auto& e : p.comments) span.add(e.t);
            if (span.count == 0) span.add(p.created_at);  // no debate: zero lifetime
            push(span);
        }
    } else {
        std::map<std::string, SpanAccumulator> spans;
        for (const auto& p : c.posts) {
            if (!in_scope(p)) continue;
            for (const auto& e : p.comments) spans[e.user].add(e.t);
        }
        for (const auto& [user, span] : spans) {
            (void)user;
            push(span);
        }
    }

    if (sample.durations.empty())
        throw Error("empty scope: no " +
                    std::string(unit == LifetimeUnit::kPost ? "posts" : "users") +
                    " for topic '" + sample.group + "'");
    return sample;
}

double SurvivalCurve::evaluate(double t) const {
    // Estimate index for the last event time strictly before t.
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return estimate[static_cast<std::size_t>(it - times.begin()) - 1];
}

SurvivalCurve kaplan_meier(const LifetimeSample& sample) {
    if (sample.durations.empty()) throw Error("kaplan_meier: empty sample");

    auto sorted = sample.durations;
    std::sort(sorted.begin(), sorted.end());

    const std::int64_t n_total = static_cast<std::int64_t>(sorted.size());
    bool any_censored = std::any_of(sorted.begin(), sorted.end(),
                                    [](const auto& d) { return !d.second; });

    SurvivalCurve curve;
    std::int64_t at_risk = n_total;
    std::int64_t cum_events = 0;
    double product = 1.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        double t = sorted[i].first;
        std::int64_t d = 0, removed = 0;
        while (i < sorted.size() && sorted[i].first == t) {
            if (sorted[i].second) ++d;
            ++removed;
            ++i;
        }
        if (d > 0) {
            cum_events += d;
            product *= static_cast<double>(at_risk - d) / static_cast<double>(at_risk);
            curve.times.push_back(t);
            curve.at_risk.push_back(at_risk);
            curve.events.push_back(d);
            // Without censoring the product telescopes to a single exact
            // ratio; use it so S matches 1 - ECDF bit for bit.
            curve.estimate.push_back(any_censored
                                         ? product
                                         : static_cast<double>(n_total - cum_events) /
                                               static_cast<double>(n_total));
        }
        at_risk -= removed;
    }
    return curve;
}

namespace {

struct PooledTimeline {
    std::vector<double> times;            // distinct observed-event times
    std::vector<std::int64_t> n;          // pooled at risk
    std::vector<std::int64_t> d;          // pooled events
    std::vector<std::vector<std::int64_t>> n_g;  // per group at risk
    std::vector<std::vector<std::int64_t>> d_g;  // per group events
    std::vector<double> w;                // test weights
};

PooledTimeline build_timeline(const std::vector<LifetimeSample>& samples,
                              TestWeighting weighting) {
    const std::size_t groups = samples.size();
    std::set<double> time_set;
    for (const auto& s : samples)
        for (const auto& [t, observed] : s.durations)
            if (observed) time_set.insert(t);

    PooledTimeline tl;
    tl.times.assign(time_set.begin(), time_set.end());
    const std::size_t k = tl.times.size();
    tl.n.assign(k, 0);
    tl.d.assign(k, 0);
    tl.n_g.assign(groups, std::vector<std::int64_t>(k, 0));
    tl.d_g.assign(groups, std::vector<std::int64_t>(k, 0));

    for (std::size_t g = 0; g < groups; ++g) {
        for (const auto& [t, observed] : samples[g].durations) {
            // at risk at every event time <= t
            auto last = std::upper_bound(tl.times.begin(), tl.times.end(), t);
            for (auto it = tl.times.begin(); it != last; ++it) {
                std::size_t idx = static_cast<std::size_t>(it - tl.times.begin());
                ++tl.n[idx];
                ++tl.n_g[g][idx];
            }
            if (observed) {
                auto pos = std::lower_bound(tl.times.begin(), tl.times.end(), t);
                std::size_t idx = static_cast<std::size_t>(pos - tl.times.begin());
                ++tl.d[idx];
                ++tl.d_g[g][idx];
            }
        }
    }

    tl.w.assign(k, 1.0);
    if (weighting == TestWeighting::kGehan) {
        for (std::size_t i = 0; i < k; ++i) tl.w[i] = static_cast<double>(tl.n[i]);
    } else {
        // Pooled KM just before each event time.
        double s = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            tl.w[i] = s;
            if (tl.n[i] > 0)
                s *= static_cast<double>(tl.n[i] - tl.d[i]) / static_cast<double>(tl.n[i]);
        }
    }
    return tl;
}

}  // namespace

GehanResult gehan_wilcoxon(const std::vector<LifetimeSample>& samples,
                           const GehanOptions& opts) {
    const std::size_t groups = samples.size();
    if (groups < 2) throw Error("gehan_wilcoxon: need at least 2 groups");
    for (const auto& s : samples) {
        if (s.durations.empty()) throw Error("gehan_wilcoxon: empty group '" + s.group + "'");
        bool any = std::any_of(s.durations.begin(), s.durations.end(),
                               [](const auto& d) { return d.second; });
        if (!any) throw Error("no events in group '" + s.group + "'");
    }

    PooledTimeline tl = build_timeline(samples, opts.weighting);
    const std::size_t k = tl.times.size();

    GehanResult res;
    res.group_scores.assign(groups, 0.0);
    for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t i = 0; i < k; ++i)
            res.group_scores[g] +=
                tl.w[i] * (static_cast<double>(tl.d_g[g][i]) -
                           static_cast<double>(tl.n_g[g][i]) *
                               static_cast<double>(tl.d[i]) / static_cast<double>(tl.n[i]));

    // Covariance of the first groups-1 score components.
    const std::size_t gm1 = groups - 1;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gm1),
                                                static_cast<Eigen::Index>(gm1));
    for (std::size_t i = 0; i < k; ++i) {
        if (tl.n[i] <= 1) continue;
        double hyper = static_cast<double>(tl.d[i]) *
                       static_cast<double>(tl.n[i] - tl.d[i]) /
                       static_cast<double>(tl.n[i] - 1);
        for (std::size_t g = 0; g < gm1; ++g) {
            double fg = static_cast<double>(tl.n_g[g][i]) / static_cast<double>(tl.n[i]);
            for (std::size_t h = 0; h < gm1; ++h) {
                double fh =
                    static_cast<double>(tl.n_g[h][i]) / static_cast<double>(tl.n[i]);
                double kron = (g == h) ? fg : 0.0;
                cov(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) +=
                    tl.w[i] * tl.w[i] * hyper * (kron - fg * fh);
            }
        }
    }

    Eigen::VectorXd u(static_cast<Eigen::Index>(gm1));
    for (std::size_t g = 0; g < gm1; ++g)
        u(static_cast<Eigen::Index>(g)) = res.group_scores[g];

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(cov);
    Eigen::VectorXd solved = cod.pseudoInverse() * u;
    res.chi_square = u.dot(solved);
    if (res.chi_square < 0.0) res.chi_square = 0.0;
    res.dof = static_cast<int>(gm1);
    res.p_value = stats::chi_square_sf(res.chi_square, static_cast<double>(res.dof));

    if (groups == 2) {
        double var = cov(0, 0);
        res.statistic = var > 0.0 ? res.group_scores[0] / std::sqrt(var) : 0.0;
    } else {
        res.statistic = res.chi_square;
    }

    if (opts.exact_permutation) {
        if (groups != 2) throw ConfigError("exact permutation mode needs exactly 2 groups");
        std::size_t n_total = samples[0].durations.size() + samples[1].durations.size();
        if (n_total > 20) throw ConfigError("exact permutation limited to pooled n <= 20");

        // U_1 is linear in group membership: per-unit scores, then subset sums.
        struct Unit {
            double t;
            bool observed;
        };
        std::vector<Unit> units;
        for (const auto& s : samples)
            for (const auto& [t, observed] : s.durations) units.push_back({t, observed});

        std::vector<double> score(units.size(), 0.0);
        for (std::size_t uidx = 0; uidx < units.size(); ++uidx) {
            double sc = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (tl.times[i] > units[uidx].t) break;
                sc -= tl.w[i] * static_cast<double>(tl.d[i]) / static_cast<double>(tl.n[i]);
            }
            if (units[uidx].observed) {
                auto pos = std::lower_bound(tl.times.begin(), tl.times.end(), units[uidx].t);
                sc += tl.w[static_cast<std::size_t>(pos - tl.times.begin())];
            }
            score[uidx] = sc;
        }

        const std::size_t n1 = samples[0].durations.size();
        double observed_u = res.group_scores[0];
        std::int64_t extreme = 0, total = 0;
        std::vector<std::size_t> pick(n1);
        // enumerate combinations of size n1
        std::function<void(std::size_t, std::size_t, double)> rec =
            [&](std::size_t start, std::size_t chosen, double acc) {
                if (chosen == n1) {
                    ++total;
                    if (std::fabs(acc) >= std::fabs(observed_u) - 1e-9) ++extreme;
                    return;
                }
                if (units.size() - start < n1 - chosen) return;
                for (std::size_t i = start; i < units.size(); ++i)
                    rec(i + 1, chosen + 1, acc + score[i]);
            };
        rec(0, 0, 0.0);
        res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    }

    return res;
}

void save_curve(const std::string& group, const SurvivalCurve& curve, std::ostream& out,
                bool header) {
    if (header) out << "group,t,s_hat,n_risk,d\n";
    auto emit = [&](double t, double s, std::int64_t n, std::int64_t d) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%lld,%lld", t, s,
                      static_cast<long long>(n), static_cast<long long>(d));
        out << group << ',' << buf << '\n';
    };
    std::int64_t n0 = curve.at_risk.empty() ? 0 : curve.at_risk.front();
    emit(0.0, 1.0, n0, 0);
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        emit(curve.times[i], curve.estimate[i], curve.at_risk[i], curve.events[i]);
}

}  // namespace narmine::survival
