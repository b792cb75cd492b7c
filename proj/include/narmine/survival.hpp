#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"

namespace narmine::survival {

struct LifetimeSample {
    std::string group;
    std::vector<std::pair<double, bool>> durations;  // (duration, observed)
};

enum class LifetimeUnit { kPost, kUser };

struct LifetimeOptions {
    // Units whose last activity lies within this many seconds of the
    // observation window end are right-censored. Unset: everything observed.
    std::optional<std::int64_t> censor_horizon;
    bool include_zero_durations = true;
};

// Post lifetime: span between first and last comment (0 with < 2 comments).
// User lifetime: same span over the user's comments on posts labeled `topic`.
// topic == "" scopes to all labeled posts.
LifetimeSample lifetimes(const corpus::Corpus& c, LifetimeUnit unit,
                         const std::map<std::string, std::string>& post_labels,
                         const std::string& topic, const LifetimeOptions& opts = {});

struct SurvivalCurve {
    std::vector<double> times;         // distinct event times, ascending
    std::vector<std::int64_t> at_risk;  // n_t just before each time
    std::vector<std::int64_t> events;   // d_t
    std::vector<double> estimate;       // S after each time

    // Left-continuous product over event times strictly before t; S(0) = 1.
    double evaluate(double t) const;
};

SurvivalCurve kaplan_meier(const LifetimeSample& sample);

enum class TestWeighting {
    kGehan,     // w(t) = pooled number at risk
    kPetoPeto,  // w(t) = pooled KM estimate just before t
};

struct GehanOptions {
    TestWeighting weighting = TestWeighting::kGehan;
    bool exact_permutation = false;  // 2 groups, pooled n <= 20
};

struct GehanResult {
    double statistic = 0.0;   // signed z for 2 groups, chi-square otherwise
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::vector<double> group_scores;  // observed-minus-expected sums U_g
};

GehanResult gehan_wilcoxon(const std::vector<LifetimeSample>& samples,
                           const GehanOptions& opts = {});

// CSV step points: group,t,s_hat,n_risk,d (one leading row with t=0, s=1).
void save_curve(const std::string& group, const SurvivalCurve& curve, std::ostream& out,
                bool header);

}  // namespace narmine::survival
