#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"
#include "narmine/synthgen.hpp"
#include "narmine/tailfit.hpp"

namespace narmine::synthgen {

namespace {

// Truncated discrete power law on [1, x_max]; exponent may be <= 1 because
// the support is finite.
class BodySampler {
public:
    BodySampler(double exponent, std::int64_t x_max) {
        if (x_max < 1) throw ConfigError("body sampler: empty support");
        cdf_.reserve(static_cast<std::size_t>(x_max));
        double cum = 0.0;
        for (std::int64_t x = 1; x <= x_max; ++x) {
            cum += std::pow(static_cast<double>(x), -exponent);
            cdf_.push_back(cum);
        }
        for (double& c : cdf_) c /= cum;
    }

    std::int64_t draw(rng::Rng& rng) const {
        double u = rng.uniform();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return 1 + static_cast<std::int64_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

std::int64_t poisson_quantile(double u, double mean) {
    double p = std::exp(-mean);
    double cum = p;
    std::int64_t k = 0;
    while (cum < u && k < 100000000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cum += p;
        if (p < 1e-320) break;  // deep in the upper tail
    }
    return k;
}

}  // namespace

std::vector<std::int64_t> sample_power_law_with_body(const PowerLawWithBody& law,
                                                     std::size_t n, rng::Rng rng) {
    if (law.alpha <= 1.0) throw ConfigError("power-law law: alpha must exceed 1");
    if (law.x_min < 1) throw ConfigError("power-law law: x_min must be >= 1");
    if (law.tail_fraction < 0.0 || law.tail_fraction > 1.0)
        throw ConfigError("power-law law: tail_fraction outside [0, 1]");

    tailfit::PowerLawSampler tail(law.alpha, law.x_min);
    const bool has_body = law.x_min > 1 && law.tail_fraction < 1.0;
    std::optional<BodySampler> body;
    if (has_body) body.emplace(law.body_alpha, law.x_min - 1);

    std::vector<std::int64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t v;
        if (!has_body || rng.uniform() < law.tail_fraction)
            v = tail.draw(rng);
        else
            v = body->draw(rng);
        if (law.cap > 0 && v > law.cap) v = law.cap;
        out.push_back(v);
    }
    return out;
}

int draw_pom_category(const PomParams& pom, double x, rng::Rng& rng) {
    const int k = pom.k();
    double u = rng.uniform();
    for (int j = 0; j < k - 1; ++j) {
        double cum = stats::logistic(pom.intercepts[static_cast<std::size_t>(j)] -
                                     pom.slope * x);
        if (u <= cum) return j + 1;
    }
    return k;
}

std::vector<ordinal::Observation> simulate_pom(const PomParams& pom,
                                               const PowerLawWithBody& x_law, std::size_t n,
                                               rng::Rng rng) {
    for (std::size_t j = 1; j < pom.intercepts.size(); ++j)
        if (!(pom.intercepts[j] > pom.intercepts[j - 1]))
            throw ConfigError("pom intercepts must be strictly ascending");
    auto xs = sample_power_law_with_body(x_law, n, rng.stream("x"));
    rng::Rng ydraw = rng.stream("y");
    std::vector<ordinal::Observation> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ordinal::Observation obs;
        obs.x = static_cast<double>(xs[i]);
        obs.y = draw_pom_category(pom, obs.x, ydraw);
        out.push_back(obs);
    }
    return out;
}

Eigen::MatrixXd copula_counts(const Eigen::MatrixXd& latent_correlation,
                              const std::vector<double>& poisson_means, std::size_t n,
                              rng::Rng rng) {
    const int k = static_cast<int>(poisson_means.size());
    if (latent_correlation.rows() != k || latent_correlation.cols() != k)
        throw ConfigError("copula_counts: correlation size mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(latent_correlation);
    if (llt.info() != Eigen::Success)
        throw ConfigError("copula_counts: correlation matrix not positive definite");
    Eigen::MatrixXd chol = llt.matrixL();

    Eigen::MatrixXd counts(static_cast<Eigen::Index>(n), k);
    Eigen::VectorXd z(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) z(j) = rng.normal();
        Eigen::VectorXd corr = chol * z;
        for (int j = 0; j < k; ++j) {
            double u = stats::normal_cdf(corr(j));
            counts(static_cast<Eigen::Index>(i), j) = static_cast<double>(
                poisson_quantile(u, poisson_means[static_cast<std::size_t>(j)]));
        }
    }
    return counts;
}

survival::LifetimeSample lifetime_cohort(const std::string& group, double mean_seconds,
                                         std::size_t n, rng::Rng rng) {
    survival::LifetimeSample sample;
    sample.group = group;
    sample.durations.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        sample.durations.emplace_back(rng.exponential(mean_seconds), true);
    return sample;
}

PlantedGraph generate_planted_partition_graph(const PlantedPartitionSpec& spec,
                                              std::uint64_t seed) {
    if (spec.block_sizes.empty()) throw ConfigError("planted partition: no blocks");
    if (!(spec.p_in > spec.p_out)) throw ConfigError("planted partition: need p_in > p_out");

    int n = 0;
    std::vector<int> block_of;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
        if (spec.block_sizes[b] <= 0) throw ConfigError("planted partition: empty block");
        for (int i = 0; i < spec.block_sizes[b]; ++i) block_of.push_back(static_cast<int>(b));
        n += spec.block_sizes[b];
    }

    rng::Rng root(seed);
    rng::Rng edge_rng = root.stream("edges");
    rng::Rng weight_rng = root.stream("weights");

    std::optional<tailfit::PowerLawSampler> weight_sampler;
    if (spec.weight_alpha > 1.0)
        weight_sampler.emplace(spec.weight_alpha, spec.weight_x_min);
    auto internal_weight = [&]() {
        if (!weight_sampler) return spec.internal_weight;
        std::int64_t w = weight_sampler->draw(weight_rng);
        if (spec.weight_cap > 0 && w > spec.weight_cap) w = spec.weight_cap;
        return static_cast<double>(w);
    };

    std::vector<graph::Edge> edges;
    std::vector<bool> has_internal(static_cast<std::size_t>(n), false);
    std::int64_t external_budget =
        spec.exact_external_edges ? *spec.exact_external_edges : -1;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool same = block_of[static_cast<std::size_t>(i)] ==
                        block_of[static_cast<std::size_t>(j)];
            if (same) {
                if (edge_rng.uniform() < spec.p_in) {
                    edges.push_back({i, j, internal_weight()});
                    has_internal[static_cast<std::size_t>(i)] = true;
                    has_internal[static_cast<std::size_t>(j)] = true;
                }
            } else if (spec.exact_external_edges) {
                if (external_budget > 0) {
                    edges.push_back({i, j, spec.external_weight});
                    --external_budget;
                }
            } else if (edge_rng.uniform() < spec.p_out) {
                edges.push_back({i, j, spec.external_weight});
            }
        }
    }

    // A node with no internal edge cannot be recovered; tie it to a block
    // neighbor so the reference partition stays well posed.
    int offset = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
        int size = spec.block_sizes[b];
        if (size > 1) {
            for (int i = 0; i < size; ++i) {
                int v = offset + i;
                if (!has_internal[static_cast<std::size_t>(v)]) {
                    int u = offset + (i + 1) % size;
                    edges.push_back({std::min(u, v), std::max(u, v), internal_weight()});
                    has_internal[static_cast<std::size_t>(v)] = true;
                    has_internal[static_cast<std::size_t>(u)] = true;
                }
            }
        }
        offset += size;
    }

    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    char buf[16];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "n%04d", i);
        ids.emplace_back(buf);
    }

    PlantedGraph out{graph::WeightedGraph(std::move(ids), std::move(edges)), {}};
    out.reference.assignment = block_of;
    out.reference.algorithm = "reference";
    out.reference.modularity = community::modularity(out.graph, block_of);
    return out;
}

}  // namespace narmine::synthgen
