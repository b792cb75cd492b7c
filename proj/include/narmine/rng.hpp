#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace narmine::rng {

// Counter-based generator: every draw is a hash of (base, counter), where
// base encodes seed and substream. Substreams derived by label never collide
// with the parent's counter sequence, so per-post / per-user generation is
// reproducible under any scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    Rng stream(std::uint64_t substream) const;
    Rng stream(const std::string& label) const;

    std::uint64_t next_u64();

    // Open interval (0, 1); safe for log/quantile transforms.
    double uniform();
    double uniform(double lo, double hi);

    // [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    double exponential(double mean);
    double normal();  // standard normal via inverse CDF

    // Index drawn proportionally to non-negative weights.
    std::size_t categorical(const std::vector<double>& weights);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace narmine::rng
