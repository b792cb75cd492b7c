#include "narmine/rng.hpp"

#include <cmath>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"

namespace narmine::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed) {
    base_ = mix64(mix64(seed + kGolden) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

Rng Rng::stream(std::uint64_t substream) const {
    Rng child(0);
    child.seed_ = seed_;
    child.base_ = mix64(base_ ^ mix64(substream + 0xD1B54A32D192ED03ULL));
    child.counter_ = 0;
    return child;
}

Rng Rng::stream(const std::string& label) const { return stream(fnv1a(label)); }

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGolden);
}

double Rng::uniform() {
    // 53-bit mantissa, shifted into the open interval (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below: n must be positive");
    // Rejection sampling keeps the draw exactly uniform.
    std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double Rng::exponential(double mean) {
    if (mean <= 0.0) throw Error("Rng::exponential: mean must be positive");
    return -mean * std::log(uniform());
}

double Rng::normal() { return stats::normal_quantile(uniform()); }

std::size_t Rng::categorical(const std::vector<double>& weights) {
    if (weights.empty()) throw Error("Rng::categorical: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw Error("Rng::categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw Error("Rng::categorical: all weights zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace narmine::rng
