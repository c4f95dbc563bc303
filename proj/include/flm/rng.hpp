#ifndef FLM_RNG_HPP
#define FLM_RNG_HPP

#include <cstdint>
#include <vector>

namespace flm {

// Seedable, splittable 64-bit generator (splitmix64 core). Streams derived
// from (seed, tag) are independent of the order in which they are created,
// which keeps randomized rounding stable under cluster-order changes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, hi)
    double uniform(double hi) { return next_double() * hi; }

    bool bernoulli(double p) { return next_double() < p; }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // index drawn proportionally to nonnegative weights (assumed to sum to ~total)
    std::size_t categorical(const std::vector<double>& weights, double total) {
        double t = next_double() * total;
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            acc += weights[k];
            if (t < acc) return k;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    // independent stream addressed by (this stream's seed, tag)
    Rng split(std::uint64_t tag) const {
        Rng mixer(state_ ^ (0x94d049bb133111ebULL * (tag + 1)));
        return Rng(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

} // namespace flm

#endif
