#ifndef BPINT_RNG_HPP
#define BPINT_RNG_HPP

#include <cstdint>

namespace bpint {

// Counter-based generator: the n-th draw of stream (seed, stream) is a pure
// function of (seed, stream, n), so parallel batches can skip to their own
// slice without sharing state.  Mixing is SplitMix64 applied to a combined key.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))), counter_(0) {}

    std::uint64_t next_u64() { return at(counter_++); }

    // Uniform in [0,1).
    double next_double() { return to_unit(next_u64()); }

    // Random access without advancing.
    std::uint64_t at(std::uint64_t n) const { return mix(key_ + n * 0x9e3779b97f4a7c15ull); }
    double at_double(std::uint64_t n) const { return to_unit(at(n)); }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    static double to_unit(std::uint64_t u) {
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace bpint

#endif
