#pragma once

#include <cstdint>
#include <limits>

namespace crossarea {

/// Counter-based generator: output k of stream (seed, stream, lane) is
/// mix64(key + k·γ) with γ the golden-ratio increment, i.e. SplitMix64 with
/// a per-stream key. Any output can be computed without the ones before it,
/// so streams are independent of scheduling.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane = 0);

    result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

    /// Output at an absolute counter position, without advancing.
    result_type at(std::uint64_t counter) const { return mix64(key_ + counter * kGolden); }

    void discard(std::uint64_t n) { counter_ += n; }
    std::uint64_t counter() const { return counter_; }
    std::uint64_t key() const { return key_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace crossarea
