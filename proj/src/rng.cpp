#include "crossarea/rng.hpp"

namespace crossarea {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane) {
    // Chain the three coordinates through the mixer so nearby (stream, lane)
    // pairs land on unrelated keys.
    std::uint64_t k = mix64(seed + 0x243f6a8885a308d3ULL);
    k = mix64(k ^ (stream + 0x13198a2e03707344ULL));
    k = mix64(k ^ (lane * 0xa4093822299f31d0ULL + 0x082efa98ec4e6c89ULL));
    key_ = k;
}

}  // namespace crossarea
