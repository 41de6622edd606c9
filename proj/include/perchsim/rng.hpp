// Counter-based stream derivation: every (master seed, run, purpose) triple maps
// to an independent generator seed, so the order in which runs execute cannot
// change what any run samples.
#pragma once

#include <cstdint>
#include <random>

namespace perchsim {

enum class StreamTag : std::uint64_t {
    Dispersion = 1,
    Mocap = 2,
};

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t run_index,
                                                     StreamTag tag) {
    return mix64(mix64(mix64(master_seed) ^ run_index) ^ static_cast<std::uint64_t>(tag));
}

[[nodiscard]] inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t run_index, StreamTag tag) {
    return std::mt19937_64(substream_seed(master_seed, run_index, tag));
}

}  // namespace perchsim
