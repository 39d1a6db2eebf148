#pragma once
// Counter-based random variates.
//
// The variate at (seed, purpose, sample, slot) is a fixed function of those
// four numbers, so any partition of the samples into blocks or workers sees
// identical values.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nlab {

/// Uniforms for a contiguous run of samples, `slots` per sample, laid out
/// slot-major so that the vector kernel fills each row in one pass.
class VariateBlock {
public:
    VariateBlock(std::uint64_t seed, std::uint32_t purpose, std::uint64_t first_sample,
                 std::size_t n, int slots);

    double operator()(int slot, std::size_t i) const { return data_[slot * n_ + i]; }

    std::size_t size() const { return n_; }
    int slots() const { return slots_; }
    std::uint64_t seed() const { return seed_; }
    std::uint32_t purpose() const { return purpose_; }
    std::uint64_t first_sample() const { return first_; }

private:
    std::uint64_t seed_;
    std::uint32_t purpose_;
    std::uint64_t first_;
    std::size_t n_;
    int slots_;
    std::vector<double> data_;
};

/// Single variate outside any block; same value a block would hold.
double variate_at(std::uint64_t seed, std::uint32_t purpose, std::uint64_t sample, int slot);

/// Sequential reader over one sample's variates. Draws past the block's
/// precomputed slots are evaluated on demand from the same counter space.
class VariateSource {
public:
    VariateSource(const VariateBlock& block, std::size_t i) : block_(&block), i_(i) {}

    double uniform();
    /// Standard normal by Box-Muller (consumes two uniforms).
    double normal();
    int used() const { return next_; }

private:
    const VariateBlock* block_;
    std::size_t i_;
    int next_ = 0;
};

/// Convenience generator for set-up work (not on hot paths): a VariateSource
/// walking through samples 0, 1, 2, ... of one stream.
class SequentialStream {
public:
    SequentialStream(std::uint64_t seed, std::uint32_t purpose) : seed_(seed), purpose_(purpose) {}
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::uint32_t purpose_;
    std::uint64_t index_ = 0;
};

/// Stream purposes in use; distinct values give independent streams.
namespace purpose {
inline constexpr std::uint32_t energy = 1;
inline constexpr std::uint32_t energy_swapped = 2;
inline constexpr std::uint32_t ball_volume = 3;
inline constexpr std::uint32_t centers = 4;
inline constexpr std::uint32_t calibration = 5;
inline constexpr std::uint32_t property = 6;
}  // namespace purpose

}  // namespace nlab
