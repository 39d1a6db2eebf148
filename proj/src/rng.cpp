#include "nlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "nlab/simd/kernels.hpp"

namespace nlab {
namespace {

simd::PhiloxKey key_of(std::uint64_t seed)
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

VariateBlock::VariateBlock(std::uint64_t seed, std::uint32_t purpose, std::uint64_t first_sample,
                           std::size_t n, int slots)
    : seed_(seed), purpose_(purpose), first_(first_sample), n_(n), slots_(slots + slots % 2),
      data_(static_cast<std::size_t>(slots_) * n)
{
    const auto& k = simd::kernels();
    for (int pair = 0; pair < slots_ / 2; ++pair)
        k.philox_uniform_pairs(key_of(seed), purpose, static_cast<std::uint32_t>(pair), first_, n_,
                               data_.data() + (2 * pair) * n_, data_.data() + (2 * pair + 1) * n_);
}

double variate_at(std::uint64_t seed, std::uint32_t purpose, std::uint64_t sample, int slot)
{
    double even = 0.0;
    double odd = 0.0;
    simd::scalar_kernels().philox_uniform_pairs(key_of(seed), purpose,
                                                static_cast<std::uint32_t>(slot / 2), sample, 1,
                                                &even, &odd);
    return slot % 2 == 0 ? even : odd;
}

double VariateSource::uniform()
{
    const int s = next_++;
    if (s < block_->slots()) return (*block_)(s, i_);
    return variate_at(block_->seed(), block_->purpose(), block_->first_sample() + i_, s);
}

double VariateSource::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SequentialStream::uniform()
{
    const std::uint64_t i = index_++;
    return variate_at(seed_, purpose_, i / 2, static_cast<int>(i % 2));
}

double SequentialStream::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nlab
