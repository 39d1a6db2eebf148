#pragma once
// Shared constants and the scalar reference for the kernel math.
// The AVX2 translation unit mirrors these operation by operation.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace nlab::simd::detail {

inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // low 21 bits clear
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880e+00;
inline constexpr double kExpMax = 709.0;
inline constexpr double kExpMin = -708.0;
inline constexpr double kTwo52 = 4503599627370496.0;
inline constexpr double kHalfUlp = 1.1102230246251565404e-16;  // 2^-53

inline constexpr int kExpDegree = 13;
inline constexpr int kLogTerms = 12;

constexpr std::array<double, kExpDegree + 1> make_inverse_factorials()
{
    std::array<double, kExpDegree + 1> c{};
    c[0] = 1.0;
    for (int k = 1; k <= kExpDegree; ++k) c[k] = c[k - 1] / k;
    return c;
}

constexpr std::array<double, kLogTerms> make_inverse_odds()
{
    std::array<double, kLogTerms> c{};
    for (int k = 0; k < kLogTerms; ++k) c[k] = 1.0 / (2 * k + 1);
    return c;
}

inline constexpr auto kExpCoeff = make_inverse_factorials();
inline constexpr auto kLogCoeff = make_inverse_odds();

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline double exp_ref(double x)
{
    const double xc = std::fmin(std::fmax(x, kExpMin), kExpMax);
    const double n = std::nearbyint(xc * kLog2e);
    const double r = (xc - n * kLn2Hi) - n * kLn2Lo;
    double p = kExpCoeff[kExpDegree];
    for (int k = kExpDegree - 1; k >= 0; --k) p = p * r + kExpCoeff[k];
    const auto e = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
    const double res = p * std::bit_cast<double>(e);
    if (x > kExpMax) return INFINITY;
    if (x < kExpMin) return 0.0;
    return res;
}

inline double log_ref(double x)
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const double ebias = static_cast<double>((bits >> 52) & 0x7ffu);
    double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
    double e = ebias - 1023.0;
    if (m > kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    double p = kLogCoeff[kLogTerms - 1];
    for (int k = kLogTerms - 2; k >= 0; --k) p = p * s2 + kLogCoeff[k];
    const double logm = 2.0 * s * p;
    const double res = e * kLn2Hi + (logm + e * kLn2Lo);
    if (x == 0.0) return -INFINITY;
    return res;
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c, std::uint32_t k0,
                                                  std::uint32_t k1)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }
    return c;
}

/// Open-interval uniform from two 32-bit words: (2m+1) 2^-53 with m the top
/// 52 bits of (a:b).
inline double uniform_from_words(std::uint32_t a, std::uint32_t b)
{
    const std::uint64_t x = ((std::uint64_t{a} << 32) | b) >> 12;
    return (std::bit_cast<double>(x | 0x3FF0000000000000ull) - 1.0) + kHalfUlp;
}

}  // namespace nlab::simd::detail
