#pragma once
// Data-parallel inner loops used by the Monte Carlo paths.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The variants evaluate the same operation sequence lane by lane (no FMA
// contraction, identical polynomial and reduction order), so both backends
// return bit-identical results. The active backend is chosen once at start-up
// from CPUID and may be overridden with NLAB_SIMD=scalar|avx2 or set_backend().

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace nlab::simd {

/// Sum and sum of squares with a fixed four-lane accumulation order.
struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

/// Philox4x32-10 key/counter words.
struct PhiloxKey {
    std::uint32_t k0 = 0;
    std::uint32_t k1 = 0;
};

/// Largest coordinate count accepted by the counting kernels.
inline constexpr int kMaxCountDim = 8;

struct KernelTable {
    const char* name;

    /// For samples s in [first_sample, first_sample + n) evaluate Philox4x32-10
    /// at counter (slot_pair, lo32(s), hi32(s), purpose) and write the two
    /// open-interval uniforms it yields to even_out[s - first] and
    /// odd_out[s - first].
    void (*philox_uniform_pairs)(PhiloxKey key, std::uint32_t purpose, std::uint32_t slot_pair,
                                 std::uint64_t first_sample, std::size_t n, double* even_out,
                                 double* odd_out);

    /// Raw Philox4x32-10 block for n consecutive counters (c0 + i, c1, c2, c3).
    void (*philox_blocks)(PhiloxKey key, const std::uint32_t ctr[4], std::size_t n,
                          std::uint32_t* out /* 4n words */);

    /// out[i] = exp(x[i]); results below 2^-1022 flush to zero, overflow gives +inf.
    void (*exp)(const double* x, std::size_t n, double* out);

    /// out[i] = log(x[i]) for positive normal x or zero (-> -inf).
    void (*log)(const double* x, std::size_t n, double* out);

    /// out[i] = scale * q[i]^exponent via exp(exponent * log(q)).
    void (*power_law)(const double* q, std::size_t n, double scale, double exponent,
                      double* out);

    /// Number of points with sum_k (x_k - c_k)^2 <= r2. coords[k] is the k-th
    /// coordinate row (structure-of-arrays).
    std::uint64_t (*count_euclid)(const double* const* coords, int dim, std::size_t n,
                                  const double* center, double r2);

    /// Number of points with sum_k |x_k - c_k|^q <= rq.
    std::uint64_t (*count_lq)(const double* const* coords, int dim, std::size_t n,
                              const double* center, double q, double rq);

    /// Number of Heisenberg points y with Koranyi gauge of c^{-1} y at most r,
    /// tested as ((dx^2+dy^2)^2 + 16 dz^2) <= r4 where
    /// dz = z - c_z - (c_x y - c_y x)/2.
    std::uint64_t (*count_koranyi)(const double* x, const double* y, const double* z,
                                   std::size_t n, const double* center, double r4);

    Moments (*moments)(const double* w, std::size_t n);
};

/// Table currently in use.
const KernelTable& kernels();

/// Scalar reference table; always available.
const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when the CPU or the build lacks AVX2.
const KernelTable* avx2_kernels();

/// Selects "scalar", "avx2" or "auto". Returns false if unavailable.
bool set_backend(std::string_view name);

std::string_view backend_name();

}  // namespace nlab::simd
