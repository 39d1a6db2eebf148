#include "nlab/simd/kernels.hpp"

#include "vecmath.hpp"

namespace nlab::simd {
namespace {

using namespace detail;

void philox_uniform_pairs(PhiloxKey key, std::uint32_t purpose, std::uint32_t slot_pair,
                          std::uint64_t first_sample, std::size_t n, double* even_out,
                          double* odd_out)
{
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = first_sample + i;
        const auto w = philox4x32_10({slot_pair, static_cast<std::uint32_t>(s),
                                      static_cast<std::uint32_t>(s >> 32), purpose},
                                     key.k0, key.k1);
        even_out[i] = uniform_from_words(w[0], w[1]);
        odd_out[i] = uniform_from_words(w[2], w[3]);
    }
}

void philox_blocks(PhiloxKey key, const std::uint32_t ctr[4], std::size_t n, std::uint32_t* out)
{
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = philox4x32_10({ctr[0] + static_cast<std::uint32_t>(i), ctr[1], ctr[2], ctr[3]},
                                     key.k0, key.k1);
        for (int k = 0; k < 4; ++k) out[4 * i + k] = w[k];
    }
}

void exp_kernel(const double* x, std::size_t n, double* out)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = exp_ref(x[i]);
}

void log_kernel(const double* x, std::size_t n, double* out)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = log_ref(x[i]);
}

void power_law(const double* q, std::size_t n, double scale, double exponent, double* out)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * exp_ref(exponent * log_ref(q[i]));
}

std::uint64_t count_euclid(const double* const* coords, int dim, std::size_t n,
                           const double* center, double r2)
{
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double d = coords[k][i] - center[k];
            s = s + d * d;
        }
        count += s <= r2 ? 1 : 0;
    }
    return count;
}

std::uint64_t count_lq(const double* const* coords, int dim, std::size_t n, const double* center,
                       double q, double rq)
{
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double d = std::fabs(coords[k][i] - center[k]);
            s = s + exp_ref(q * log_ref(d));
        }
        count += s <= rq ? 1 : 0;
    }
    return count;
}

std::uint64_t count_koranyi(const double* x, const double* y, const double* z, std::size_t n,
                            const double* c, double r4)
{
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - c[0];
        const double dy = y[i] - c[1];
        const double dz = (z[i] - c[2]) - 0.5 * (c[0] * y[i] - c[1] * x[i]);
        const double h = dx * dx + dy * dy;
        const double g = h * h + 16.0 * (dz * dz);
        count += g <= r4 ? 1 : 0;
    }
    return count;
}

Moments moments(const double* w, std::size_t n)
{
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    double q[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t full = n - n % 4;
    for (std::size_t i = 0; i < full; i += 4) {
        for (int j = 0; j < 4; ++j) {
            s[j] = s[j] + w[i + j];
            q[j] = q[j] + w[i + j] * w[i + j];
        }
    }
    for (std::size_t i = full; i < n; ++i) {
        s[i - full] = s[i - full] + w[i];
        q[i - full] = q[i - full] + w[i] * w[i];
    }
    return {(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3])};
}

}  // namespace

const KernelTable& scalar_kernels()
{
    static const KernelTable table{
        "scalar",      philox_uniform_pairs, philox_blocks, exp_kernel,
        log_kernel,    power_law,            count_euclid,  count_lq,
        count_koranyi, moments,
    };
    return table;
}

}  // namespace nlab::simd
