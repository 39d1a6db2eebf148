#include "nlab/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nlab::simd {
namespace detail {
const KernelTable* avx2_table_if_built();
}

namespace {

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* pick(std::string_view name)
{
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2") return avx2_kernels();
    if (name == "auto" || name.empty()) {
        const KernelTable* v = avx2_kernels();
        return v ? v : &scalar_kernels();
    }
    return nullptr;
}

std::atomic<const KernelTable*>& active()
{
    static std::atomic<const KernelTable*> table{[] {
        const char* env = std::getenv("NLAB_SIMD");
        const KernelTable* t = pick(env ? std::string_view(env) : std::string_view("auto"));
        return t ? t : pick("auto");
    }()};
    return table;
}

}  // namespace

const KernelTable* avx2_kernels()
{
    static const KernelTable* t = cpu_has_avx2() ? detail::avx2_table_if_built() : nullptr;
    return t;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

bool set_backend(std::string_view name)
{
    const KernelTable* t = pick(name);
    if (!t) return false;
    active().store(t, std::memory_order_release);
    return true;
}

std::string_view backend_name() { return kernels().name; }

}  // namespace nlab::simd
