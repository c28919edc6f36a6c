#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "semhash/kernels.hpp"

namespace semhash::kernels {
namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kX86 = true;
#else
constexpr bool kX86 = false;
#endif

const KernelTable* table_for(Isa isa) noexcept {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2) return &avx2_table();
#endif
    (void)isa;
    return &scalar_table();
}

const KernelTable* best_supported() noexcept {
    if (isa_supported(Isa::avx2)) return table_for(Isa::avx2);
    return &scalar_table();
}

const KernelTable* initial_table() noexcept {
    if (const char* env = std::getenv("SEMHASH_KERNELS")) {
        const std::string_view name(env);
        if (name == "scalar") return &scalar_table();
        if (name == "avx2" && isa_supported(Isa::avx2)) return table_for(Isa::avx2);
    }
    return best_supported();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__GNUC__) && (defined(__x86_64__) || defined(_M_X64))
            return kX86 && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
                   __builtin_cpu_supports("popcnt");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
    if (!isa_supported(isa)) {
        throw std::invalid_argument("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
    }
    current().store(table_for(isa), std::memory_order_release);
}

void select(std::string_view name) {
    if (name == "auto") {
        current().store(best_supported(), std::memory_order_release);
    } else if (name == "scalar") {
        select(Isa::scalar);
    } else if (name == "avx2") {
        select(Isa::avx2);
    } else {
        throw std::invalid_argument("unknown kernel set '" + std::string(name) + "' (auto|scalar|avx2)");
    }
}

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "?";
}

}  // namespace semhash::kernels
