#include "fft.hpp"

#include <mutex>

#include "sketchid/errors.hpp"

namespace sketchid::detail {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Plan {
    fftw_plan p = nullptr;
    ~Plan() {
        if (p) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(p);
        }
    }
};

}  // namespace

void forward_real(std::size_t n, std::size_t howmany, RealBuffer& in, ComplexBuffer& out) {
    if (n == 0 || howmany == 0) return;
    const int len = static_cast<int>(n);
    const int half = len / 2 + 1;
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.p = fftw_plan_many_dft_r2c(1, &len, static_cast<int>(howmany), in.get(), nullptr, 1, len, out.get(),
                                        nullptr, 1, half, FFTW_ESTIMATE);
    }
    if (!plan.p) throw NumericalError("fftw: r2c planning failed");
    fftw_execute_dft_r2c(plan.p, in.get(), out.get());
}

void inverse_real(std::size_t n, std::size_t howmany, ComplexBuffer& in, RealBuffer& out) {
    if (n == 0 || howmany == 0) return;
    const int len = static_cast<int>(n);
    const int half = len / 2 + 1;
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.p = fftw_plan_many_dft_c2r(1, &len, static_cast<int>(howmany), in.get(), nullptr, 1, half, out.get(),
                                        nullptr, 1, len, FFTW_ESTIMATE);
    }
    if (!plan.p) throw NumericalError("fftw: c2r planning failed");
    fftw_execute_dft_c2r(plan.p, in.get(), out.get());
}

}  // namespace sketchid::detail
