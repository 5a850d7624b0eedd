#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace sketchid::detail {

// Thin RAII layer over FFTW's batched real transforms. Planning is serialized
// because FFTW's planner is not reentrant; execution is.

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n) : n_(n), p_(static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)))) {
        if (!p_) throw std::bad_alloc();
    }
    T* get() noexcept { return p_.get(); }
    std::span<T> span() noexcept { return {p_.get(), n_}; }

private:
    std::size_t n_;
    std::unique_ptr<T, FftwDeleter> p_;
};

using RealBuffer = FftwBuffer<double>;
using ComplexBuffer = FftwBuffer<fftw_complex>;

/// `howmany` contiguous forward r2c transforms of length n (input stride n, output stride n/2+1).
void forward_real(std::size_t n, std::size_t howmany, RealBuffer& in, ComplexBuffer& out);

/// Inverse of forward_real, unnormalized (result is n times the original).
void inverse_real(std::size_t n, std::size_t howmany, ComplexBuffer& in, RealBuffer& out);

}  // namespace sketchid::detail
