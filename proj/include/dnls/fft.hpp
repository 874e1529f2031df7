#pragma once

#include <cstddef>
#include <memory>

#include "dnls/types.hpp"

namespace dnls {

// Complex 1D transform of fixed length backed by FFTW.
// Forward: X_k = sum_j x_j e^{-2 pi i jk/n}. Inverse is unnormalized.
// Plans are created once per size (FFTW_ESTIMATE, so results are
// reproducible run to run) and shared; execution is thread-safe.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }

    void forward(cplx* data) const;
    void inverse(cplx* data) const;
    void forward(CVec& v) const { forward(v.data()); }
    void inverse(CVec& v) const { inverse(v.data()); }

private:
    std::size_t n_;
    void* fwd_;
    void* inv_;
};

// Shared plan for size n.
const FftPlan& fft_plan(std::size_t n);

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace dnls
