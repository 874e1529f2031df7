#include "dnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace dnls {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), fwd_(nullptr), inv_(nullptr) {
    if (n == 0) throw PreconditionError("fft: zero length");
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* buf = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!fwd_ || !inv_) throw PreconditionError("fft: planner failed");
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void FftPlan::forward(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void FftPlan::inverse(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(inv_), p, p);
}

const FftPlan& fft_plan(std::size_t n) {
    static std::mutex m;
    static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlan>(n);
    return *slot;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace dnls
