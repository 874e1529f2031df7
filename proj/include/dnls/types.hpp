#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// 64-byte aligned storage so FFTW plans made on scratch buffers can be
// executed on any field array with the new-array interface.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t kAlign{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RVec = std::vector<double>;

// Failure categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Config, Numerical, NonConvergence, Precondition };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

// Numerical aborts carry the simulation time at which they occurred.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double t) : Error(ErrorKind::Numerical, what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

class BoundaryTrip : public NumericalError {
public:
    BoundaryTrip(const std::string& what, double t, double fraction)
        : NumericalError(what, t), fraction_(fraction) {}
    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& what) : Error(ErrorKind::NonConvergence, what) {}
};

}  // namespace dnls
