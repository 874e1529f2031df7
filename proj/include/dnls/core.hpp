#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "dnls/types.hpp"

namespace dnls {

// Quadratic dispersion symbol F(xi) = c2 xi^2 + c1 xi + c0, c2 > 0.
struct SymbolF {
    double c2 = 0.5;
    double c1 = 0.0;
    double c0 = 0.0;

    double F(double xi) const { return (c2 * xi + c1) * xi + c0; }
    double Fprime(double xi) const { return 2.0 * c2 * xi + c1; }
    // Phase function of the stationary point: x xi + F(xi) minimised over xi.
    double w(double x) const { return -(x + c1) * (x + c1) / (4.0 * c2) + c0; }

    void validate() const;
};

inline double eval_F(const SymbolF& f, double xi) { return f.F(xi); }
inline double eval_Fprime(const SymbolF& f, double xi) { return f.Fprime(xi); }
inline double eval_w(const SymbolF& f, double x) { return f.w(x); }

struct ModelParams {
    double alpha = 1.5;
    double lambda1 = 0.0;
    double lambda2 = 1.0;
};

enum class Dissipativity { StrictlyDissipative, DissipativeNonLarge, Invalid };

const char* to_string(Dissipativity d);

// Threshold alpha |lambda1| / (2 sqrt(alpha + 1)) of the large dissipation condition.
double dissipativity_threshold(double alpha, double lambda1);

Dissipativity validate_params(const ModelParams& p);

// Uniform periodic grid on [-L, L): x_j = -L + j dx.
class Grid1D {
public:
    Grid1D() = default;
    Grid1D(std::size_t n, double half_width);

    std::size_t size() const noexcept { return n_; }
    double half_width() const noexcept { return L_; }
    double dx() const noexcept { return 2.0 * L_ / static_cast<double>(n_); }
    double dk() const noexcept { return kPi / L_; }
    double x(std::size_t j) const noexcept { return -L_ + static_cast<double>(j) * dx(); }

    // Wavenumber of FFT bin j (natural FFTW order). The Nyquist bin maps to -N/2.
    double k(std::size_t j) const noexcept {
        const auto n = static_cast<long long>(n_);
        auto m = static_cast<long long>(j);
        if (m >= n / 2) m -= n;
        return static_cast<double>(m) * dk();
    }
    std::size_t nyquist_bin() const noexcept { return n_ / 2; }

    RVec xs() const;
    RVec ks() const;

    bool operator==(const Grid1D& o) const { return n_ == o.n_ && L_ == o.L_; }

private:
    std::size_t n_ = 0;
    double L_ = 0.0;
};

struct Field {
    Grid1D grid;
    double t = 0.0;
    CVec values;

    Field() = default;
    Field(const Grid1D& g, double time) : grid(g), t(time), values(g.size()) {}
};

// v(t, y) = sqrt(t) u(t, t y) on the scaled grid; h = 1/t.
struct ScaledField {
    Grid1D ygrid;
    double t = 1.0;
    CVec values;

    ScaledField() = default;
    ScaledField(const Grid1D& g, double time) : ygrid(g), t(time), values(g.size()) {}
    double h() const { return 1.0 / t; }
};

struct Norms {
    double l2 = 0.0;
    double linf = 0.0;
};

// Riemann sums on the grid: l2 = sqrt(sum |f|^2 dx), linf = max |f|.
Norms norms(std::span<const cplx> f, double dx);
Norms norms(const Field& f);
Norms norms(const ScaledField& f);
// (sum |f|^p dx)^{1/p}, p >= 1.
double lp_norm(std::span<const cplx> f, double dx, double p);
// sum |f|^p dx without the root.
double lp_power(std::span<const cplx> f, double dx, double p);
// Discrete H^{0,m} surrogate || x^m f ||_2.
double weighted_l2(const Field& f, int m);

bool all_finite(std::span<const cplx> f);

// Spectral D = -i d/dx on the periodic grid (Nyquist bin zeroed).
CVec apply_D(const Grid1D& g, std::span<const cplx> f);

// Initial data families.
struct GaussianIC {
    double amplitude = 1.0;
    double width = 1.0;
    double chirp = 0.0;     // u *= exp(i chirp (x - center)^2)
    double velocity = 0.0;  // u *= exp(i velocity x)
    double center = 0.0;
};
struct SuperGaussianIC {
    double amplitude = 1.0;
    double width = 1.0;
    int order = 2;  // exp(-((x-center)/width)^(2 order) / 2)
    double center = 0.0;
};
struct TwoBumpIC {
    double amplitude1 = 1.0;
    double amplitude2 = 1.0;
    double width = 1.0;
    double separation = 10.0;
};
struct FileIC {
    std::string path;
};

using InitialSpec = std::variant<GaussianIC, SuperGaussianIC, TwoBumpIC, FileIC>;

Field make_initial(const InitialSpec& spec, const Grid1D& grid);

// 99.9%-energy bandwidth of f: smallest k with sum_{|k_j| <= k} |f_hat|^2 >= 0.999 total.
double energy_bandwidth(const Field& f, double fraction = 0.999);

// Field files. Text layout:
//   # dnls-field v1
//   N L t
//   re im      (N lines)
// Binary layout: 8-byte magic "DNLSFLD1", uint64 N, double L, double t, then N (re, im) pairs.
void write_field_text(const std::string& path, const Field& f);
void write_field_binary(const std::string& path, const Field& f);
// Detects the layout from the leading bytes.
Field read_field(const std::string& path);

}  // namespace dnls
