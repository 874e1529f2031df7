#include "dnls/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dnls/fft.hpp"

namespace dnls {

void SymbolF::validate() const {
    if (!(c2 > 0.0) || !std::isfinite(c2) || !std::isfinite(c1) || !std::isfinite(c0))
        throw ConfigError("symbol: c2 must be positive and all coefficients finite");
}

const char* to_string(Dissipativity d) {
    switch (d) {
        case Dissipativity::StrictlyDissipative: return "strictly-dissipative";
        case Dissipativity::DissipativeNonLarge: return "dissipative-non-large";
        case Dissipativity::Invalid: return "invalid";
    }
    return "invalid";
}

double dissipativity_threshold(double alpha, double lambda1) {
    return alpha * std::abs(lambda1) / (2.0 * std::sqrt(alpha + 1.0));
}

Dissipativity validate_params(const ModelParams& p) {
    if (!(p.alpha > 0.0 && p.alpha < 2.0) || !(p.lambda2 > 0.0) || !std::isfinite(p.lambda1) ||
        !std::isfinite(p.lambda2))
        return Dissipativity::Invalid;
    if (p.lambda2 >= dissipativity_threshold(p.alpha, p.lambda1))
        return Dissipativity::StrictlyDissipative;
    return Dissipativity::DissipativeNonLarge;
}

Grid1D::Grid1D(std::size_t n, double half_width) : n_(n), L_(half_width) {
    if (n < 2 || (n & (n - 1)) != 0) throw ConfigError("grid: n_points must be a power of two >= 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ConfigError("grid: half_width must be positive");
}

RVec Grid1D::xs() const {
    RVec out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
    return out;
}

RVec Grid1D::ks() const {
    RVec out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = k(j);
    return out;
}

Norms norms(std::span<const cplx> f, double dx) {
    if (f.empty()) throw PreconditionError("norms: empty field");
    double s = 0.0, m = 0.0;
    for (const auto& z : f) {
        const double a = std::norm(z);
        s += a;
        m = std::max(m, a);
    }
    return {std::sqrt(s * dx), std::sqrt(m)};
}

Norms norms(const Field& f) { return norms(f.values, f.grid.dx()); }
Norms norms(const ScaledField& f) { return norms(f.values, f.ygrid.dx()); }

double lp_power(std::span<const cplx> f, double dx, double p) {
    if (f.empty()) throw PreconditionError("norms: empty field");
    if (!(p >= 1.0)) throw PreconditionError("norms: p must be >= 1");
    double s = 0.0;
    const double half = 0.5 * p;
    for (const auto& z : f) {
        const double a = std::norm(z);
        if (a > 0.0) s += std::pow(a, half);
    }
    return s * dx;
}

double lp_norm(std::span<const cplx> f, double dx, double p) {
    return std::pow(lp_power(f, dx, p), 1.0 / p);
}

double weighted_l2(const Field& f, int m) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        const double w = std::pow(f.grid.x(j), m);
        s += w * w * std::norm(f.values[j]);
    }
    return std::sqrt(s * f.grid.dx());
}

bool all_finite(std::span<const cplx> f) {
    for (const auto& z : f)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

CVec apply_D(const Grid1D& g, std::span<const cplx> f) {
    const std::size_t n = g.size();
    if (f.size() != n) throw PreconditionError("apply_D: size mismatch");
    CVec out(f.begin(), f.end());
    const auto& plan = fft_plan(n);
    plan.forward(out);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] *= (j == g.nyquist_bin()) ? 0.0 : g.k(j) * inv;
    plan.inverse(out);
    return out;
}

namespace {

struct InitialBuilder {
    const Grid1D& grid;

    Field operator()(const GaussianIC& g) const {
        if (!(g.width > 0.0)) throw ConfigError("initial: gaussian width must be positive");
        Field f(grid, 0.0);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid.x(j);
            const double d = x - g.center;
            const double env = g.amplitude * std::exp(-d * d / (2.0 * g.width * g.width));
            f.values[j] = env * std::polar(1.0, g.chirp * d * d + g.velocity * x);
        }
        return f;
    }

    Field operator()(const SuperGaussianIC& g) const {
        if (!(g.width > 0.0) || g.order < 1)
            throw ConfigError("initial: supergaussian needs width > 0 and order >= 1");
        Field f(grid, 0.0);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double s = (grid.x(j) - g.center) / g.width;
            f.values[j] = g.amplitude * std::exp(-0.5 * std::pow(s * s, g.order));
        }
        return f;
    }

    Field operator()(const TwoBumpIC& g) const {
        if (!(g.width > 0.0)) throw ConfigError("initial: two-bump width must be positive");
        Field f(grid, 0.0);
        const double c = 0.5 * g.separation;
        const double w2 = 2.0 * g.width * g.width;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid.x(j);
            f.values[j] = g.amplitude1 * std::exp(-(x + c) * (x + c) / w2) +
                          g.amplitude2 * std::exp(-(x - c) * (x - c) / w2);
        }
        return f;
    }

    Field operator()(const FileIC& spec) const {
        Field f = read_field(spec.path);
        if (!(f.grid == grid)) {
            std::ostringstream os;
            os << "initial: file " << spec.path << " has grid (N=" << f.grid.size()
               << ", L=" << f.grid.half_width() << "), expected (N=" << grid.size()
               << ", L=" << grid.half_width() << ")";
            throw ConfigError(os.str());
        }
        f.t = 0.0;
        return f;
    }
};

}  // namespace

Field make_initial(const InitialSpec& spec, const Grid1D& grid) {
    return std::visit(InitialBuilder{grid}, spec);
}

double energy_bandwidth(const Field& f, double fraction) {
    const std::size_t n = f.grid.size();
    CVec hat = f.values;
    fft_plan(n).forward(hat);
    std::vector<std::pair<double, double>> spec(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        spec[j] = {std::abs(f.grid.k(j)), std::norm(hat[j])};
        total += spec[j].second;
    }
    if (total == 0.0) return 0.0;
    std::sort(spec.begin(), spec.end());
    double acc = 0.0;
    for (const auto& [k, e] : spec) {
        acc += e;
        if (acc >= fraction * total) return k;
    }
    return spec.back().first;
}

namespace {
constexpr char kMagic[8] = {'D', 'N', 'L', 'S', 'F', 'L', 'D', '1'};
}

void write_field_text(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("field file: cannot open " + path + " for writing");
    os.precision(17);
    os << "# dnls-field v1\n" << f.grid.size() << ' ' << f.grid.half_width() << ' ' << f.t << '\n';
    for (const auto& z : f.values) os << z.real() << ' ' << z.imag() << '\n';
    if (!os) throw ConfigError("field file: write failed for " + path);
}

void write_field_binary(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("field file: cannot open " + path + " for writing");
    const std::uint64_t n = f.grid.size();
    const double L = f.grid.half_width();
    os.write(kMagic, sizeof kMagic);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&L), sizeof L);
    os.write(reinterpret_cast<const char*>(&f.t), sizeof f.t);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!os) throw ConfigError("field file: write failed for " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("field file: cannot open " + path);
    char head[8] = {};
    is.read(head, sizeof head);
    if (is && std::memcmp(head, kMagic, sizeof kMagic) == 0) {
        std::uint64_t n = 0;
        double L = 0.0, t = 0.0;
        is.read(reinterpret_cast<char*>(&n), sizeof n);
        is.read(reinterpret_cast<char*>(&L), sizeof L);
        is.read(reinterpret_cast<char*>(&t), sizeof t);
        if (!is) throw ConfigError("field file: truncated header in " + path);
        Field f(Grid1D(static_cast<std::size_t>(n), L), t);
        is.read(reinterpret_cast<char*>(f.values.data()),
                static_cast<std::streamsize>(n * sizeof(cplx)));
        if (!is) throw ConfigError("field file: shape mismatch in " + path);
        return f;
    }
    is.clear();
    is.seekg(0);
    std::string line;
    std::getline(is, line);
    if (line.rfind("# dnls-field", 0) != 0) throw ConfigError("field file: bad header in " + path);
    std::size_t n = 0;
    double L = 0.0, t = 0.0;
    if (!(is >> n >> L >> t)) throw ConfigError("field file: bad size line in " + path);
    Field f(Grid1D(n, L), t);
    for (std::size_t j = 0; j < n; ++j) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im)) throw ConfigError("field file: shape mismatch in " + path);
        f.values[j] = {re, im};
    }
    double extra = 0.0;
    if (is >> extra) throw ConfigError("field file: shape mismatch (extra data) in " + path);
    return f;
}

}  // namespace dnls
