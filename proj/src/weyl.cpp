#include "dnls/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnls/fft.hpp"

namespace dnls {

double bump_psi(double tau) {
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / tau);
    const double b = std::exp(-1.0 / (1.0 - tau));
    return a / (a + b);
}

double CutoffSpec::operator()(double s) const {
    if (identity) return 1.0;
    return bump_psi((r_outer - std::abs(s)) / (r_outer - r_inner));
}

void CutoffSpec::validate() const {
    if (identity) return;
    if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer))
        throw ConfigError("cutoff: need 0 < r_inner < r_outer");
}

Symbol lambda_cutoff_symbol(const CutoffSpec& g, const SymbolF& F, double h) {
    const double inv = 1.0 / std::sqrt(h);
    return [g, F, inv](double x, double xi) { return cplx(g((x + F.Fprime(xi)) * inv), 0.0); };
}

DenseOperator::DenseOperator(const Grid1D& g, double h)
    : grid_(g), h_(h), m_(g.size() * g.size(), cplx{}) {}

CVec DenseOperator::apply(std::span<const cplx> v) const {
    const std::size_t n = size();
    if (v.size() != n) throw PreconditionError("dense: size mismatch");
    CVec out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx s{};
        const cplx* row = &m_[j * n];
        for (std::size_t l = 0; l < n; ++l) s += row[l] * v[l];
        out[j] = s;
    }
    return out;
}

DenseOperator DenseOperator::operator*(const DenseOperator& o) const {
    if (!(grid_ == o.grid_)) throw PreconditionError("dense: grid mismatch");
    const std::size_t n = size();
    DenseOperator r(grid_, h_);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx a = (*this)(i, k);
            if (a == cplx{}) continue;
            const cplx* brow = &o.m_[k * n];
            cplx* rrow = &r.m_[i * n];
            for (std::size_t j = 0; j < n; ++j) rrow[j] += a * brow[j];
        }
    return r;
}

DenseOperator DenseOperator::operator-(const DenseOperator& o) const {
    if (!(grid_ == o.grid_)) throw PreconditionError("dense: grid mismatch");
    DenseOperator r(grid_, h_);
    for (std::size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i] - o.m_[i];
    return r;
}

double DenseOperator::frobenius() const {
    double s = 0.0;
    for (const auto& z : m_) s += std::norm(z);
    return std::sqrt(s);
}

DenseOperator weyl_dense(const Symbol& a, double h, const Grid1D& grid, const DenseOptions& opt) {
    const std::size_t n = grid.size();
    if (n > opt.cap) {
        std::ostringstream os;
        os << "weyl_dense: N=" << n << " exceeds the oracle cap " << opt.cap;
        throw PreconditionError(os.str());
    }
    if (!(h > 0.0 && h <= 1.0)) throw PreconditionError("weyl_dense: h must lie in (0, 1]");
    if (opt.xi_oversample < 1) throw PreconditionError("weyl_dense: xi_oversample must be >= 1");

    const std::size_t P = static_cast<std::size_t>(opt.xi_oversample);
    const std::size_t nq = n * P;
    const auto& plan = fft_plan(nq);
    const double dxi = h * grid.dk() / static_cast<double>(P);
    const double weight = 1.0 / static_cast<double>(nq);
    const long long half = static_cast<long long>(nq / 2);

    DenseOperator M(grid, h);
    CVec buf(nq);
    for (std::size_t s = 0; s + 1 < 2 * n; ++s) {
        const double mid = -grid.half_width() + 0.5 * static_cast<double>(s) * grid.dx();
        for (long long q = -half; q < half; ++q) {
            const std::size_t idx = static_cast<std::size_t>(q < 0 ? q + static_cast<long long>(nq) : q);
            buf[idx] = a(mid, static_cast<double>(q) * dxi);
        }
        plan.inverse(buf);
        const std::size_t jlo = s >= n ? s - n + 1 : 0;
        const std::size_t jhi = std::min(s, n - 1);
        for (std::size_t j = jlo; j <= jhi; ++j) {
            const std::size_t l = s - j;
            const long long d = static_cast<long long>(j) - static_cast<long long>(l);
            const std::size_t idx = static_cast<std::size_t>(d < 0 ? d + static_cast<long long>(nq) : d);
            M(j, l) = buf[idx] * weight;
        }
    }
    return M;
}

DenseOperator sharp_product_dense(const Symbol& a, const Symbol& b, double h, const Grid1D& grid,
                                  const DenseOptions& opt) {
    return weyl_dense(a, h, grid, opt) * weyl_dense(b, h, grid, opt);
}

namespace {

double chirp_phase(double y, double h, const SymbolF& F, double scale) {
    const double s = y + F.c1;
    return scale * s * s / (4.0 * F.c2 * h);
}

// Trigonometric interpolation onto a grid q times finer. The Nyquist bin is split evenly.
ScaledField refine(const ScaledField& v, std::size_t q) {
    const std::size_t n = v.ygrid.size(), nf = n * q;
    CVec c = v.values;
    fft_plan(n).forward(c);
    CVec b(nf, cplx{});
    const std::size_t half = n / 2;
    for (std::size_t j = 0; j < half; ++j) b[j] = c[j];
    for (std::size_t j = half + 1; j < n; ++j) b[nf - n + j] = c[j];
    b[half] = 0.5 * c[half];
    b[nf - half] = 0.5 * c[half];
    fft_plan(nf).inverse(b);
    ScaledField out(Grid1D(nf, v.ygrid.half_width()), v.t);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < nf; ++j) out.values[j] = b[j] * inv;
    return out;
}

// Samples a refined field at the nodes of `g`.
ScaledField coarsen(const ScaledField& fine, const Grid1D& g) {
    const std::size_t q = fine.ygrid.size() / g.size();
    ScaledField out(g, fine.t);
    for (std::size_t j = 0; j < g.size(); ++j) out.values[j] = fine.values[j * q];
    return out;
}

ChirpReport monitor_impl(const ScaledField& v, double h, const SymbolF& F, double tol, double scale) {
    ChirpReport rep;
    double vmax = 0.0;
    for (const auto& z : v.values) vmax = std::max(vmax, std::abs(z));
    if (vmax == 0.0) return rep;
    const double thr = tol * vmax;
    const std::size_t n = v.values.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (std::abs(v.values[j]) <= thr && std::abs(v.values[j + 1]) <= thr) continue;
        const double inc = std::abs(chirp_phase(v.ygrid.x(j + 1), h, F, scale) -
                                    chirp_phase(v.ygrid.x(j), h, F, scale));
        rep.max_increment = std::max(rep.max_increment, inc);
    }
    rep.resolved = rep.max_increment < kPi;
    return rep;
}

ScaledField filter_impl(const ScaledField& v, double h, const SymbolF& F, const CutoffSpec& g,
                        const FilterOptions& opt, bool complement) {
    g.validate();
    const Grid1D& yg = v.ygrid;
    const std::size_t n = yg.size();
    if (v.values.size() != n) throw PreconditionError("filter_fast: size mismatch");
    if (!(h > 0.0)) throw PreconditionError("filter_fast: h must be positive");
    if (g.identity) {
        ScaledField out(yg, v.t);
        if (!complement) out.values = v.values;
        return out;
    }
    if (opt.padding < 1 || (opt.padding & (opt.padding - 1)) != 0)
        throw PreconditionError("filter_fast: padding must be a power of two");
    if (opt.oversample < 1 || (opt.oversample & (opt.oversample - 1)) != 0)
        throw PreconditionError("filter_fast: oversample must be a power of two");
    if (opt.oversample > 1) {
        FilterOptions fine_opt = opt;
        fine_opt.oversample = 1;
        const ScaledField fine = filter_impl(refine(v, static_cast<std::size_t>(opt.oversample)), h, F, g,
                                             fine_opt, complement);
        return coarsen(fine, yg);
    }

    const ChirpReport rep = monitor_impl(v, h, F, opt.support_tol, opt.chirp_scale);
    if (!rep.resolved) {
        std::ostringstream os;
        os << "filter_fast: chirp phase increment " << rep.max_increment
           << " >= pi per cell at h=" << h << "; refine the scaled grid or shrink its box";
        throw NumericalError(os.str(), v.t);
    }

    const std::size_t P = static_cast<std::size_t>(opt.padding);
    const Grid1D pg(n * P, yg.half_width() * static_cast<double>(P));
    const std::size_t off = (P - 1) * n / 2;
    const std::size_t np = pg.size();

    CVec chirp(n);
    for (std::size_t j = 0; j < n; ++j)
        chirp[j] = std::polar(1.0, chirp_phase(yg.x(j), h, F, opt.chirp_scale));

    CVec buf(np, cplx{});
    for (std::size_t j = 0; j < n; ++j) buf[off + j] = chirp[j] * v.values[j];
    const auto& plan = fft_plan(np);
    plan.forward(buf);
    const double scale = 2.0 * F.c2 * std::sqrt(h);
    const double inv = 1.0 / static_cast<double>(np);
    for (std::size_t j = 0; j < np; ++j) {
        const double gm = g(scale * pg.k(j));
        buf[j] *= (complement ? 1.0 - gm : gm) * inv;
    }
    plan.inverse(buf);

    ScaledField out(yg, v.t);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = std::conj(chirp[j]) * buf[off + j];
    return out;
}

}  // namespace

ChirpReport chirp_monitor(const ScaledField& v, double h, const SymbolF& F, double support_tol) {
    return monitor_impl(v, h, F, support_tol, 1.0);
}

ScaledField filter_fast(const ScaledField& v, double h, const SymbolF& F, const CutoffSpec& g,
                        const FilterOptions& opt) {
    return filter_impl(v, h, F, g, opt, false);
}

ScaledField filter_fast_complement(const ScaledField& v, double h, const SymbolF& F,
                                   const CutoffSpec& g, const FilterOptions& opt) {
    return filter_impl(v, h, F, g, opt, true);
}

ScaledField vector_field_scaled_chirp(const ScaledField& v, double t, const SymbolF& F) {
    const Grid1D& yg = v.ygrid;
    const std::size_t n = yg.size();
    CVec chirp(n);
    CVec mv(n);
    for (std::size_t j = 0; j < n; ++j) {
        chirp[j] = std::polar(1.0, chirp_phase(yg.x(j), 1.0 / t, F, 1.0));
        mv[j] = chirp[j] * v.values[j];
    }
    const CVec d = apply_D(yg, mv);
    ScaledField out(yg, v.t);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = 2.0 * F.c2 * std::conj(chirp[j]) * d[j];
    return out;
}

ScaledField vector_field_scaled(const ScaledField& v, double t, const SymbolF& F, FormCheck* check,
                                double tol) {
    const Grid1D& yg = v.ygrid;
    const std::size_t n = yg.size();
    const CVec d = apply_D(yg, v.values);
    ScaledField out(yg, v.t);
    for (std::size_t j = 0; j < n; ++j)
        out.values[j] = (yg.x(j) + F.c1) * t * v.values[j] + 2.0 * F.c2 * d[j];
    if (check) {
        *check = FormCheck{};
        if (monitor_impl(v, 1.0 / t, F, 1e-12, 1.0).resolved) {
            const ScaledField alt = vector_field_scaled_chirp(v, t, F);
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                num += std::norm(out.values[j] - alt.values[j]);
                den += std::norm(out.values[j]);
            }
            check->performed = true;
            check->rel_diff = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
            if (check->rel_diff > tol) {
                std::ostringstream os;
                os << "vector_field_scaled: direct and chirp forms differ by " << check->rel_diff;
                throw NumericalError(os.str(), v.t);
            }
        }
    }
    return out;
}

}  // namespace dnls
