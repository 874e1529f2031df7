#include "dnls/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dnls/types.hpp"

namespace dnls {

SlopeFit loglog_fit(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw PreconditionError("fit: size mismatch");
    if (t.size() < 2) throw PreconditionError("fit: need at least two points");
    const std::size_t n = t.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(t[i] > 0.0) || !(y[i] > 0.0))
            throw PreconditionError("fit: non-positive value at t=" + std::to_string(t[i]));
        lx[i] = std::log(t[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw PreconditionError("fit: degenerate abscissae");
    SlopeFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    std::vector<double> pair;
    pair.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (lx[j] != lx[i]) pair.push_back((ly[j] - ly[i]) / (lx[j] - lx[i]));
    std::sort(pair.begin(), pair.end());
    const std::size_t m = pair.size();
    fit.theil_sen = (m % 2 == 1) ? pair[m / 2] : 0.5 * (pair[m / 2 - 1] + pair[m / 2]);
    return fit;
}

SlopeFit loglog_fit_window(std::span<const double> t, std::span<const double> y, double t_lo,
                           double t_hi, std::size_t min_points) {
    std::vector<double> tw, yw;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_lo * (1.0 - 1e-12) && t[i] <= t_hi * (1.0 + 1e-12)) {
            tw.push_back(t[i]);
            yw.push_back(y[i]);
        }
    }
    if (tw.size() < min_points)
        throw PreconditionError("fit: only " + std::to_string(tw.size()) +
                                " points in window, need " + std::to_string(min_points));
    return loglog_fit(tw, yw);
}

}  // namespace dnls
