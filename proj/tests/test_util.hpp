#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dnls/types.hpp"

namespace testutil {

inline double rel_l2(const dnls::CVec& a, const dnls::CVec& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += std::norm(a[j] - ref[j]);
        den += std::norm(ref[j]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double max_abs_diff(const dnls::CVec& a, const dnls::CVec& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

inline dnls::CVec random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    dnls::CVec v(n);
    for (auto& z : v) z = {nd(rng), nd(rng)};
    return v;
}

}  // namespace testutil
