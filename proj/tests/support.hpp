#pragma once

#include <initializer_list>
#include <cmath>
#include <random>

#include "gslms/partition.hpp"

namespace testing {

inline gslms::Vector vec(std::initializer_list<double> xs) {
    gslms::Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

inline gslms::Vector random_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
    std::normal_distribution<double> nd(0.0, sd);
    gslms::Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) {
        x = nd(rng);
    }
    return v;
}

// bitwise comparison, NaN-safe enough for finite data
inline bool same_bits(const gslms::Vector& a, const gslms::Vector& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i] || std::signbit(a[i]) != std::signbit(b[i])) {
            return false;
        }
    }
    return true;
}

} // namespace testing
