#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "phrase.hpp"

namespace lzap {

struct LengthSchedule {
    std::vector<std::uint64_t> lengths;
    double step = 1.0; // n^eps as used by shrink

    std::size_t size() const { return lengths.size(); }
    bool empty() const { return lengths.empty(); }
    std::uint64_t operator[](std::size_t i) const { return lengths[i]; }
};

namespace detail {

// Ceiling that ignores floating-point noise around exact integers, so that
// e.g. 12 * (1 - 1/4) is 9 even when n^eps comes out as 4 + 1ulp.
inline double stable_ceil(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
        return r;
    }
    return std::ceil(x);
}

} // namespace detail

// f(ell) = min(ceil(ell * (1 - 1/step)), ell - 1) with the captured step = n^eps.
inline std::uint64_t shrink(std::uint64_t ell, double step) {
    if (ell < 2) {
        throw std::invalid_argument("shrink requires ell >= 2");
    }
    const double scaled = detail::stable_ceil(static_cast<double>(ell) * (1.0 - 1.0 / step));
    const auto reduced = scaled < 1.0 ? std::uint64_t{1} : static_cast<std::uint64_t>(scaled);
    return std::max<std::uint64_t>(1, std::min(reduced, ell - 1));
}

inline std::uint64_t shrink(std::uint64_t ell, const Params& params) {
    if (params.n < 2) {
        throw std::invalid_argument("shrink requires n >= 2");
    }
    return shrink(ell, params.step());
}

inline LengthSchedule build_schedule(const Params& params) {
    params.validate();
    LengthSchedule schedule;
    if (params.n == 0) {
        return schedule;
    }
    schedule.step = params.n >= 2 ? params.step() : 1.0;
    std::uint64_t ell = params.n;
    schedule.lengths.push_back(ell);
    while (ell > 1) {
        ell = shrink(ell, schedule.step);
        schedule.lengths.push_back(ell);
    }
    return schedule;
}

// Upper envelope for the schedule length: ceil(n^eps * ln n) + n^eps + 2.
inline double schedule_length_bound(std::uint64_t n, double step) {
    if (n < 2) {
        return 3.0;
    }
    return std::ceil(step * std::log(static_cast<double>(n))) + step + 2.0;
}

} // namespace lzap
