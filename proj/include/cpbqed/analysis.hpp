// analysis.hpp — collapse/revival bookkeeping on sampled inversion series

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/measures.hpp"
#include "cpbqed/model.hpp"

namespace cpbqed {

// Resonant block coupling for the excitation block anchored at photon n
// (the |e,n>, |g,n+k> coupling of the Hamiltonian), taken at real n.
inline double resonant_coupling(const ModelParams& p, double n) {
    const double arg = p.ordering == CouplingOrdering::printed ? n + p.photon_order : n;
    return std::abs(std::cos(2.0 * p.mixing_angle) * p.josephson_energy * coupling_g(p, arg));
}

// 2 pi sqrt(nbar) / gbar with gbar the resonant block coupling at nbar
inline double revival_time_estimate(const ModelParams& p, double nbar) {
    const double g = resonant_coupling(p, nbar);
    if (!(g > 0.0)) throw DegenerateError("vanishing block coupling; no revival time");
    return 2.0 * pi * std::sqrt(nbar) / g;
}

// Rabi period 2 pi / (2 kappa) of the block at nbar, kappa = gbar sqrt(nbar + 1)
inline double rabi_period(const ModelParams& p, double nbar) {
    const double kappa = resonant_coupling(p, nbar) * std::sqrt(nbar + p.photon_order);
    if (!(kappa > 0.0)) throw DegenerateError("vanishing block coupling; no Rabi period");
    return pi / kappa;
}

// Running max of |values| over a centered window of +-half_width in time.
inline std::vector<double> running_envelope(const TimeSeries& s, double half_width) {
    s.validate();
    const std::size_t n = s.times.size();
    std::vector<double> env(n, 0.0);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (s.times[i] - s.times[lo] > half_width) ++lo;
        while (hi + 1 < n && s.times[hi + 1] - s.times[i] <= half_width) ++hi;
        double m = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) m = std::max(m, std::abs(s.values[j]));
        env[i] = m;
    }
    return env;
}

struct RevivalThresholds {
    double collapse_level = 0.05;
    double revival_level = 0.3;
    double min_collapse_duration = 0.0;  // in time units
};

struct RevivalReport {
    std::optional<double> collapse_start;  // envelope first below collapse_level
    std::optional<double> collapse_end;    // end of the first sustained collapse window
    std::optional<double> revival_time;    // first re-exceed of revival_level after the collapse
    bool sustained_collapse = false;
};

// Collapse: first stretch with envelope < collapse_level lasting at least
// min_collapse_duration. Revival: first later sample with envelope >
// revival_level.
inline RevivalReport detect_revival(const TimeSeries& s, const std::vector<double>& env, const RevivalThresholds& th) {
    RevivalReport r;
    const std::size_t n = env.size();
    std::size_t i = 0;
    while (i < n) {
        while (i < n && env[i] >= th.collapse_level) ++i;
        if (i == n) break;
        const std::size_t start = i;
        while (i < n && env[i] < th.collapse_level) ++i;
        const double stop = s.times[i - 1];
        if (!r.collapse_start) r.collapse_start = s.times[start];
        if (stop - s.times[start] >= th.min_collapse_duration) {
            r.collapse_start = s.times[start];
            r.collapse_end = stop;
            r.sustained_collapse = true;
            for (std::size_t j = i; j < n; ++j) {
                if (env[j] > th.revival_level) {
                    r.revival_time = s.times[j];
                    break;
                }
            }
            break;
        }
    }
    return r;
}

// Largest |value| with time in [t_lo, t_hi]; 0 when the window is empty.
inline double peak_in_window(const TimeSeries& s, double t_lo, double t_hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= t_lo && s.times[i] <= t_hi) m = std::max(m, std::abs(s.values[i]));
    return m;
}

} // namespace cpbqed
