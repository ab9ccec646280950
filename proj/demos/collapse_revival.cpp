// collapse_revival.cpp — inversion of a qubit in a coherent field, with and without intrinsic decoherence
//
// Prints the detected collapse window and first revival next to the
// revival-time estimate, then a coarse envelope table.

#include <cstdio>
#include <vector>

#include "cpbqed/cpbqed.hpp"

using namespace cpbqed;

int main() {
    const double nbar = 25.0;
    const auto qubit = QubitStateSpec::mixed(0.0);
    const auto field = FieldStateSpec::coherent_with_mean(nbar);
    const FockBasis basis = default_basis(field);
    const DensityMatrix rho0 = make_initial_state(qubit, field, basis);

    ModelParams p;
    const double t_rev = revival_time_estimate(p, nbar);
    const double period = rabi_period(p, nbar);
    std::printf("dim %zu, revival estimate %.2f, Rabi period %.3f\n", basis.dim(), t_rev, period);

    const double t_end = 1.3 * t_rev;
    const std::size_t samples = 6001;
    for (double gamma : {0.0, 0.001, 0.01}) {
        p.gamma = gamma;
        const Trajectory traj = Propagator::from_model(p, basis).bind(rho0);
        TimeSeries s{"inversion", {}, {}};
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = t_end * double(i) / double(samples - 1);
            s.times.push_back(t);
            s.values.push_back(inversion(traj.state_at(t)));
        }
        const auto env = running_envelope(s, period);
        const auto rep = detect_revival(s, env, {0.05, 0.3, 10.0 * period});
        std::printf("\ngamma %.3f\n", gamma);
        if (rep.sustained_collapse) std::printf("  collapse  [%.1f, %.1f]\n", *rep.collapse_start, *rep.collapse_end);
        if (rep.revival_time) std::printf("  revival   %.1f (%.0f%% of estimate)\n", *rep.revival_time, 100.0 * *rep.revival_time / t_rev);
        else std::printf("  no revival detected\n");
        std::printf("  peak near estimate %.3f\n", peak_in_window(s, 0.75 * t_rev, 1.25 * t_rev));
        for (std::size_t i = 0; i < samples; i += 500) std::printf("  t %7.1f  envelope %.3f\n", s.times[i], env[i]);
    }
}
