// runner.hpp — run a Scenario: propagate, sample observables, check invariants, emit files

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cpbqed/errors.hpp"
#include "cpbqed/evolve.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/measures.hpp"
#include "cpbqed/model.hpp"
#include "cpbqed/scenario.hpp"
#include "cpbqed/wigner.hpp"

namespace cpbqed {

inline constexpr const char* kVersion = "1.0.0";

// Hard limit: a run whose trace drifts further than this is a failure.
inline constexpr double kRunTraceLimit = 1e-8;

struct RunOptions {
    std::size_t threads = 1;  // 0 = hardware concurrency
};

struct InvariantSummary {
    std::size_t samples_checked = 0;
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();

    void add(const InvariantReport& r) {
        ++samples_checked;
        max_trace_defect = std::max(max_trace_defect, r.trace_defect);
        max_hermiticity_defect = std::max(max_hermiticity_defect, r.hermiticity_defect);
        min_eigenvalue = std::min(min_eigenvalue, r.min_eigenvalue);
    }
    bool ok() const {
        return InvariantReport{max_trace_defect, max_hermiticity_defect, min_eigenvalue}.ok();
    }
};

struct WignerResult {
    double t = 0.0;
    WignerGrid grid;
    double negativity = 0.0;
};

struct CaseResult {
    ResolvedCase spec;
    std::size_t fock_dim = 0;
    std::vector<TimeSeries> series;  // scenario order, wigner excluded
    std::vector<WignerResult> wigner;
    InvariantSummary invariants;
    std::optional<std::size_t> kraus_K_max;
    std::optional<double> max_mutual_information;
    std::optional<double> min_projection_weight;
    std::optional<double> concurrence_zero_until;  // last t of the initial C < 1e-6 stretch

    const TimeSeries* find(Observable o) const {
        for (const auto& s : series)
            if (s.label == to_string(o)) return &s;
        return nullptr;
    }
};

struct RunResult {
    Scenario scenario;
    std::vector<CaseResult> cases;

    InvariantSummary invariants() const {
        InvariantSummary all;
        for (const auto& c : cases) {
            all.samples_checked += c.invariants.samples_checked;
            all.max_trace_defect = std::max(all.max_trace_defect, c.invariants.max_trace_defect);
            all.max_hermiticity_defect = std::max(all.max_hermiticity_defect, c.invariants.max_hermiticity_defect);
            all.min_eigenvalue = std::min(all.min_eigenvalue, c.invariants.min_eigenvalue);
        }
        return all;
    }
    bool trace_failure() const { return invariants().max_trace_defect > kRunTraceLimit; }

    const CaseResult& find_case(const std::string& name) const {
        for (const auto& c : cases)
            if (c.spec.name == name) return c;
        throw ValidationError("no case '" + name + "' in run of '" + scenario.name + "'");
    }
};

namespace detail {

// Runs body(i) for i in [0, n). Each index is handled exactly once; results
// must be written to per-index slots so the outcome does not depend on the
// thread count. The exception of the lowest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct SampleRecord {
    std::vector<double> values;
    InvariantReport report;
    std::size_t kraus_K = 0;
    double projection_weight = 0.0;
};

inline FockBasis case_basis(const Scenario& s, const ResolvedCase& c) {
    return s.dim ? FockBasis(*s.dim) : default_basis(c.field, c.model.photon_order);
}

inline GridSpec case_grid(const Scenario& s, const ResolvedCase& c) {
    if (s.wigner_grid) return GridSpec::centered(s.wigner_grid->half_width, s.wigner_grid->points);
    return GridSpec::centered(std::sqrt(2.0 * c.field.mean_photons()) + 5.0, 201);
}

inline CaseResult run_case(const Scenario& s, const ResolvedCase& c, const RunOptions& opt) {
    CaseResult out;
    out.spec = c;
    const FockBasis basis = case_basis(s, c);
    out.fock_dim = basis.dim();
    const Propagator prop = Propagator::from_model(c.model, basis);
    const Trajectory traj = prop.bind(make_initial_state(c.qubit, c.field, basis));

    std::vector<Observable> series_obs;
    for (Observable o : s.observables)
        if (o != Observable::wigner) series_obs.push_back(o);

    if (!series_obs.empty()) {
        std::vector<SampleRecord> rec(s.samples);
        parallel_for(s.samples, opt.threads, [&](std::size_t i) {
            const double t = s.time_at(i);
            const DensityMatrix rho = traj.state_at(t);
            const RealVector spectrum = rho.spectrum();
            SampleRecord& r = rec[i];
            r.report = rho.check(spectrum);
            for (Observable o : series_obs) {
                switch (o) {
                case Observable::inversion: r.values.push_back(inversion(rho)); break;
                case Observable::mutual_information: r.values.push_back(mutual_information(rho, &spectrum)); break;
                case Observable::concurrence: {
                    const EffectiveTwoQubitBasis eb = effective_basis(rho);
                    r.projection_weight = eb.projection_weight;
                    r.values.push_back(concurrence(rho, eb));
                    break;
                }
                case Observable::tangle: {
                    const BranchEnsemble ens = prop.ensemble_branches(c.qubit, c.field, t);
                    r.kraus_K = ens.truncation_K;
                    r.values.push_back(tangle(ens));
                    break;
                }
                case Observable::wigner: break;
                }
            }
        });

        for (std::size_t k = 0; k < series_obs.size(); ++k) {
            TimeSeries ts{to_string(series_obs[k]), {}, {}};
            for (std::size_t i = 0; i < s.samples; ++i) {
                ts.times.push_back(s.time_at(i));
                ts.values.push_back(rec[i].values[k]);
            }
            out.series.push_back(std::move(ts));
        }
        for (const auto& r : rec) out.invariants.add(r.report);

        if (s.wants(Observable::tangle)) {
            std::size_t kmax = 0;
            for (const auto& r : rec) kmax = std::max(kmax, r.kraus_K);
            out.kraus_K_max = kmax;
        }
        if (const TimeSeries* mi = out.find(Observable::mutual_information))
            out.max_mutual_information = *std::max_element(mi->values.begin(), mi->values.end());
        if (const TimeSeries* cs = out.find(Observable::concurrence)) {
            double w = 1.0;
            for (const auto& r : rec) w = std::min(w, r.projection_weight);
            out.min_projection_weight = w;
            for (std::size_t i = 0; i < cs->values.size() && cs->values[i] < 1e-6; ++i)
                out.concurrence_zero_until = cs->times[i];
        }
        for (const auto& ts : out.series) ts.validate();
    }

    if (s.wants(Observable::wigner)) {
        const GridSpec grid = case_grid(s, c);
        for (double t : s.wigner_times) {
            const DensityMatrix rho = traj.state_at(t);
            out.invariants.add(rho.check());
            WignerResult w{t, field_wigner(rho, grid), 0.0};
            w.negativity = negativity_volume(w.grid);
            out.wigner.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace detail

inline RunResult run_scenario(const Scenario& s, const RunOptions& opt = {}) {
    s.validate();
    RunResult result{s, {}};
    for (const auto& c : s.resolved_cases()) {
        try {
            result.cases.push_back(detail::run_case(s, c, opt));
        } catch (const TruncationError& e) {
            throw TruncationError("scenario '" + s.name + "', case '" + c.name + "': " + e.what());
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("scenario '" + s.name + "', case '" + c.name + "': " + e.what());
        }
    }
    return result;
}

// ---- emission ---------------------------------------------------------------

enum class OutputFormat { csv, json };

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline nlohmann::json manifest_json(const RunResult& r) {
    using nlohmann::json;
    auto nullable = [](const auto& opt) { return opt ? json(*opt) : json(nullptr); };
    json m;
    m["format_version"] = kScenarioFormatVersion;
    m["generator"] = std::string("cpbqed ") + kVersion;
    m["scenario"] = scenario_to_json(r.scenario);
    m["cases"] = json::array();
    for (const auto& c : r.cases) {
        json cj;
        cj["name"] = c.spec.name;
        cj["model"] = detail::model_to_json(c.spec.model);
        cj["qubit"] = detail::qubit_to_json(c.spec.qubit);
        cj["field"] = detail::field_to_json(c.spec.field);
        cj["fock_dim"] = c.fock_dim;
        cj["series_order"] = c.spec.model.series_order;
        cj["kraus_K_max"] = nullable(c.kraus_K_max);
        cj["invariants"] = {{"samples_checked", c.invariants.samples_checked},
                            {"max_trace_defect", c.invariants.max_trace_defect},
                            {"max_hermiticity_defect", c.invariants.max_hermiticity_defect},
                            {"min_eigenvalue", c.invariants.min_eigenvalue},
                            {"ok", c.invariants.ok()}};
        cj["max_mutual_information"] = nullable(c.max_mutual_information);
        if (c.find(Observable::concurrence))
            cj["concurrence"] = {{"zero_until", nullable(c.concurrence_zero_until)},
                                 {"min_projection_weight", nullable(c.min_projection_weight)}};
        cj["wigner"] = json::array();
        for (const auto& w : c.wigner)
            cj["wigner"].push_back({{"t", w.t},
                                    {"nx", w.grid.spec.nx},
                                    {"np", w.grid.spec.np},
                                    {"x_range", {w.grid.spec.x_min, w.grid.spec.x_max}},
                                    {"p_range", {w.grid.spec.p_min, w.grid.spec.p_max}},
                                    {"normalization_defect", w.grid.normalization_defect},
                                    {"max_imag_residue", w.grid.max_imag_residue},
                                    {"negativity_volume", w.negativity},
                                    {"truncation_warning", w.grid.truncation_warning}});
        m["cases"].push_back(std::move(cj));
    }
    m["status"] = r.trace_failure() ? "trace_defect_exceeded" : (r.invariants().ok() ? "ok" : "invariant_warning");
    return m;
}

inline nlohmann::json result_json(const RunResult& r) {
    nlohmann::json j = manifest_json(r);
    for (std::size_t i = 0; i < r.cases.size(); ++i) {
        const auto& c = r.cases[i];
        auto& cj = j["cases"][i];
        cj["series"] = nlohmann::json::object();
        for (const auto& s : c.series) cj["series"][s.label] = {{"lambda_t", s.times}, {"values", s.values}};
        for (std::size_t k = 0; k < c.wigner.size(); ++k) {
            const auto& g = c.wigner[k].grid;
            std::vector<std::vector<double>> rows(g.spec.nx);
            for (std::size_t a = 0; a < g.spec.nx; ++a)
                for (std::size_t b = 0; b < g.spec.np; ++b)
                    rows[a].push_back(g.values(static_cast<Index>(a), static_cast<Index>(b)));
            cj["wigner"][k]["values"] = std::move(rows);  // values[i][j] = W(x_i, p_j)
        }
    }
    return j;
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

inline void close_output(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw IoError("error writing '" + path + "'");
}

inline std::string wigner_file_suffix(double t) { return "wigner.t" + format_double(t); }

} // namespace detail

// Writes the run under `prefix` and returns the paths written, in order.
//   csv:  <prefix>.<case>.<observable>.csv, <prefix>.<case>.wigner.t<t>.csv, <prefix>.manifest.json
//   json: <prefix>.json
inline std::vector<std::string> emit(const RunResult& r, const std::string& prefix, OutputFormat format) {
    std::vector<std::string> written;
    if (format == OutputFormat::json) {
        const std::string path = prefix + ".json";
        auto out = detail::open_output(path);
        out << result_json(r).dump(2) << '\n';
        detail::close_output(out, path);
        written.push_back(path);
        return written;
    }
    for (const auto& c : r.cases) {
        for (const auto& s : c.series) {
            const std::string path = prefix + "." + c.spec.name + "." + s.label + ".csv";
            auto out = detail::open_output(path);
            out << "lambda_t," << s.label << '\n';
            for (std::size_t i = 0; i < s.times.size(); ++i)
                out << format_double(s.times[i]) << ',' << format_double(s.values[i]) << '\n';
            detail::close_output(out, path);
            written.push_back(path);
        }
        for (const auto& w : c.wigner) {
            const std::string path = prefix + "." + c.spec.name + "." + detail::wigner_file_suffix(w.t) + ".csv";
            auto out = detail::open_output(path);
            out << "x,p,w\n";
            const GridSpec& g = w.grid.spec;
            for (std::size_t a = 0; a < g.nx; ++a)
                for (std::size_t b = 0; b < g.np; ++b)
                    out << format_double(g.x(a)) << ',' << format_double(g.p(b)) << ','
                        << format_double(w.grid.values(static_cast<Index>(a), static_cast<Index>(b))) << '\n';
            detail::close_output(out, path);
            written.push_back(path);
        }
    }
    const std::string path = prefix + ".manifest.json";
    auto out = detail::open_output(path);
    out << manifest_json(r).dump(2) << '\n';
    detail::close_output(out, path);
    written.push_back(path);
    return written;
}

} // namespace cpbqed
