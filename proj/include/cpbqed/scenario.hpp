// scenario.hpp — declarative run description, JSON config format and builtin scenarios
//
// Config format (format_version 1), JSON object:
//
//   format_version  1
//   name            string
//   model           { omega, qubit_splitting (null = k*omega), josephson_energy,
//                     mixing_angle | device {charging_energy, gate_charge, level_index, josephson},
//                     flux_amplitude, flux_ratio, photon_order, gamma, series_order,
//                     ordering "printed" | "coupling_first" }   all optional
//   qubit           { kind "mixed", theta | excited_weight } or { kind "pure", theta }
//   field           { kind "coherent", alpha [re, im] | mean_photons }
//                   { kind "thermal", mean_photons } or { kind "fock", n }
//   dim             Fock truncation (optional; automatic from the tail bound)
//   times           { t_max, samples }   samples uniformly on [0, t_max]
//   observables     subset of inversion, tangle, mutual_information, concurrence, wigner
//   cases           optional list of { name, gamma?, qubit?, field? } overriding the base
//   wigner_times    list of times (wigner observable)
//   wigner_grid     { half_width, points } (optional; default from the field amplitude)
//
// Unknown keys are rejected.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpbqed/errors.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/model.hpp"
#include "cpbqed/wigner.hpp"

namespace cpbqed {

inline constexpr int kScenarioFormatVersion = 1;

enum class Observable { inversion, tangle, mutual_information, concurrence, wigner };

inline const char* to_string(Observable o) {
    switch (o) {
    case Observable::inversion: return "inversion";
    case Observable::tangle: return "tangle";
    case Observable::mutual_information: return "mutual_information";
    case Observable::concurrence: return "concurrence";
    case Observable::wigner: return "wigner";
    }
    return "?";
}

inline Observable observable_from_string(const std::string& s) {
    for (Observable o : {Observable::inversion, Observable::tangle, Observable::mutual_information,
                         Observable::concurrence, Observable::wigner})
        if (s == to_string(o)) return o;
    throw ValidationError("unknown observable '" + s + "'");
}

struct ScenarioCase {
    std::string name;
    std::optional<double> gamma;
    std::optional<QubitStateSpec> qubit;
    std::optional<FieldStateSpec> field;
};

// One fully resolved case: what actually gets propagated.
struct ResolvedCase {
    std::string name;
    ModelParams model;
    QubitStateSpec qubit;
    FieldStateSpec field;
};

struct WignerGridRequest {
    double half_width = 0.0;
    std::size_t points = 201;
};

struct Scenario {
    std::string name = "scenario";
    ModelParams model;
    QubitStateSpec qubit;
    FieldStateSpec field;
    std::optional<std::size_t> dim;
    double t_max = 50.0;
    std::size_t samples = 2000;
    std::vector<Observable> observables;
    std::vector<ScenarioCase> cases;
    std::vector<double> wigner_times;
    std::optional<WignerGridRequest> wigner_grid;

    bool wants(Observable o) const {
        for (Observable x : observables)
            if (x == o) return true;
        return false;
    }

    bool has_series() const {
        for (Observable x : observables)
            if (x != Observable::wigner) return true;
        return false;
    }

    std::vector<ResolvedCase> resolved_cases() const {
        if (cases.empty()) return {{"main", model, qubit, field}};
        std::vector<ResolvedCase> out;
        for (const auto& c : cases) {
            ResolvedCase r{c.name, model, c.qubit.value_or(qubit), c.field.value_or(field)};
            if (c.gamma) r.model.gamma = *c.gamma;
            out.push_back(std::move(r));
        }
        return out;
    }

    // lambda t at sample i
    double time_at(std::size_t i) const { return t_max * double(i) / double(samples - 1); }

    void validate() const {
        if (observables.empty()) throw ValidationError("scenario '" + name + "': no observables requested");
        if (samples < 2) throw ValidationError("scenario '" + name + "': samples must be >= 2");
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("scenario '" + name + "': t_max must be > 0");
        std::set<Observable> seen;
        for (Observable o : observables)
            if (!seen.insert(o).second)
                throw ValidationError("scenario '" + name + "': observable '" + to_string(o) + "' listed twice");
        if (wants(Observable::wigner) && wigner_times.empty())
            throw ValidationError("scenario '" + name + "': wigner observable needs wigner_times");
        if (!wants(Observable::wigner) && !wigner_times.empty())
            throw ValidationError("scenario '" + name + "': wigner_times given without the wigner observable");
        for (double t : wigner_times)
            if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("scenario '" + name + "': bad wigner time");
        if (wigner_grid && (!(wigner_grid->half_width > 0.0) || wigner_grid->points < 2))
            throw ValidationError("scenario '" + name + "': bad wigner_grid");
        if (dim && *dim == 0) throw ValidationError("scenario '" + name + "': dim must be positive");

        std::set<std::string> names;
        for (const auto& c : cases) {
            if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos)
                throw ValidationError("scenario '" + name + "': case names must be nonempty without '/', '\\', ' '");
            if (!names.insert(c.name).second)
                throw ValidationError("scenario '" + name + "': duplicate case '" + c.name + "'");
        }
        for (const auto& rc : resolved_cases()) {
            rc.model.validate();
            if (wants(Observable::tangle) && !rc.field.is_pure())
                throw ValidationError("scenario '" + name + "', case '" + rc.name +
                                      "': tangle needs a pure field state (coherent or Fock)");
        }
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T get_as(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(where + "." + key + ": " + e.what());
    }
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (j.contains(key)) out = get_as<T>(j, key, where);
}

inline ModelParams parse_model(const json& j) {
    const std::string w = "model";
    reject_unknown(j, {"omega", "qubit_splitting", "josephson_energy", "mixing_angle", "device", "flux_amplitude",
                       "flux_ratio", "photon_order", "gamma", "series_order", "ordering"},
                   w);
    ModelParams p;
    read_opt(j, "omega", p.omega, w);
    if (j.contains("qubit_splitting") && !j.at("qubit_splitting").is_null())
        p.qubit_splitting = get_as<double>(j, "qubit_splitting", w);
    read_opt(j, "josephson_energy", p.josephson_energy, w);
    if (j.contains("mixing_angle") && j.contains("device"))
        throw ValidationError("model: give either mixing_angle or device, not both");
    read_opt(j, "mixing_angle", p.mixing_angle, w);
    if (j.contains("device")) {
        const json& d = j.at("device");
        reject_unknown(d, {"charging_energy", "gate_charge", "level_index", "josephson"}, "model.device");
        DeviceParams dev;
        read_opt(d, "charging_energy", dev.charging_energy, "model.device");
        read_opt(d, "gate_charge", dev.gate_charge, "model.device");
        read_opt(d, "level_index", dev.level_index, "model.device");
        read_opt(d, "josephson", dev.josephson, "model.device");
        p.mixing_angle = derive_mixing_angle(dev);
    }
    read_opt(j, "flux_amplitude", p.flux_amplitude, w);
    read_opt(j, "flux_ratio", p.flux_ratio, w);
    read_opt(j, "photon_order", p.photon_order, w);
    read_opt(j, "gamma", p.gamma, w);
    read_opt(j, "series_order", p.series_order, w);
    if (j.contains("ordering")) {
        const auto s = get_as<std::string>(j, "ordering", w);
        if (s == "printed") p.ordering = CouplingOrdering::printed;
        else if (s == "coupling_first") p.ordering = CouplingOrdering::coupling_first;
        else throw ValidationError("model.ordering: expected 'printed' or 'coupling_first'");
    }
    return p;
}

inline QubitStateSpec parse_qubit(const json& j, const std::string& w) {
    reject_unknown(j, {"kind", "theta", "excited_weight"}, w);
    const auto kind = get_as<std::string>(j, "kind", w);
    if (kind == "mixed") {
        if (j.contains("theta") == j.contains("excited_weight"))
            throw ValidationError(w + ": mixed qubit needs exactly one of theta, excited_weight");
        if (j.contains("theta")) return QubitStateSpec::mixed(get_as<double>(j, "theta", w));
        return QubitStateSpec::mixed_with_excited_weight(get_as<double>(j, "excited_weight", w));
    }
    if (kind == "pure") {
        if (j.contains("excited_weight")) throw ValidationError(w + ": pure qubit takes theta only");
        return QubitStateSpec::pure(get_as<double>(j, "theta", w));
    }
    throw ValidationError(w + ".kind: expected 'mixed' or 'pure'");
}

inline FieldStateSpec parse_field(const json& j, const std::string& w) {
    reject_unknown(j, {"kind", "alpha", "mean_photons", "n"}, w);
    const auto kind = get_as<std::string>(j, "kind", w);
    if (kind == "coherent") {
        if (j.contains("alpha") == j.contains("mean_photons") || j.contains("n"))
            throw ValidationError(w + ": coherent field needs exactly one of alpha, mean_photons");
        if (j.contains("mean_photons")) return FieldStateSpec::coherent_with_mean(get_as<double>(j, "mean_photons", w));
        const auto a = get_as<std::vector<double>>(j, "alpha", w);
        if (a.size() != 2) throw ValidationError(w + ".alpha: expected [re, im]");
        return FieldStateSpec::coherent({a[0], a[1]});
    }
    if (kind == "thermal") {
        if (j.contains("alpha") || j.contains("n")) throw ValidationError(w + ": thermal field takes mean_photons only");
        return FieldStateSpec::thermal(get_as<double>(j, "mean_photons", w));
    }
    if (kind == "fock") {
        if (j.contains("alpha") || j.contains("mean_photons")) throw ValidationError(w + ": fock field takes n only");
        const auto n = get_as<long long>(j, "n", w);
        if (n < 0) throw ValidationError(w + ".n must be nonnegative");
        return FieldStateSpec::fock(static_cast<std::size_t>(n));
    }
    throw ValidationError(w + ".kind: expected 'coherent', 'thermal' or 'fock'");
}

inline json model_to_json(const ModelParams& p) {
    return {{"omega", p.omega},
            {"qubit_splitting", p.splitting()},
            {"josephson_energy", p.josephson_energy},
            {"mixing_angle", p.mixing_angle},
            {"flux_amplitude", p.flux_amplitude},
            {"flux_ratio", p.flux_ratio},
            {"photon_order", p.photon_order},
            {"gamma", p.gamma},
            {"series_order", p.series_order},
            {"ordering", p.ordering == CouplingOrdering::printed ? "printed" : "coupling_first"}};
}

inline json qubit_to_json(const QubitStateSpec& q) {
    return {{"kind", q.is_pure() ? "pure" : "mixed"}, {"theta", q.theta}};
}

inline json field_to_json(const FieldStateSpec& f) {
    switch (f.kind) {
    case FieldStateSpec::Kind::coherent: return {{"kind", "coherent"}, {"alpha", {f.alpha.real(), f.alpha.imag()}}};
    case FieldStateSpec::Kind::thermal: return {{"kind", "thermal"}, {"mean_photons", f.nbar}};
    case FieldStateSpec::Kind::fock: return {{"kind", "fock"}, {"n", f.n}};
    }
    return {};
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
    using detail::get_as;
    detail::reject_unknown(j, {"format_version", "name", "model", "qubit", "field", "dim", "times", "observables",
                               "cases", "wigner_times", "wigner_grid"},
                           "scenario");
    const int version = get_as<int>(j, "format_version", "scenario");
    if (version != kScenarioFormatVersion)
        throw ValidationError("scenario.format_version " + std::to_string(version) + " not supported (expected 1)");

    Scenario s;
    detail::read_opt(j, "name", s.name, "scenario");
    if (j.contains("model")) s.model = detail::parse_model(j.at("model"));
    if (!j.contains("qubit") || !j.contains("field")) throw ValidationError("scenario: qubit and field are required");
    s.qubit = detail::parse_qubit(j.at("qubit"), "qubit");
    s.field = detail::parse_field(j.at("field"), "field");
    if (j.contains("dim")) {
        const auto d = get_as<long long>(j, "dim", "scenario");
        if (d <= 0) throw ValidationError("scenario.dim must be positive");
        s.dim = static_cast<std::size_t>(d);
    }
    if (j.contains("times")) {
        const auto& t = j.at("times");
        detail::reject_unknown(t, {"t_max", "samples"}, "times");
        detail::read_opt(t, "t_max", s.t_max, "times");
        if (t.contains("samples")) {
            const auto n = get_as<long long>(t, "samples", "times");
            if (n < 0) throw ValidationError("times.samples must be nonnegative");
            s.samples = static_cast<std::size_t>(n);
        }
    }
    for (const auto& o : get_as<std::vector<std::string>>(j, "observables", "scenario"))
        s.observables.push_back(observable_from_string(o));
    if (j.contains("cases")) {
        const auto& cs = j.at("cases");
        if (!cs.is_array()) throw ValidationError("scenario.cases: expected a list");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string w = "cases[" + std::to_string(i) + "]";
            detail::reject_unknown(cs[i], {"name", "gamma", "qubit", "field"}, w);
            ScenarioCase c;
            c.name = get_as<std::string>(cs[i], "name", w);
            if (cs[i].contains("gamma")) c.gamma = get_as<double>(cs[i], "gamma", w);
            if (cs[i].contains("qubit")) c.qubit = detail::parse_qubit(cs[i].at("qubit"), w + ".qubit");
            if (cs[i].contains("field")) c.field = detail::parse_field(cs[i].at("field"), w + ".field");
            s.cases.push_back(std::move(c));
        }
    }
    detail::read_opt(j, "wigner_times", s.wigner_times, "scenario");
    if (j.contains("wigner_grid")) {
        const auto& g = j.at("wigner_grid");
        detail::reject_unknown(g, {"half_width", "points"}, "wigner_grid");
        WignerGridRequest r;
        r.half_width = get_as<double>(g, "half_width", "wigner_grid");
        r.points = get_as<std::size_t>(g, "points", "wigner_grid");
        s.wigner_grid = r;
    }
    s.validate();
    return s;
}

inline Scenario parse_scenario_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["format_version"] = kScenarioFormatVersion;
    j["name"] = s.name;
    j["model"] = detail::model_to_json(s.model);
    j["qubit"] = detail::qubit_to_json(s.qubit);
    j["field"] = detail::field_to_json(s.field);
    if (s.dim) j["dim"] = *s.dim;
    j["times"] = {{"t_max", s.t_max}, {"samples", s.samples}};
    j["observables"] = nlohmann::json::array();
    for (Observable o : s.observables) j["observables"].push_back(to_string(o));
    if (!s.cases.empty()) {
        j["cases"] = nlohmann::json::array();
        for (const auto& c : s.cases) {
            nlohmann::json cj{{"name", c.name}};
            if (c.gamma) cj["gamma"] = *c.gamma;
            if (c.qubit) cj["qubit"] = detail::qubit_to_json(*c.qubit);
            if (c.field) cj["field"] = detail::field_to_json(*c.field);
            j["cases"].push_back(std::move(cj));
        }
    }
    if (!s.wigner_times.empty()) j["wigner_times"] = s.wigner_times;
    if (s.wigner_grid) j["wigner_grid"] = {{"half_width", s.wigner_grid->half_width}, {"points", s.wigner_grid->points}};
    return j;
}

// ---- builtins ---------------------------------------------------------------

namespace detail {

// Device point shared by every figure: phi = 0.1, xi = pi/2, E_J0 = 1, k = 1,
// resonance, omega = 1.
inline Scenario figure_base(std::string name) {
    Scenario s;
    s.name = std::move(name);
    s.model = ModelParams{};
    return s;
}

inline Scenario inversion_figure(std::string name, double theta, double gamma) {
    Scenario s = figure_base(std::move(name));
    s.model.gamma = gamma;
    s.qubit = QubitStateSpec::mixed(theta);
    s.field = FieldStateSpec::coherent_with_mean(25.0);
    s.t_max = 50.0;
    s.samples = 2000;
    s.observables = {Observable::inversion, Observable::tangle};
    return s;
}

inline Scenario correlation_figure(std::string name, double nbar, Observable what) {
    Scenario s = figure_base(std::move(name));
    s.qubit = QubitStateSpec::mixed_with_excited_weight(0.9);
    s.field = FieldStateSpec::coherent_with_mean(nbar);
    s.t_max = 50.0;
    s.samples = 501;
    s.observables = {what, Observable::inversion};
    s.cases = {{"gamma_0", 0.0, {}, {}}, {"gamma_0.1", 0.1, {}, {}}};
    return s;
}

inline Scenario wigner_figure(std::string name, std::vector<ScenarioCase> cases) {
    Scenario s = figure_base(std::move(name));
    s.qubit = QubitStateSpec::pure(pi / 2);
    s.field = FieldStateSpec::coherent({2.1, 0.0});
    s.t_max = 1.0;
    s.samples = 2;
    s.observables = {Observable::wigner};
    s.wigner_times = {0.0};
    s.cases = std::move(cases);
    return s;
}

} // namespace detail

inline std::vector<std::string> builtin_names() {
    return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig5a", "fig5b", "thermal"};
}

inline Scenario builtin_scenario(const std::string& name) {
    using namespace detail;
    Scenario s;
    if (name == "fig2a") s = inversion_figure(name, 0.0, 0.0);
    else if (name == "fig2b") s = inversion_figure(name, pi / 3, 0.0);
    else if (name == "fig2c") s = inversion_figure(name, 0.0, 0.001);
    else if (name == "fig3a") s = correlation_figure(name, 30.0, Observable::mutual_information);
    else if (name == "fig3b") s = correlation_figure(name, 0.5, Observable::mutual_information);
    else if (name == "fig4a") s = correlation_figure(name, 30.0, Observable::concurrence);
    else if (name == "fig4b") s = correlation_figure(name, 0.5, Observable::concurrence);
    else if (name == "fig5a") s = wigner_figure(name, {{"theta_pi_2", {}, QubitStateSpec::pure(pi / 2), {}}});
    else if (name == "fig5b") s = wigner_figure(name, {{"theta_0", {}, QubitStateSpec::pure(0.0), {}}});
    else if (name == "fig5")
        s = wigner_figure(name, {{"theta_pi_2", {}, QubitStateSpec::pure(pi / 2), {}},
                                 {"theta_0", {}, QubitStateSpec::pure(0.0), {}}});
    else if (name == "thermal") {
        s = figure_base(name);
        s.qubit = QubitStateSpec::mixed(0.0);
        s.field = FieldStateSpec::thermal(25.0);
        // Runs past 1.3 x the coherent-state revival estimate (about 359 here).
        s.t_max = 480.0;
        s.samples = 961;
        s.observables = {Observable::inversion, Observable::mutual_information};
    } else {
        throw ValidationError("unknown builtin scenario '" + name + "'");
    }
    s.validate();
    return s;
}

inline bool is_builtin(const std::string& name) {
    for (const auto& n : builtin_names())
        if (n == name) return true;
    return false;
}

// Builtin name or path to a JSON config file.
inline Scenario load_scenario(const std::string& name_or_path) {
    if (is_builtin(name_or_path)) return builtin_scenario(name_or_path);
    std::error_code ec;
    if (!std::filesystem::exists(name_or_path, ec))
        throw ValidationError("'" + name_or_path + "' is neither a builtin scenario nor an existing file");
    std::ifstream in(name_or_path);
    if (!in || !std::filesystem::is_regular_file(name_or_path, ec)) throw IoError("cannot open scenario file '" + name_or_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

} // namespace cpbqed
