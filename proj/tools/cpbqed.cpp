// cpbqed.cpp — command-line front end: run builtin or file scenarios and emit series
//
//   cpbqed --list-builtins
//   cpbqed show <scenario>
//   cpbqed run <scenario> [--out PREFIX] [--format csv|json] [--samples N] [--t-max X]
//                         [--dim N] [--threads N] [--check]
//
// Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 numerical-invariant failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cpbqed/cpbqed.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunArgs {
    std::string scenario;
    std::string out;
    std::string format = "csv";
    std::optional<std::size_t> samples;
    std::optional<double> t_max;
    std::optional<std::size_t> dim;
    std::size_t threads = 1;
    bool check = false;
};

void print_summary(const cpbqed::RunResult& r, std::ostream& os) {
    for (const auto& c : r.cases) {
        os << r.scenario.name << "/" << c.spec.name << ": dim " << c.fock_dim << ", "
           << c.invariants.samples_checked << " states checked, max trace defect "
           << cpbqed::format_double(c.invariants.max_trace_defect) << ", max hermiticity defect "
           << cpbqed::format_double(c.invariants.max_hermiticity_defect) << ", min eigenvalue "
           << cpbqed::format_double(c.invariants.min_eigenvalue);
        if (c.kraus_K_max) os << ", Kraus K " << *c.kraus_K_max;
        if (c.concurrence_zero_until) os << ", C = 0 until " << cpbqed::format_double(*c.concurrence_zero_until);
        os << '\n';
        for (const auto& w : c.wigner)
            if (w.grid.truncation_warning)
                os << "  warning: Wigner grid at t=" << cpbqed::format_double(w.t) << ": " << w.grid.warning << '\n';
    }
}

int do_run(const RunArgs& a) {
    cpbqed::Scenario s = cpbqed::load_scenario(a.scenario);
    if (a.samples) s.samples = *a.samples;
    if (a.t_max) s.t_max = *a.t_max;
    if (a.dim) s.dim = *a.dim;
    s.validate();

    const cpbqed::RunResult r = cpbqed::run_scenario(s, {a.threads});
    print_summary(r, std::cerr);

    if (a.check) {
        if (!r.invariants().ok()) {
            std::cerr << "invariant check failed\n";
            return kExitNumerical;
        }
        std::cerr << "invariants ok\n";
        return kExitOk;
    }

    const std::string prefix = a.out.empty() ? s.name : a.out;
    const auto format = a.format == "json" ? cpbqed::OutputFormat::json : cpbqed::OutputFormat::csv;
    for (const auto& path : cpbqed::emit(r, prefix, format)) std::cout << path << '\n';

    if (r.trace_failure()) {
        std::cerr << "trace defect " << cpbqed::format_double(r.invariants().max_trace_defect) << " exceeds 1e-8\n";
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooper-pair box + cavity simulator with intrinsic decoherence"};
    app.require_subcommand(0, 1);

    bool list_builtins = false;
    app.add_flag("--list-builtins", list_builtins, "List the builtin scenarios and exit");

    RunArgs run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario (builtin name or JSON file)");
    run_cmd->add_option("scenario", run.scenario, "Builtin name or path to a JSON scenario")->required();
    run_cmd->add_option("--out", run.out, "Output path prefix (default: scenario name)");
    run_cmd->add_option("--format", run.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--samples", run.samples, "Override the number of time samples");
    run_cmd->add_option("--t-max", run.t_max, "Override the final scaled time lambda t");
    run_cmd->add_option("--dim", run.dim, "Override the Fock truncation");
    run_cmd->add_option("--threads", run.threads, "Worker threads over time samples (0 = all cores)");
    run_cmd->add_flag("--check", run.check, "Check invariants only, emit nothing");

    std::string show_name;
    CLI::App* show_cmd = app.add_subcommand("show", "Print a scenario as a JSON config");
    show_cmd->add_option("scenario", show_name, "Builtin name or path to a JSON scenario")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (list_builtins) {
            for (const auto& n : cpbqed::builtin_names()) std::cout << n << '\n';
            return kExitOk;
        }
        if (*show_cmd) {
            std::cout << cpbqed::scenario_to_json(cpbqed::load_scenario(show_name)).dump(2) << '\n';
            return kExitOk;
        }
        if (*run_cmd) return do_run(run);
        std::cout << app.help();
        return kExitValidation;
    } catch (const cpbqed::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cpbqed::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const cpbqed::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}
