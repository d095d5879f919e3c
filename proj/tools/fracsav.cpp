// fracsav: coefficient dumps, symbol certificates, single runs and
// convergence studies for the BDF6 SAV time-fractional Allen-Cahn solver.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracsav/harness.hpp"

namespace fs = std::filesystem;
using namespace fracsav;

namespace {

constexpr int kUsageError = 1;
constexpr int kNumericalFailure = 2;

std::vector<double> parse_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    for (const auto& s : items) out.push_back(parse_real(s));
    return out;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

/// Writes to stdout when path is "-" or empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    auto out = open_output(path);
    fn(out);
}

struct RunOptions {
    std::string config_file;
    std::string alpha, tau, t_final, mode, c0_shift, coupling;
    std::size_t modes = 0;
    std::string out;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config_file, "flat key = value config file");
    cmd->add_option("--alpha", o.alpha, "fractional order in (0, 1]");
    cmd->add_option("--tau", o.tau, "time step, e.g. 0.005 or 1/200");
    cmd->add_option("--t-final", o.t_final, "final time");
    cmd->add_option("--modes", o.modes, "number of Legendre modes");
    cmd->add_option("--mode", o.mode, "unforced | manufactured");
    cmd->add_option("--c0-shift", o.c0_shift, "energy shift C0 >= 0");
    cmd->add_option("--forcing-coupling", o.coupling, "none | power");
    cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve_config(const RunOptions& o) {
    RunConfig config;
    if (!o.config_file.empty()) load_config(config, fs::path(o.config_file));
    if (!o.alpha.empty()) apply_config_value(config, "alpha", o.alpha);
    if (!o.tau.empty()) apply_config_value(config, "tau", o.tau);
    if (!o.t_final.empty()) apply_config_value(config, "t_final", o.t_final);
    if (o.modes) config.n_modes = o.modes;
    if (!o.mode.empty()) apply_config_value(config, "mode", o.mode);
    if (!o.c0_shift.empty()) apply_config_value(config, "c0_shift", o.c0_shift);
    if (!o.coupling.empty()) apply_config_value(config, "forcing_coupling", o.coupling);
    if (!o.out.empty()) config.output_dir = o.out;
    return config;
}

int cmd_coeffs(const std::string& alpha, std::size_t n_max, const std::string& out) {
    const double a = parse_real(alpha);
    with_output(out, [&](std::ostream& os) { write_coeffs_csv(os, a, n_max); });
    return 0;
}

int cmd_symbol_check(const std::vector<std::string>& alphas, std::size_t grid, const std::string& out) {
    nlohmann::json certs = nlohmann::json::array();
    bool all_pass = true;
    for (double a : parse_list(alphas)) {
        const SymbolCertificate cert = verify_positive_real(a, grid);
        all_pass = all_pass && cert.pass;
        certs.push_back(to_json(cert));
    }
    with_output(out, [&](std::ostream& os) { os << certs.dump(2) << '\n'; });
    if (!all_pass) std::cerr << "symbol-check: at least one certificate failed\n";
    return all_pass ? 0 : kNumericalFailure;
}

int cmd_solve(const RunConfig& config) {
    const SolveOutcome outcome = solve(config);
    const SavState& state = outcome.result.state;
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    {
        auto os = open_output(dir / "diagnostics.csv");
        write_diagnostics_csv(os, state.diagnostics);
    }
    {
        auto os = open_output(dir / "field.csv");
        write_field_csv(os, state.u);
    }
    std::cout << "steps " << state.step << ", t = " << state.t() << ", r = " << state.r
              << ", xi = " << state.xi << '\n';

    int status = 0;
    if (outcome.result.errors) {
        const ErrorReport& e = *outcome.result.errors;
        auto os = open_output(dir / "errors.json");
        os << to_json(e).dump(2) << '\n';
        std::cout << "l_inf error " << format_real(e.linf) << ", discrete L2 error "
                  << format_real(e.l2) << '\n';
    }
    if (outcome.verdict) {
        const StabilityVerdict& v = *outcome.verdict;
        auto os = open_output(dir / "stability.json");
        os << to_json(v).dump(2) << '\n';
        std::cout << "stability " << (v.pass ? "PASS" : "FAIL") << " (r monotone "
                  << (v.r_monotone ? "yes" : "no") << ", K < 0 on " << v.negative_K_steps.size()
                  << " steps, identity error " << format_real(v.max_identity_error) << ")\n";
        if (!v.pass) status = kNumericalFailure;
    }
    return status;
}

int cmd_convergence(const std::vector<std::string>& alphas, const std::vector<std::string>& taus,
                    RunConfig base, std::size_t workers) {
    base.mode = ProblemMode::manufactured;
    const auto tau_list = parse_list(taus);
    base.tau = tau_list.back();
    base.validate();
    const auto reports = convergence_study(parse_list(alphas), tau_list, base, workers);

    const fs::path dir = base.output_dir;
    fs::create_directories(dir);
    {
        auto os = open_output(dir / "convergence.csv");
        write_convergence_csv(os, reports);
    }
    {
        auto os = open_output(dir / "plot_convergence.py");
        os << plot_script("convergence.csv");
    }
    std::cout << format_convergence_table(reports);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BDF6 SAV solver for the time-fractional Allen-Cahn equation"};
    app.require_subcommand(1);

    std::string coeff_alpha = "0.5", coeff_out = "-";
    std::size_t n_max = 64;
    auto* coeffs = app.add_subcommand("coeffs", "dump CQ weights g_j and multiplier weights q_j as CSV");
    coeffs->add_option("--alpha", coeff_alpha, "fractional order in (0, 1]");
    coeffs->add_option("--n-max", n_max, "largest index j");
    coeffs->add_option("--out", coeff_out, "output CSV file, '-' for stdout");

    std::vector<std::string> sym_alphas{"0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9", "1"};
    std::size_t grid = 8192;
    std::string sym_out = "-";
    auto* symbol = app.add_subcommand("symbol-check", "certify Re q(zeta) >= 0 on the unit circle");
    symbol->add_option("--alpha", sym_alphas, "comma-separated orders")->delimiter(',');
    symbol->add_option("--grid", grid, "grid points on [0, pi] (>= 1024)");
    symbol->add_option("--out", sym_out, "output JSON file, '-' for stdout");

    RunOptions solve_opts;
    auto* solve_cmd = app.add_subcommand("solve", "run the stepper once");
    add_run_options(solve_cmd, solve_opts);

    RunOptions conv_opts;
    std::vector<std::string> conv_alphas{"0.4", "0.6", "0.8"};
    std::vector<std::string> conv_taus{"1/200", "1/300", "1/400", "1/500"};
    std::size_t workers = 0;
    auto* conv = app.add_subcommand("convergence", "temporal convergence study on the manufactured solution");
    conv->add_option("--config", conv_opts.config_file, "flat key = value config file");
    conv->add_option("--alpha", conv_alphas, "comma-separated orders")->delimiter(',');
    conv->add_option("--tau", conv_taus, "comma-separated, strictly decreasing steps")->delimiter(',');
    conv->add_option("--t-final", conv_opts.t_final, "final time");
    conv->add_option("--modes", conv_opts.modes, "number of Legendre modes");
    conv->add_option("--forcing-coupling", conv_opts.coupling, "none | power");
    conv->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
    conv->add_option("--out", conv_opts.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*coeffs) return cmd_coeffs(coeff_alpha, n_max, coeff_out);
        if (*symbol) return cmd_symbol_check(sym_alphas, grid, sym_out);
        if (*solve_cmd) return cmd_solve(resolve_config(solve_opts));
        if (*conv) return cmd_convergence(conv_alphas, conv_taus, resolve_config(conv_opts), workers);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}
