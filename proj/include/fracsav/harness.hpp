#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracsav/allen_cahn.hpp"
#include "fracsav/multiplier_analysis.hpp"
#include "fracsav/sav_stepper.hpp"

namespace fracsav {

/// Settings for one run of the solver.
struct RunConfig {
    double alpha = 0.4;
    std::size_t n_modes = 50;
    double tau = 1.0 / 200.0;
    double t_final = 1.0;
    ProblemMode mode = ProblemMode::manufactured;
    double c0_shift = 0.0;
    std::filesystem::path output_dir = ".";
    ForcingCoupling forcing_coupling = ForcingCoupling::none;

    /// Throws ParameterError on tau <= 0, t_final < tau, alpha outside (0, 1],
    /// n_modes < 1 or negative shift.
    void validate() const;
};

/// Parses "0.005", "1e-3" or a fraction such as "1/200".
double parse_real(const std::string& text);

/// Sets one config key (alpha, n_modes, tau, t_final, mode, c0_shift,
/// output_dir, forcing_coupling) from its text value.
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Reads a flat `key = value` file; blank lines and `#` comments are skipped.
void load_config(RunConfig& config, std::istream& in);
void load_config(RunConfig& config, const std::filesystem::path& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double value);

/// Writes RFC 4180 records: fields containing `,`, `"`, CR or LF are quoted.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

std::string csv_escape(const std::string& field);

// coeffs
void write_coeffs_csv(std::ostream& out, double alpha, std::size_t n_max);

// symbol-check
nlohmann::json to_json(const SymbolCertificate& cert);

// solve
void write_diagnostics_csv(std::ostream& out, const std::vector<StepDiagnostics>& rows);
void write_field_csv(std::ostream& out, const Field& field);
nlohmann::json to_json(const StabilityVerdict& verdict);
nlohmann::json to_json(const ErrorReport& report);

/// Example problem: u0 = 0.1(1 - x^2), either unforced or forced so that the
/// solution is (t^10 + 0.1)(1 - x^2).
AllenCahnProblem make_problem(const RunConfig& config);

struct SolveOutcome {
    RunResult result;
    double r0 = 0;
    std::optional<StabilityVerdict> verdict;  ///< unforced runs only
};

SolveOutcome solve(const RunConfig& config);

// convergence
struct ConvergenceRow {
    double tau = 0;
    double linf_error = 0;
    double linf_rate = 0;  ///< NaN on the first row
    double l2_error = 0;
    double l2_rate = 0;
};

struct ConvergenceReport {
    double alpha = 0;
    std::vector<ConvergenceRow> rows;
};

/// log(e_coarse / e_fine) / log(tau_coarse / tau_fine)
double convergence_rate(double e_coarse, double e_fine, double tau_coarse, double tau_fine);

/// Fills in the rate columns of rows whose errors are already set.
void compute_rates(ConvergenceReport& report);

/// Runs every (alpha, tau) pair of the manufactured problem on a worker pool
/// and returns one report per alpha, in input order. tau_list must be strictly
/// decreasing. `workers == 0` picks the hardware concurrency.
std::vector<ConvergenceReport> convergence_study(const std::vector<double>& alphas,
                                                 const std::vector<double>& taus,
                                                 const RunConfig& base, std::size_t workers = 0);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);
/// Plain-text table: one block per norm, tau down the rows, one error/rate
/// column pair per alpha.
std::string format_convergence_table(const std::vector<ConvergenceReport>& reports);
/// Python/matplotlib script that plots `csv_name` on log-log axes.
std::string plot_script(const std::string& csv_name);

}  // namespace fracsav
