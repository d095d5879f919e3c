#include "fracsav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace fracsav {

void RunConfig::validate() const {
    detail::check_alpha(alpha);
    if (n_modes < 1) throw ParameterError("n_modes must be at least 1");
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    if (!(t_final >= tau)) throw ParameterError("t_final must be at least tau");
    if (!(c0_shift >= 0.0)) throw ParameterError("c0_shift must be non-negative");
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_plain(const std::string& text) {
    double value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw ParameterError("not a number: '" + text + "'");
    return value;
}

}  // namespace

double parse_real(const std::string& raw) {
    const std::string text = trim(raw);
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_plain(text);
    const double num = parse_plain(trim(text.substr(0, slash)));
    const double den = parse_plain(trim(text.substr(slash + 1)));
    if (den == 0.0) throw ParameterError("zero denominator in '" + text + "'");
    return num / den;
}

void apply_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "alpha") {
        config.alpha = parse_real(value);
    } else if (key == "n_modes" || key == "modes") {
        const double n = parse_real(value);
        if (!(n >= 1.0) || n != std::floor(n)) throw ParameterError("n_modes must be a positive integer");
        config.n_modes = static_cast<std::size_t>(n);
    } else if (key == "tau") {
        config.tau = parse_real(value);
    } else if (key == "t_final") {
        config.t_final = parse_real(value);
    } else if (key == "mode") {
        config.mode = parse_mode(trim(value));
    } else if (key == "c0_shift") {
        config.c0_shift = parse_real(value);
    } else if (key == "output_dir") {
        config.output_dir = trim(value);
    } else if (key == "forcing_coupling") {
        const std::string v = trim(value);
        if (v == "none")
            config.forcing_coupling = ForcingCoupling::none;
        else if (v == "power")
            config.forcing_coupling = ForcingCoupling::forcing_power;
        else
            throw ParameterError("forcing_coupling must be 'none' or 'power'");
    } else {
        throw ParameterError("unknown config key '" + key + "'");
    }
}

void load_config(RunConfig& config, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void load_config(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    load_config(config, in);
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << "\r\n";
}

void write_coeffs_csv(std::ostream& out, double alpha, std::size_t n_max) {
    const auto w = frac_weights(alpha, n_max);
    const auto q = q_weights(w);
    CsvWriter csv(out);
    csv.row({"j", "g_j", "q_j"});
    for (std::size_t j = 0; j <= n_max; ++j)
        csv.row({std::to_string(j), format_real(w[j]), format_real(q[j])});
}

nlohmann::json to_json(const SymbolCertificate& c) {
    return {{"alpha", c.alpha},
            {"grid_size", c.grid_size},
            {"min_real_part", c.min_real_part},
            {"max_delta", c.max_delta},
            {"argmax_x", c.argmax_x},
            {"toeplitz_min", c.toeplitz_min},
            {"pass", c.pass}};
}

void write_diagnostics_csv(std::ostream& out, const std::vector<StepDiagnostics>& rows) {
    CsvWriter csv(out);
    csv.row({"n", "t", "r", "xi", "eta", "E_bar", "K_bar", "grad_norm_sq"});
    for (const auto& d : rows)
        csv.row({std::to_string(d.n), format_real(d.t), format_real(d.r), format_real(d.xi),
                 format_real(d.eta), format_real(d.energy_bar), format_real(d.K_bar),
                 format_real(d.grad_norm_sq)});
}

void write_field_csv(std::ostream& out, const Field& field) {
    const VectorXd& x = field.space()->nodes();
    const VectorXd u = eval_at_nodes(field);
    CsvWriter csv(out);
    csv.row({"x", "u"});
    for (Eigen::Index i = 0; i < x.size(); ++i) csv.row({format_real(x(i)), format_real(u(i))});
}

nlohmann::json to_json(const StabilityVerdict& v) {
    return {{"r_nonnegative", v.r_nonnegative},
            {"xi_nonnegative", v.xi_nonnegative},
            {"r_monotone", v.r_monotone},
            {"max_identity_error", v.max_identity_error},
            {"negative_K_steps", v.negative_K_steps},
            {"pass", v.pass}};
}

nlohmann::json to_json(const ErrorReport& e) { return {{"linf", e.linf}, {"l2", e.l2}}; }

AllenCahnProblem make_problem(const RunConfig& config) {
    config.validate();
    auto space = SpectralSpace::build(config.n_modes);
    if (config.mode == ProblemMode::manufactured)
        return AllenCahnProblem::manufactured(space, polynomial_manufactured(config.alpha),
                                              config.c0_shift);
    return AllenCahnProblem::unforced(
        space, config.alpha, [](double x) { return 0.1 * (1.0 - x * x); }, config.c0_shift);
}

SolveOutcome solve(const RunConfig& config) {
    const AllenCahnProblem problem = make_problem(config);
    SolveOutcome outcome{run(problem, config.tau, config.t_final, {config.forcing_coupling}),
                         problem.energy(problem.u0()), std::nullopt};
    if (config.mode == ProblemMode::unforced)
        outcome.verdict = assess_stability(outcome.result.state, outcome.r0);
    return outcome;
}

double convergence_rate(double e_coarse, double e_fine, double tau_coarse, double tau_fine) {
    return std::log(e_coarse / e_fine) / std::log(tau_coarse / tau_fine);
}

void compute_rates(ConvergenceReport& report) {
    auto& rows = report.rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0) {
            rows[i].linf_rate = rows[i].l2_rate = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        rows[i].linf_rate = convergence_rate(rows[i - 1].linf_error, rows[i].linf_error,
                                             rows[i - 1].tau, rows[i].tau);
        rows[i].l2_rate =
            convergence_rate(rows[i - 1].l2_error, rows[i].l2_error, rows[i - 1].tau, rows[i].tau);
    }
}

std::vector<ConvergenceReport> convergence_study(const std::vector<double>& alphas,
                                                 const std::vector<double>& taus,
                                                 const RunConfig& base, std::size_t workers) {
    if (alphas.empty() || taus.empty()) throw ParameterError("convergence study needs alphas and taus");
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] < taus[i - 1])) throw ParameterError("tau list must be strictly decreasing");

    std::vector<ConvergenceReport> reports(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        reports[a].alpha = alphas[a];
        reports[a].rows.resize(taus.size());
    }

    const std::size_t jobs = alphas.size() * taus.size();
    std::vector<std::exception_ptr> failures(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t a = job / taus.size(), t = job % taus.size();
            try {
                RunConfig config = base;
                config.alpha = alphas[a];
                config.tau = taus[t];
                config.mode = ProblemMode::manufactured;
                const RunResult result = run(make_problem(config), config.tau, config.t_final,
                                             {config.forcing_coupling});
                ConvergenceRow& row = reports[a].rows[t];
                row.tau = taus[t];
                row.linf_error = result.errors->linf;
                row.l2_error = result.errors->l2;
            } catch (...) {
                failures[job] = std::current_exception();
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs);
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
        worker();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    for (auto& report : reports) compute_rates(report);
    return reports;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
    CsvWriter csv(out);
    csv.row({"alpha", "tau", "linf_error", "linf_rate", "l2_error", "l2_rate"});
    for (const auto& report : reports)
        for (const auto& row : report.rows)
            csv.row({format_real(report.alpha), format_real(row.tau), format_real(row.linf_error),
                     format_real(row.linf_rate), format_real(row.l2_error), format_real(row.l2_rate)});
}

std::string format_convergence_table(const std::vector<ConvergenceReport>& reports) {
    std::ostringstream os;
    auto block = [&](const char* title, bool linf) {
        os << title << '\n' << std::setw(10) << "tau";
        for (const auto& r : reports) {
            std::ostringstream head;
            head << "alpha=" << r.alpha;
            os << std::setw(14) << head.str() << std::setw(9) << "rate";
        }
        os << '\n';
        const std::size_t n = reports.front().rows.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::ostringstream tau;
            const double inv = 1.0 / reports.front().rows[i].tau;
            if (std::abs(inv - std::round(inv)) < 1e-9)
                tau << "1/" << std::llround(inv);
            else
                tau << reports.front().rows[i].tau;
            os << std::setw(10) << tau.str();
            for (const auto& r : reports) {
                const auto& row = r.rows[i];
                const double e = linf ? row.linf_error : row.l2_error;
                const double rate = linf ? row.linf_rate : row.l2_rate;
                os << std::setw(14) << std::scientific << std::setprecision(4) << e;
                if (std::isnan(rate))
                    os << std::setw(9) << "";
                else
                    os << std::setw(9) << std::fixed << std::setprecision(4) << rate;
                os << std::defaultfloat;
            }
            os << '\n';
        }
    };
    block("l_inf norm", true);
    os << '\n';
    block("discrete L2 norm", false);
    return os.str();
}

std::string plot_script(const std::string& csv_name) {
    std::ostringstream os;
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Log-log plot of the convergence table written by `fracsav convergence`.\"\"\"\n"
          "import csv\n"
          "import sys\n"
          "from collections import defaultdict\n\n"
          "import matplotlib\n"
          "matplotlib.use(\"Agg\")\n"
          "import matplotlib.pyplot as plt\n\n"
          "path = sys.argv[1] if len(sys.argv) > 1 else \""
       << csv_name
       << "\"\n"
          "series = defaultdict(lambda: {\"tau\": [], \"linf\": [], \"l2\": []})\n"
          "with open(path, newline=\"\") as fh:\n"
          "    for row in csv.DictReader(fh):\n"
          "        s = series[row[\"alpha\"]]\n"
          "        s[\"tau\"].append(float(row[\"tau\"]))\n"
          "        s[\"linf\"].append(float(row[\"linf_error\"]))\n"
          "        s[\"l2\"].append(float(row[\"l2_error\"]))\n\n"
          "fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)\n"
          "for ax, key, title in zip(axes, (\"linf\", \"l2\"), (\"l_inf error\", \"discrete L2 error\")):\n"
          "    for alpha, s in sorted(series.items()):\n"
          "        ax.loglog(s[\"tau\"], s[key], \"o-\", label=f\"alpha={alpha}\")\n"
          "    t = min(min(s[\"tau\"]) for s in series.values())\n"
          "    T = max(max(s[\"tau\"]) for s in series.values())\n"
          "    ref = max(max(s[key]) for s in series.values())\n"
          "    ax.loglog([T, t], [ref, ref * (t / T) ** 6], \"k--\", label=\"slope 6\")\n"
          "    ax.set_xlabel(\"tau\")\n"
          "    ax.set_title(title)\n"
          "    ax.legend()\n"
          "fig.tight_layout()\n"
          "fig.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
    return os.str();
}

}  // namespace fracsav
