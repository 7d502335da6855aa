// Command-line front end: single closed-loop runs, the Monte Carlo study and
// the per-model policy comparisons, all emitting deterministic CSV artifacts.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "derg/derg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

derg::KappaPolicy parse_kappa(const std::string& spec) {
    if (spec == "dynamic") return derg::KappaPolicy::dynamic();
    if (spec == "invariance") return derg::KappaPolicy::invariance_only();
    if (spec.rfind("fixed:", 0) == 0) {
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(spec.substr(6), &used);
            if (used != spec.size() - 6) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("invalid kappa spec '" + spec + "'");
        }
        if (value < 0.0) throw UsageError("fixed kappa must be >= 0");
        return derg::KappaPolicy::fixed(value);
    }
    throw UsageError("invalid kappa spec '" + spec + "' (dynamic | invariance | fixed:<float>)");
}

derg::Vector parse_vector(const std::string& csv, int expected, const std::string& flag) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("could not parse " + flag + " component '" + item + "'");
        }
    }
    if (static_cast<int>(values.size()) != expected) {
        throw UsageError(flag + " must have " + std::to_string(expected) + " components");
    }
    derg::Vector out(expected);
    for (int i = 0; i < expected; ++i) out(i) = values[i];
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open output file '" + path + "'");
    os << contents;
}

void write_run_logs(const std::string& dir, const derg::ComparisonReport& report,
                    const std::vector<derg::RunLog>& logs) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < logs.size(); ++i) {
        std::ostringstream os;
        derg::write_run_csv(os, logs[i]);
        std::string name = report.rows[i].variant;
        for (auto& ch : name) {
            if (ch == ':' || ch == '/') ch = '_';
        }
        write_file(dir + "/" + name + ".csv", os.str());
    }
}

int do_run(const std::string& model, const std::string& kappa_spec, const std::string& out_path,
           const std::optional<std::string>& r_csv, const std::optional<std::string>& x0_csv,
           const std::optional<std::string>& v0_csv, std::optional<double> dt,
           std::optional<double> t_max, int substeps) {
    derg::BenchmarkBundle bundle = derg::find_bundle(model);
    bundle.params.kappa = parse_kappa(kappa_spec);
    if (dt) bundle.params.dt = *dt;

    const int n = bundle.plant.state_dim();
    const int m = bundle.plant.ref_dim();
    const derg::Vector r = r_csv ? parse_vector(*r_csv, m, "--r") : bundle.default_r;
    const derg::Vector x0 = x0_csv ? parse_vector(*x0_csv, n, "--x0") : bundle.default_x0;
    const derg::Vector v0 = v0_csv ? parse_vector(*v0_csv, m, "--v0") : bundle.default_v0;

    derg::SimConfig sim;
    sim.substeps = substeps;
    sim.t_max = t_max.value_or(bundle.default_t_max);

    const derg::RunLog log = derg::simulate(bundle.plant, bundle.lyap, bundle.cons, bundle.params,
                                            sim, x0, v0, r);

    std::ostringstream os;
    derg::write_run_csv(os, log);
    write_file(out_path, os.str());

    std::cout << "violated=" << (log.constraint_violated || log.aborted ? "true" : "false")
              << " settling="
              << (log.settling_time ? derg::format_double(*log.settling_time) : "none")
              << " terminal_v=";
    for (int i = 0; i < log.terminal_v.size(); ++i) {
        std::cout << (i ? "," : "") << derg::format_double(log.terminal_v(i));
    }
    std::cout << "\n";
    return kExitOk;
}

int finish_report(const derg::ComparisonReport& report, const std::string& out_path) {
    std::ostringstream os;
    derg::write_report_csv(os, report);
    write_file(out_path, os.str());
    std::cout << os.str();
    if (!report.assertions_pass) {
        std::cerr << report.detail;
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time explicit reference governor simulations"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Simulate one closed-loop run, write a RunLog CSV");
    std::string model = "double-integrator";
    std::string kappa_spec = "dynamic";
    std::string out_path = "run.csv";
    std::optional<std::string> r_csv, x0_csv, v0_csv;
    std::optional<double> dt_override, tmax_override;
    int substeps = 10;
    run->add_option("--model", model, "double-integrator | aircraft | bebop")
        ->capture_default_str();
    run->add_option("--kappa", kappa_spec, "dynamic | invariance | fixed:<float>")
        ->capture_default_str();
    run->add_option("--out", out_path, "output CSV path")->capture_default_str();
    run->add_option("--r", r_csv, "desired reference, comma-separated");
    run->add_option("--x0", x0_csv, "initial state, comma-separated");
    run->add_option("--v0", v0_csv, "initial applied reference, comma-separated");
    run->add_option("--dt", dt_override, "governor sampling period [s]");
    run->add_option("--tmax", tmax_override, "simulation horizon [s]");
    run->add_option("--substeps", substeps, "RK4 sub-intervals per sample")
        ->capture_default_str();

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo",
                                  "Policy comparison statistics on the double integrator");
    int runs = 2000;
    std::uint64_t seed = 7;
    std::string mc_out = "montecarlo.csv";
    mc->add_option("--runs", runs, "number of runs per policy variant")->capture_default_str();
    mc->add_option("--seed", seed, "stream seed")->capture_default_str();
    mc->add_option("--out", mc_out, "report CSV path")->capture_default_str();

    // compare
    auto* cmp = app.add_subcommand("compare", "Per-model policy comparison");
    std::string cmp_model = "double-integrator";
    std::string cmp_out = "compare.csv";
    std::optional<std::string> cmp_dir;
    cmp->add_option("--model", cmp_model, "double-integrator | aircraft | bebop")
        ->capture_default_str();
    cmp->add_option("--out", cmp_out, "report CSV path")->capture_default_str();
    cmp->add_option("--dir", cmp_dir, "directory for per-run RunLog CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*run) {
            return do_run(model, kappa_spec, out_path, r_csv, x0_csv, v0_csv, dt_override,
                          tmax_override, substeps);
        }
        if (*mc) {
            if (runs < 1) throw UsageError("--runs must be >= 1");
            derg::MonteCarloSpec spec;
            spec.runs = runs;
            spec.seed = seed;
            return finish_report(derg::run_table1(spec), mc_out);
        }
        if (*cmp) {
            derg::ComparisonReport report;
            std::vector<derg::RunLog> logs;
            if (cmp_model == "double-integrator") {
                report = derg::run_convergence_comparison(&logs);
            } else if (cmp_model == "aircraft") {
                report = derg::run_aircraft_comparison(&logs);
            } else if (cmp_model == "bebop") {
                report = derg::run_drone_comparison(&logs);
            } else {
                throw UsageError("unknown model: " + cmp_model);
            }
            if (cmp_dir) write_run_logs(*cmp_dir, report, logs);
            return finish_report(report, cmp_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
    return kExitOk;
}
