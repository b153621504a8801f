#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sqicube/experiment.hpp"

namespace fs = std::filesystem;
using namespace sqicube;

namespace {

struct CliValues {
    int example = 0, d = 0, p = 0, gauss_order = 0;
    std::vector<int> Ns;
    std::string surface, pipeline, out, golden, config, data;
    double surface_param = 0, moment_tol = 0;
    bool with_oracle = false, check = false;
};

// shared experiment flags; returns the option handles needed to detect
// which ones the user actually set (flags override config entries)
std::map<std::string, CLI::Option*> add_experiment_flags(CLI::App* cmd, CliValues& v) {
    std::map<std::string, CLI::Option*> opts;
    opts["example"] = cmd->add_option("--example", v.example, "preset 1..4");
    opts["d"] = cmd->add_option("--d", v.d, "weight degree per direction");
    opts["p"] = cmd->add_option("--p", v.p, "quasi-interpolation degree");
    opts["N"] = cmd->add_option("--N", v.Ns, "grid sizes, e.g. --N 6 8 10");
    opts["surface"] = cmd->add_option("--surface", v.surface, "plane|cylinder|hyperboloid");
    opts["surface_param"] = cmd->add_option("--surface-param", v.surface_param,
                                            "surface parameter (cylinder radius)");
    opts["pipeline"] = cmd->add_option("--pipeline", v.pipeline,
                                       "direct|multiplicative|subtractive");
    opts["gauss_order"] = cmd->add_option("--gauss-order", v.gauss_order,
                                          "Gauss order of the moment rule");
    opts["moment_tol"] = cmd->add_option("--moment-tol", v.moment_tol,
                                         "moment accuracy target");
    opts["out"] = cmd->add_option("--out", v.out, "write the table as CSV");
    opts["golden"] = cmd->add_option("--golden", v.golden, "golden CSV to compare against");
    cmd->add_option("--config", v.config, "experiment manifest file");
    cmd->add_option("--data", v.data, "data directory (default $SQICUBE_DATA or ./data)");
    cmd->add_flag("--with-oracle", v.with_oracle,
                  "recompute references instead of loading the shipped CSV");
    cmd->add_flag("--check", v.check, "compare against the golden CSV, exit 1 on mismatch");
    return opts;
}

std::string data_dir(const CliValues& v) {
    if (!v.data.empty()) return v.data;
    if (const char* env = std::getenv("SQICUBE_DATA")) return env;
    return "data";
}

void apply_flag_overrides(ExperimentConfig& cfg, const CliValues& v,
                          const std::map<std::string, CLI::Option*>& opts) {
    auto set = [&](const char* key) { return opts.at(key)->count() > 0; };
    // preset first so explicit flags refine it
    if (set("example")) apply_config_entry(cfg, "example", std::to_string(v.example));
    if (set("d")) apply_config_entry(cfg, "d", std::to_string(v.d));
    if (set("p")) apply_config_entry(cfg, "p", std::to_string(v.p));
    if (set("N")) {
        std::ostringstream ss;
        for (int N : v.Ns) ss << N << ' ';
        apply_config_entry(cfg, "N", ss.str());
    }
    if (set("surface")) apply_config_entry(cfg, "surface", v.surface);
    if (set("surface_param"))
        apply_config_entry(cfg, "surface_param", std::to_string(v.surface_param));
    if (set("pipeline")) apply_config_entry(cfg, "pipeline", v.pipeline);
    if (set("gauss_order"))
        apply_config_entry(cfg, "gauss_order", std::to_string(v.gauss_order));
    if (set("moment_tol")) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v.moment_tol;
        apply_config_entry(cfg, "moment_tol", ss.str());
    }
    if (set("out")) cfg.out_path = v.out;
    if (set("golden")) cfg.golden_path = v.golden;
    if (v.with_oracle) cfg.with_oracle = true;
    if (v.check) cfg.check = true;
}

int run_configs(const CliValues& v, const std::map<std::string, CLI::Option*>& opts,
                bool force_check) {
    std::vector<ExperimentConfig> configs;
    if (!v.config.empty())
        configs = parse_config_file(v.config);
    else
        configs.emplace_back();
    for (auto& cfg : configs) apply_flag_overrides(cfg, v, opts);

    const std::string dir = data_dir(v);
    ReferenceSet refs;
    bool have_refs = false;
    const fs::path ref_path = fs::path(dir) / "references.csv";

    int rc = 0;
    for (auto& cfg : configs) {
        if (force_check) cfg.check = true;
        if (cfg.example == 0 && v.config.empty() && opts.at("example")->count() == 0)
            throw std::invalid_argument("pass --example 1..4 or --config FILE");

        const ReferenceSet* ref_ptr = nullptr;
        if (!cfg.with_oracle) {
            if (!have_refs && fs::exists(ref_path)) {
                refs = load_references(ref_path.string());
                have_refs = true;
            }
            if (have_refs)
                ref_ptr = &refs;
            else
                std::cerr << "note: " << ref_path.string()
                          << " not found, computing references live\n";
        }

        const ErrorTable table = run_experiment(cfg, ref_ptr);
        write_csv(table, std::cout);
        if (cfg.example == 1) {
            double worst = 0;
            for (size_t i = 0; i < table.Ns.size(); ++i)
                worst = std::max({worst, table.errmax1[i], table.errmax2[i],
                                  table.errmax3[i]});
            std::cout << (worst <= 1e-10 ? "EXACTNESS PASS" : "EXACTNESS FAIL")
                      << " (max error " << worst << ")\n";
            if (worst > 1e-10) rc = 1;
        }
        if (!cfg.out_path.empty()) {
            std::ofstream out(cfg.out_path);
            if (!out)
                throw std::runtime_error("cannot write " + cfg.out_path);
            write_csv(table, out);
        }
        if (cfg.check) {
            std::string golden = cfg.golden_path;
            if (golden.empty())
                golden = (fs::path(dir) / "golden" /
                          ("example" + std::to_string(cfg.example) + "_d" +
                           std::to_string(cfg.d) + "_p" + std::to_string(cfg.p) +
                           ".csv"))
                             .string();
            std::ifstream in(golden);
            if (!in) throw std::invalid_argument("cannot open golden CSV: " + golden);
            const CheckReport report = check_golden(table, read_csv(in));
            if (report.pass) {
                std::cout << "CHECK PASS vs " << golden << "\n";
            } else {
                std::cout << "CHECK FAIL vs " << golden << "\n";
                for (const auto& f : report.failures) std::cout << "  " << f << "\n";
                rc = 1;
            }
        }
    }
    return rc;
}

int run_oracle(const std::vector<int>& examples, const std::vector<int>& ds,
               const std::string& out, unsigned seed, const CliValues& v) {
    fs::path path = out.empty() ? fs::path(data_dir(v)) / "references.csv" : fs::path(out);
    ReferenceSet refs;
    if (fs::exists(path)) refs = load_references(path.string());
    for (int example : examples)
        for (int d : ds) {
            ExperimentConfig cfg = example_preset(example, d, 3);
            std::cerr << "oracle: example " << example << " d " << d << "\n";
            ReferenceSet part = compute_references(cfg, seed);
            for (auto& [key, entry] : part) refs[key] = entry;
        }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_references(refs, path.string());
    std::cout << "wrote " << refs.size() << " references to " << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sqicube: spline cubature of weakly and nearly singular integrals"};
    app.require_subcommand(1);

    CliValues run_v, check_v;
    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment sweep");
    auto run_opts = add_experiment_flags(run_cmd, run_v);
    CLI::App* check_cmd =
        app.add_subcommand("check", "run a sweep and compare against a golden CSV");
    auto check_opts = add_experiment_flags(check_cmd, check_v);

    CliValues oracle_v;
    std::vector<int> oracle_examples{1, 2, 3, 4}, oracle_ds{2, 3};
    std::string oracle_out;
    unsigned oracle_seed = 0;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "recompute reference values and store them");
    oracle_cmd->add_option("--example", oracle_examples, "presets to cover");
    oracle_cmd->add_option("--d", oracle_ds, "weight degrees to cover");
    oracle_cmd->add_option("--out", oracle_out, "output CSV (default DATA/references.csv)");
    oracle_cmd->add_option("--seed", oracle_seed, "cell-splitting shuffle seed");
    oracle_cmd->add_option("--data", oracle_v.data, "data directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return run_configs(run_v, run_opts, false);
        if (check_cmd->parsed()) return run_configs(check_v, check_opts, true);
        return run_oracle(oracle_examples, oracle_ds, oracle_out, oracle_seed, oracle_v);
    } catch (const ReferenceNonConvergence& e) {
        std::cerr << "oracle non-convergence: " << e.what()
                  << " (best estimate " << e.best_estimate << ")\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
