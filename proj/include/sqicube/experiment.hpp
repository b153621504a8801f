#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "sqicube/cubature.hpp"
#include "sqicube/reference_quadrature.hpp"

namespace sqicube {

enum class Pipeline { direct, multiplicative, subtractive };

std::string pipeline_name(Pipeline p);
Pipeline parse_pipeline(const std::string& name);

/// One batch run: a preset (1..4) or a custom block, swept over N.
struct ExperimentConfig {
    int example = 0;  // 0 = custom
    int d = 2;
    int p = 3;
    std::vector<int> Ns{6, 8, 10, 12, 14};
    std::string surface_name;  // empty: direct pipeline with matrix A
    double surface_param = 2.0;
    Matrix2 A = Matrix2::Identity();
    Pipeline pipeline = Pipeline::direct;
    /// 1D source grid; the run sweeps its Cartesian square.
    std::vector<double> sources_1d{-1.1, -1.0, -0.5, 0.0, 0.5, 1.0, 1.1};
    int gauss_order = 16;
    double moment_tol = 1e-12;
    std::string out_path;
    bool with_oracle = false;
    bool check = false;
    std::string golden_path;
};

/// The four bundled experiments (weight degrees d, QI degree p).
ExperimentConfig example_preset(int example, int d, int p);

/// Integrand bound to a source point per the config's pipeline: the f of the
/// direct pipeline or the g of the multiplicative/subtractive ones.
IntegrandSampler bound_integrand(const ExperimentConfig& cfg, const SurfacePatch* surface,
                                 const Vector2& s);

struct ErrorTable {
    int example = 0, d = 0, p = 0;
    Pipeline pipeline = Pipeline::direct;
    std::vector<int> Ns;
    // per N, max absolute error over sources outside / on the boundary of /
    // inside the weight support, plus empirical orders (first entry NaN)
    std::vector<double> errmax1, errmax2, errmax3;
    std::vector<double> o1, o2, o3;
    std::uint64_t config_hash = 0;
    std::string timestamp;  // metadata only, never serialized
};

/// Reference values keyed by (example, d, s1, s2); independent of p and N.
using ReferenceKey = std::tuple<int, int, double, double>;
struct ReferenceEntry {
    double value = 0;
    double estimate = 0;
};
using ReferenceSet = std::map<ReferenceKey, ReferenceEntry>;

/// High-accuracy value of the experiment's true integral at source s.
ReferenceEntry reference_value(const ExperimentConfig& cfg, const BSplineWeight& weight,
                               const SurfacePatch* surface, const Vector2& s,
                               unsigned shuffle_seed = 0);

/// All references an experiment needs, computed live.
ReferenceSet compute_references(const ExperimentConfig& cfg, unsigned shuffle_seed = 0);

ReferenceSet load_references(const std::string& path);
void save_references(const ReferenceSet& refs, const std::string& path);

/// Runs the sweep.  refs may be null (live oracle per source point).
ErrorTable run_experiment(const ExperimentConfig& cfg, const ReferenceSet* refs);

std::uint64_t config_hash(const ExperimentConfig& cfg);

void write_csv(const ErrorTable& table, std::ostream& os);
ErrorTable read_csv(std::istream& is);

struct CheckReport {
    bool pass = true;
    std::vector<std::string> failures;
};

/// Cellwise regression: errors relative, orders absolute.  The default
/// tolerance sits above the 5-significant-digit quantization of the CSV
/// format, so a byte-exact rerun of a stored table always passes.
CheckReport check_golden(const ErrorTable& table, const ErrorTable& golden,
                         double err_rtol = 1e-4, double order_atol = 0.5);

/// Plain-text manifest: `[experiment]` section headers, `key = value` lines,
/// `#` comments.  Throws with line diagnostics on malformed input.
std::vector<ExperimentConfig> parse_config_file(const std::string& path);
/// Applies one key = value assignment (the config-file grammar) to cfg.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Runs fn(0..n-1), spread over min(SQICUBE_THREADS, hardware) workers.
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace sqicube
