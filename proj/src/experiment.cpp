#include "sqicube/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace sqicube {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int source_class(const Vector2& s) {
    const double m = std::max(std::abs(s[0]), std::abs(s[1]));
    if (m > 1.0 + 1e-9) return 1;  // outside the support
    if (m > 1.0 - 1e-9) return 2;  // on the boundary
    return 3;                      // inside
}

std::vector<double> uniform_breakpoints(int N) {
    std::vector<double> bp(size_t(N) + 1);
    for (int k = 0; k <= N; ++k) bp[size_t(k)] = 2.0 * k / N - 1.0;
    return bp;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.d < 1 || cfg.p < 1)
        throw std::invalid_argument("config: d and p must be at least 1");
    if (cfg.d + cfg.p > 12)
        throw std::invalid_argument("config: d + p too large for the rule tables");
    if (cfg.Ns.empty()) throw std::invalid_argument("config: empty N list");
    for (int N : cfg.Ns)
        if (N < cfg.p + 2)
            throw std::invalid_argument("config: need N >= p + 2, got N=" +
                                        std::to_string(N));
    if (cfg.Ns.empty()) throw std::invalid_argument("config: empty N list");
    // sources must stay within the extended region handled by the moments
    const double margin = 1.0 / (cfg.d + 1);
    for (double sc : cfg.sources_1d)
        if (std::abs(sc) > 1.0 + margin + 1e-12)
            throw std::invalid_argument("config: source coordinate " +
                                        format_double("%g", sc) +
                                        " outside the extended region");
    if (cfg.example < 0 || cfg.example > 4)
        throw std::invalid_argument("config: example must be 1..4 (0 = custom)");
    if (cfg.pipeline != Pipeline::direct && cfg.surface_name.empty())
        throw std::invalid_argument("config: surface pipelines need a surface");
}

void fnv1a(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
}

}  // namespace

std::string pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::direct: return "direct";
        case Pipeline::multiplicative: return "multiplicative";
        case Pipeline::subtractive: return "subtractive";
    }
    return "direct";
}

Pipeline parse_pipeline(const std::string& name) {
    if (name == "direct") return Pipeline::direct;
    if (name == "multiplicative") return Pipeline::multiplicative;
    if (name == "subtractive") return Pipeline::subtractive;
    throw std::invalid_argument("unknown pipeline: " + name);
}

ExperimentConfig example_preset(int example, int d, int p) {
    ExperimentConfig cfg;
    cfg.example = example;
    cfg.d = d;
    cfg.p = p;
    switch (example) {
        case 1:
        case 2:
            cfg.pipeline = Pipeline::direct;
            cfg.A = Matrix2::Identity();
            break;
        case 3:
            cfg.pipeline = Pipeline::multiplicative;
            cfg.surface_name = "cylinder";
            cfg.surface_param = 2.0;
            break;
        case 4:
            // weakly singular form applied as-is: the metric kernel against
            // f_s = J * cos(k r), the real Helmholtz factor; no rho here
            cfg.pipeline = Pipeline::direct;
            cfg.surface_name = "hyperboloid";
            break;
        default:
            throw std::invalid_argument("example must be 1..4");
    }
    return cfg;
}

IntegrandSampler bound_integrand(const ExperimentConfig& cfg, const SurfacePatch* surface,
                                 const Vector2& s) {
    switch (cfg.example) {
        case 1:
            return [](double t1, double t2) { return t1 * t1 + t2 * t2; };
        case 2:
            return [](double t1, double t2) { return std::exp(t1 * t2); };
        case 3:
            return [surface](double t1, double t2) {
                return jacobian(*surface, {t1, t2});
            };
        case 4: {
            const Vector3 Xs = surface->position(s);
            return [surface, Xs](double t1, double t2) {
                const double r = (surface->position({t1, t2}) - Xs).norm();
                return jacobian(*surface, {t1, t2}) * std::cos(1.5707963267948966 * r);
            };
        }
        default:
            if (cfg.pipeline == Pipeline::direct)
                return [](double t1, double t2) { return std::exp(t1 * t2); };
            return [surface](double t1, double t2) {
                return jacobian(*surface, {t1, t2});
            };
    }
}

ReferenceEntry reference_value(const ExperimentConfig& cfg, const BSplineWeight& weight,
                               const SurfacePatch* surface, const Vector2& s,
                               unsigned shuffle_seed) {
    OracleRequest req;
    const auto bu = weight.fu.kv.breakpoints(), bv = weight.fv.kv.breakpoints();
    req.domain = {bu.front(), bu.back(), bv.front(), bv.back()};
    req.grid_u = bu;
    req.grid_v = bv;
    req.singular_point = s;
    req.shuffle_seed = shuffle_seed;
    const IntegrandSampler f = bound_integrand(cfg, surface, s);
    if (cfg.pipeline == Pipeline::direct) {
        const Matrix2 A = surface ? first_fundamental_form(*surface, s) : cfg.A;
        req.integrand = [&weight, f, A, s](double t1, double t2) {
            return kernel_K(A, s, {t1, t2}) * weight.eval(t1, t2) * f(t1, t2);
        };
    } else {
        req.integrand = [&weight, f, surface, s](double t1, double t2) {
            return kernel_G(*surface, s, {t1, t2}) * weight.eval(t1, t2) * f(t1, t2);
        };
    }
    const OracleResult res = oracle_integrate(req);
    return {res.value, res.error_estimate};
}

ReferenceSet compute_references(const ExperimentConfig& cfg, unsigned shuffle_seed) {
    validate(cfg);
    const BSplineWeight weight = BSplineWeight::uniform(cfg.d, cfg.d);
    std::unique_ptr<SurfacePatch> surface;
    if (!cfg.surface_name.empty())
        surface = make_surface(cfg.surface_name, cfg.surface_param);
    ReferenceSet refs;
    for (double s1 : cfg.sources_1d)
        for (double s2 : cfg.sources_1d) {
            const Vector2 s{s1, s2};
            refs[{cfg.example, cfg.d, s1, s2}] =
                reference_value(cfg, weight, surface.get(), s, shuffle_seed);
        }
    return refs;
}

ReferenceSet load_references(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open references file: " + path);
    ReferenceSet refs;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("example,", 0) == 0) continue;  // header
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 6 columns");
        refs[{std::stoi(cols[0]), std::stoi(cols[1]), std::stod(cols[2]),
              std::stod(cols[3])}] = {std::stod(cols[4]), std::stod(cols[5])};
    }
    return refs;
}

void save_references(const ReferenceSet& refs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write references file: " + path);
    out << "example,d,s1,s2,value,estimate\n";
    for (const auto& [key, entry] : refs) {
        const auto& [example, d, s1, s2] = key;
        out << example << ',' << d << ',' << format_double("%.17g", s1) << ','
            << format_double("%.17g", s2) << ','
            << format_double("%.17g", entry.value) << ','
            << format_double("%.3e", entry.estimate) << '\n';
    }
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::ostringstream ss;
    ss << "example=" << cfg.example << "|d=" << cfg.d << "|p=" << cfg.p << "|N=";
    for (int N : cfg.Ns) ss << N << ' ';
    ss << "|surface=" << cfg.surface_name << '|'
       << format_double("%.17g", cfg.surface_param) << "|A="
       << format_double("%.17g", cfg.A(0, 0)) << ' '
       << format_double("%.17g", cfg.A(0, 1)) << ' '
       << format_double("%.17g", cfg.A(1, 1))
       << "|pipeline=" << pipeline_name(cfg.pipeline) << "|sources=";
    for (double sc : cfg.sources_1d) ss << format_double("%.17g", sc) << ' ';
    ss << "|gauss=" << cfg.gauss_order << "|mtol="
       << format_double("%.17g", cfg.moment_tol);
    std::uint64_t h = 1469598103934665603ull;
    fnv1a(h, ss.str());
    return h;
}

ErrorTable run_experiment(const ExperimentConfig& cfg, const ReferenceSet* refs) {
    validate(cfg);
    const BSplineWeight weight = BSplineWeight::uniform(cfg.d, cfg.d);
    std::unique_ptr<SurfacePatch> surface;
    if (!cfg.surface_name.empty())
        surface = make_surface(cfg.surface_name, cfg.surface_param);

    std::vector<Vector2> sources;
    std::vector<int> cls;
    for (double s1 : cfg.sources_1d)
        for (double s2 : cfg.sources_1d) {
            sources.push_back({s1, s2});
            cls.push_back(source_class(sources.back()));
        }

    // references do not depend on N, resolve them once up front
    std::vector<double> refval(sources.size());
    for (size_t k = 0; k < sources.size(); ++k) {
        const ReferenceKey key{cfg.example, cfg.d, sources[k][0], sources[k][1]};
        if (refs) {
            auto it = refs->find(key);
            if (it != refs->end()) {
                refval[k] = it->second.value;
                continue;
            }
        }
        refval[k] = reference_value(cfg, weight, surface.get(), sources[k]).value;
    }

    ErrorTable table;
    table.example = cfg.example;
    table.d = cfg.d;
    table.p = cfg.p;
    table.pipeline = cfg.pipeline;
    table.Ns = cfg.Ns;
    table.config_hash = config_hash(cfg);
    table.timestamp = iso_timestamp();

    for (int N : cfg.Ns) {
        const QIOperator qi = build_qi(cfg.p, uniform_breakpoints(N));
        SingularQuadConfig sq;
        sq.gauss_order = cfg.gauss_order;
        sq.target_accuracy = cfg.moment_tol;
        sq.with_estimate = false;
        const CubatureRule rule = build_rule(weight, qi, qi, sq);

        std::vector<double> vals(sources.size());
        parallel_for(Index(sources.size()), [&](Index k) {
            const Vector2& s = sources[size_t(k)];
            const IntegrandSampler f = bound_integrand(cfg, surface.get(), s);
            switch (cfg.pipeline) {
                case Pipeline::direct: {
                    const Matrix2 A =
                        surface ? first_fundamental_form(*surface, s) : cfg.A;
                    vals[size_t(k)] = integrate_weakly_singular(rule, f, A, s);
                    break;
                }
                case Pipeline::multiplicative:
                    vals[size_t(k)] = integrate_multiplicative(rule, *surface, f, s);
                    break;
                case Pipeline::subtractive:
                    vals[size_t(k)] = integrate_subtractive(rule, *surface, f, s);
                    break;
            }
        });

        double e1 = 0, e2 = 0, e3 = 0;
        for (size_t k = 0; k < sources.size(); ++k) {
            const double err = std::abs(vals[k] - refval[k]);
            if (cls[k] == 1) e1 = std::max(e1, err);
            else if (cls[k] == 2) e2 = std::max(e2, err);
            else e3 = std::max(e3, err);
        }
        table.errmax1.push_back(e1);
        table.errmax2.push_back(e2);
        table.errmax3.push_back(e3);
    }

    auto orders = [&](const std::vector<double>& errs) {
        std::vector<double> o{kNaN};
        if (errs.size() > 1) {
            const auto tail = convergence_order(errs, cfg.Ns);
            o.insert(o.end(), tail.begin(), tail.end());
        }
        return o;
    };
    table.o1 = orders(table.errmax1);
    table.o2 = orders(table.errmax2);
    table.o3 = orders(table.errmax3);
    return table;
}

void write_csv(const ErrorTable& table, std::ostream& os) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(table.config_hash));
    os << "# sqicube example=" << table.example << " d=" << table.d
       << " p=" << table.p << " pipeline=" << pipeline_name(table.pipeline)
       << " config_hash=" << hash << '\n';
    os << "N,errmax1,o1,errmax2,o2,errmax3,o3\n";
    auto ord = [](double v) { return std::isnan(v) ? std::string() : format_double("%.2f", v); };
    for (size_t i = 0; i < table.Ns.size(); ++i) {
        os << table.Ns[i] << ',' << format_double("%.4e", table.errmax1[i]) << ','
           << ord(table.o1[i]) << ',' << format_double("%.4e", table.errmax2[i])
           << ',' << ord(table.o2[i]) << ','
           << format_double("%.4e", table.errmax3[i]) << ',' << ord(table.o3[i])
           << '\n';
    }
}

ErrorTable read_csv(std::istream& is) {
    ErrorTable table;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "example") table.example = std::stoi(val);
                else if (key == "d") table.d = std::stoi(val);
                else if (key == "p") table.p = std::stoi(val);
                else if (key == "pipeline") table.pipeline = parse_pipeline(val);
                else if (key == "config_hash")
                    table.config_hash = std::stoull(val, nullptr, 16);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "N,errmax1,o1,errmax2,o2,errmax3,o3")
                throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                            ": unexpected header");
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        cols.resize(7);  // trailing empty order column
        table.Ns.push_back(std::stoi(cols[0]));
        auto num = [&](const std::string& v) { return v.empty() ? kNaN : std::stod(v); };
        table.errmax1.push_back(std::stod(cols[1]));
        table.o1.push_back(num(cols[2]));
        table.errmax2.push_back(std::stod(cols[3]));
        table.o2.push_back(num(cols[4]));
        table.errmax3.push_back(std::stod(cols[5]));
        table.o3.push_back(num(cols[6]));
    }
    if (!header_seen) throw std::invalid_argument("csv: missing header");
    return table;
}

CheckReport check_golden(const ErrorTable& table, const ErrorTable& golden,
                         double err_rtol, double order_atol) {
    if (table.Ns != golden.Ns)
        throw std::invalid_argument("check_golden: schema mismatch (N rows differ)");
    CheckReport report;
    auto cell = [&](const char* name, size_t i, double got, double want, bool relative) {
        bool ok;
        if (relative) {
            ok = std::abs(got - want) <= err_rtol * std::max(std::abs(want), 1e-300);
        } else {
            ok = (std::isnan(got) && std::isnan(want)) ||
                 std::abs(got - want) <= order_atol;
        }
        if (!ok) {
            report.pass = false;
            report.failures.push_back("N=" + std::to_string(table.Ns[i]) + " " + name +
                                      ": got " + format_double("%.6e", got) +
                                      ", golden " + format_double("%.6e", want));
        }
    };
    for (size_t i = 0; i < table.Ns.size(); ++i) {
        cell("errmax1", i, table.errmax1[i], golden.errmax1[i], true);
        cell("errmax2", i, table.errmax2[i], golden.errmax2[i], true);
        cell("errmax3", i, table.errmax3[i], golden.errmax3[i], true);
        cell("o1", i, table.o1[i], golden.o1[i], false);
        cell("o2", i, table.o2[i], golden.o2[i], false);
        cell("o3", i, table.o3[i], golden.o3[i], false);
    }
    return report;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    auto as_int = [&](const std::string& v) {
        size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("expected integer: " + v);
        return r;
    };
    auto as_list = [&](const std::string& v) {
        std::string tmp = v;
        for (char& c : tmp)
            if (c == ',') c = ' ';
        return parse_number_list(tmp);
    };
    if (key == "example") {
        cfg = example_preset(as_int(value), cfg.d, cfg.p);
    } else if (key == "d") {
        cfg.d = as_int(value);
    } else if (key == "p") {
        cfg.p = as_int(value);
    } else if (key == "N") {
        cfg.Ns.clear();
        for (double v : as_list(value)) cfg.Ns.push_back(int(v));
    } else if (key == "surface") {
        cfg.surface_name = value;
    } else if (key == "surface_param") {
        cfg.surface_param = std::stod(value);
    } else if (key == "A") {
        const auto v = as_list(value);
        if (v.size() != 3) throw std::invalid_argument("A needs a11 a12 a22");
        cfg.A << v[0], v[1], v[1], v[2];
    } else if (key == "pipeline") {
        cfg.pipeline = parse_pipeline(value);
    } else if (key == "sources") {
        cfg.sources_1d = as_list(value);
    } else if (key == "gauss_order") {
        cfg.gauss_order = as_int(value);
    } else if (key == "moment_tol") {
        cfg.moment_tol = std::stod(value);
    } else if (key == "out") {
        cfg.out_path = value;
    } else if (key == "with_oracle") {
        cfg.with_oracle = value == "true" || value == "1";
    } else if (key == "check") {
        cfg.check = value == "true" || value == "1";
    } else if (key == "golden") {
        cfg.golden_path = value;
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<ExperimentConfig> configs;
    std::string line;
    long lineno = 0;
    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = strip(line.substr(0, line.find('#')));
        if (text.empty()) continue;
        if (text == "[experiment]") {
            configs.emplace_back();
            continue;
        }
        if (text.front() == '[')
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown section " + text);
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        if (configs.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": entry before [experiment] section");
        try {
            apply_config_entry(configs.back(), strip(text.substr(0, eq)),
                               strip(text.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    if (configs.empty())
        throw std::invalid_argument(path + ": no [experiment] section");
    return configs;
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
    long budget = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SQICUBE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) budget = std::min(budget, v);
    }
    const long T = std::min<long>(budget, n);
    if (T <= 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        Index i;
        while (!stop.load(std::memory_order_relaxed) && (i = next++) < n) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (long t = 1; t < T; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sqicube
