#pragma once

// Batch command-line surface. Each command runs one experiment family, writes
// a CSV artifact and a JSON summary, and reports internal checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coefficients.hpp"
#include "errors.hpp"
#include "geodesy.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "packing.hpp"

namespace pickmetrics::cli {

/// Malformed, conflicting or missing configuration; the message names the key.
struct ConfigError : PreconditionError {
    using PreconditionError::PreconditionError;
};

enum class Command { Coeffs, Metric, Length, Separate, Obstruct, EmbedCheck };

inline const std::vector<std::pair<Command, std::string>>& command_names() {
    static const std::vector<std::pair<Command, std::string>> names{
        {Command::Coeffs, "coeffs"},   {Command::Metric, "metric"},     {Command::Length, "length"},
        {Command::Separate, "separate"}, {Command::Obstruct, "obstruct"}, {Command::EmbedCheck, "embed-check"}};
    return names;
}

inline std::string to_string(Command c) {
    for (const auto& [cmd, name] : command_names())
        if (cmd == c) return name;
    return "?";
}

inline std::optional<Command> command_from_string(const std::string& s) {
    for (const auto& [cmd, name] : command_names())
        if (name == s) return cmd;
    return std::nullopt;
}

struct RunConfig {
    Command command = Command::Coeffs;
    std::map<std::string, std::string> params;
    std::string output_path;
    std::uint64_t seed = 20240601;

    bool has(const std::string& key) const { return params.count(key) > 0; }

    std::string get(const std::string& key) const {
        auto it = params.find(key);
        if (it == params.end()) throw ConfigError("missing parameter --" + key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get(key) : fallback;
    }

    double get_double(const std::string& key) const {
        const std::string s = get(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("malformed value for --" + key + ": '" + s + "' is not a number");
        }
    }

    double get_double_or(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }

    long long get_int(const std::string& key) const {
        const std::string s = get(key);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("malformed value for --" + key + ": '" + s + "' is not an integer");
        }
    }

    long long get_int_or(const std::string& key, long long fallback) const { return has(key) ? get_int(key) : fallback; }
};

namespace detail {

struct CommandKeys {
    std::vector<std::string> keys;
    std::vector<std::string> required;
};

inline const CommandKeys& keys_for(Command c) {
    static const std::map<Command, CommandKeys> table{
        {Command::Coeffs, {{"n-max", "method"}, {"n-max"}}},
        {Command::Metric, {{"kernel", "z", "w", "a"}, {"kernel", "z", "w"}}},
        {Command::Length, {{"r", "u", "tol"}, {}}},
        {Command::Separate, {{"r", "u", "eps", "mode", "d", "samples"}, {"eps"}}},
        {Command::Obstruct, {{"d", "L", "m", "eps", "k-max"}, {"d"}}},
        {Command::EmbedCheck, {{"grid", "trunc", "radius", "gap-tol"}, {}}},
    };
    return table.at(c);
}

inline std::string json_scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ConfigError("config file: value of '" + key + "' must be a number or string");
}

inline std::string normalize_key(std::string k) {
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

inline void validate(RunConfig& cfg) {
    const CommandKeys& ck = keys_for(cfg.command);
    for (const auto& [k, v] : cfg.params)
        if (std::find(ck.keys.begin(), ck.keys.end(), k) == ck.keys.end())
            throw ConfigError("unknown parameter --" + k + " for command " + to_string(cfg.command));
    for (const auto& k : ck.required)
        if (!cfg.has(k)) throw ConfigError("missing required parameter --" + k + " for command " + to_string(cfg.command));

    // Type checks up front, before any computation.
    const std::vector<std::string> reals{"a", "r", "u", "tol", "eps", "L", "m", "radius", "gap-tol"};
    const std::vector<std::string> ints{"n-max", "d", "samples", "k-max", "grid", "trunc"};
    for (const auto& k : reals)
        if (cfg.has(k)) cfg.get_double(k);
    for (const auto& k : ints)
        if (cfg.has(k)) cfg.get_int(k);

    if (cfg.command == Command::Length || cfg.command == Command::Separate) {
        if (cfg.has("r") && cfg.has("u")) throw ConfigError("conflicting parameters --r and --u: give one radius");
        const bool greedy = cfg.get_or("mode", "lattice") == "greedy";
        if (!cfg.has("r") && !cfg.has("u") && !(cfg.command == Command::Separate && greedy))
            throw ConfigError("missing required parameter --r (or --u = 1 - r)");
    }
    if (cfg.command == Command::Coeffs) {
        const std::string m = cfg.get_or("method", "recursion");
        if (m != "recursion" && m != "integral" && m != "both")
            throw ConfigError("malformed value for --method: '" + m + "' (recursion|integral|both)");
    }
    if (cfg.command == Command::Separate) {
        const std::string m = cfg.get_or("mode", "lattice");
        if (m != "lattice" && m != "greedy") throw ConfigError("malformed value for --mode: '" + m + "' (lattice|greedy)");
    }
    if (cfg.command == Command::Metric) {
        const std::string k = cfg.get("kernel");
        if (k != "hardy" && k != "dirichlet" && k != "weighted" && k != "drury-arveson")
            throw ConfigError("malformed value for --kernel: '" + k + "' (hardy|dirichlet|weighted|drury-arveson)");
        if (k == "weighted" && !cfg.has("a")) throw ConfigError("missing required parameter --a for --kernel weighted");
    }
}

} // namespace detail

/// Parses `<command> --key value ...`. An optional JSON object (from `file` or
/// `--config PATH`) supplies defaults; flags given on the command line win.
inline RunConfig parse_config(const std::vector<std::string>& args, std::optional<std::string> file = std::nullopt) {
    CLI::App app{"pickmetrics"};
    app.require_subcommand(1);
    std::string config_path, out_path, summary_path;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON config file");

    std::map<std::string, std::string> values;
    std::map<Command, CLI::App*> subs;
    std::map<Command, std::map<std::string, CLI::Option*>> opts;
    std::map<Command, std::map<std::string, CLI::Option*>> common;
    for (const auto& [cmd, name] : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        subs[cmd] = sub;
        for (const auto& key : detail::keys_for(cmd).keys) opts[cmd][key] = sub->add_option("--" + key, values[name + "/" + key]);
        common[cmd]["out"] = sub->add_option("--out", out_path, "CSV output path");
        common[cmd]["summary"] = sub->add_option("--summary", summary_path, "JSON summary path");
        common[cmd]["seed"] = sub->add_option("--seed", seed, "seed for randomized trials");
        common[cmd]["config"] = sub->add_option("--config", config_path, "JSON config file");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (!args.empty() && !args.front().starts_with("-") && !command_from_string(args.front()))
            throw ConfigError("unknown command '" + args.front() + "'");
        throw ConfigError(std::string("invalid arguments: ") + e.what());
    }

    RunConfig cfg;
    for (const auto& [cmd, sub] : subs)
        if (sub->parsed()) cfg.command = cmd;
    const std::string cmd_name = to_string(cfg.command);

    if (!file && !config_path.empty()) file = config_path;
    nlohmann::json from_file = nlohmann::json::object();
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot read config file " + *file);
        try {
            in >> from_file;
        } catch (const std::exception& e) {
            throw ConfigError("config file " + *file + " is not valid JSON: " + e.what());
        }
        if (!from_file.is_object()) throw ConfigError("config file must hold a JSON object");
        if (from_file.contains("command") && from_file["command"] != cmd_name)
            throw ConfigError("conflicting values for command: file says " + from_file["command"].dump() + ", arguments say " + cmd_name);
    }

    for (const auto& [key, val] : from_file.items()) {
        const std::string k = detail::normalize_key(key);
        if (k == "command") continue;
        const std::string v = detail::json_scalar(val, k);
        if (k == "out") cfg.output_path = v;
        else if (k == "summary") cfg.params["summary"] = v;
        else if (k == "seed") {
            try {
                cfg.seed = std::stoull(v);
            } catch (const std::exception&) {
                throw ConfigError("malformed value for seed: '" + v + "'");
            }
        } else cfg.params[k] = v;
    }
    for (const auto& [key, opt] : opts[cfg.command])
        if (opt->count() > 0) cfg.params[key] = values[cmd_name + "/" + key];
    if (common[cfg.command]["out"]->count() > 0) cfg.output_path = out_path;
    if (common[cfg.command]["summary"]->count() > 0) cfg.params["summary"] = summary_path;
    if (common[cfg.command]["seed"]->count() > 0) cfg.seed = seed;
    if (cfg.output_path.empty()) cfg.output_path = cmd_name + ".csv";

    const std::string summary = cfg.params.count("summary") ? cfg.params["summary"] : "";
    cfg.params.erase("summary");
    detail::validate(cfg);
    if (!summary.empty()) cfg.params["summary"] = summary;
    return cfg;
}

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

struct RunSummary {
    std::string command;
    double wall_time = 0.0;
    int checks_passed = 0;
    int checks_failed = 0;
    std::vector<std::string> artifacts;
    std::vector<Check> checks;
    nlohmann::json results = nlohmann::json::object();

    int exit_code() const { return checks_failed == 0 ? 0 : 1; }
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Recorder {
public:
    explicit Recorder(RunSummary& s) : s_(s) {}
    void check(const std::string& name, bool ok, const std::string& detail = "") {
        s_.checks.push_back({name, ok, detail});
        (ok ? s_.checks_passed : s_.checks_failed) += 1;
    }

private:
    RunSummary& s_;
};

/// Writes `quantity,value` rows.
class QuantityTable {
public:
    void add(const std::string& name, double v) { rows_.emplace_back(name, fmt17(v)); }
    void add_text(const std::string& name, const std::string& v) { rows_.emplace_back(name, v); }
    void write(std::ostream& os) const {
        os << "quantity,value\n";
        for (const auto& [k, v] : rows_) os << k << ',' << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

inline std::vector<cplx> parse_coords(const std::string& key, const std::string& s) {
    std::vector<double> nums;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            nums.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("malformed value for --" + key + ": expected RE,IM[,RE,IM...], got '" + s + "'");
        }
    }
    if (nums.empty() || nums.size() % 2 != 0)
        throw ConfigError("malformed value for --" + key + ": expected an even number of reals, got '" + s + "'");
    std::vector<cplx> c;
    for (std::size_t i = 0; i < nums.size(); i += 2) c.emplace_back(nums[i], nums[i + 1]);
    return c;
}

inline BallPoint parse_point(const RunConfig& cfg, const std::string& key) {
    try {
        return BallPoint(parse_coords(key, cfg.get(key)));
    } catch (const DomainError& e) {
        throw ConfigError("invalid point for --" + key + ": " + e.what());
    }
}

inline double complement_of(const RunConfig& cfg) {
    if (cfg.has("u")) {
        const double u = cfg.get_double("u");
        if (!(u > 0.0 && u <= 1.0)) throw ConfigError("malformed value for --u: need 0 < u <= 1");
        return u;
    }
    const double r = cfg.get_double("r");
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("malformed value for --r: need 0 <= r < 1");
    return 1.0 - r;
}

inline void run_coeffs(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const long long n_max = cfg.get_int("n-max");
    if (n_max < 1 || n_max > 10'000'000) throw ConfigError("malformed value for --n-max: need 1 <= n-max <= 1e7");
    const std::string method = cfg.get_or("method", "recursion");
    if (method != "integral" && n_max > 100'000)
        throw ConfigError("--n-max above 1e5 is only supported with --method integral (recursion is O(n^2))");
    std::vector<CoeffTable> tables;
    if (method != "integral") tables.push_back(gregory_recursion(static_cast<int>(n_max)));
    if (method != "recursion") tables.push_back(gregory_integral_table(static_cast<int>(n_max)));
    std::vector<const CoeffTable*> ptrs;
    for (const auto& t : tables) ptrs.push_back(&t);
    write_coeff_csv(csv, ptrs);

    for (const auto& t : tables) {
        const std::string tag = method_name(t.method);
        const bool nonneg = std::all_of(t.values.begin(), t.values.end(), [](double v) { return v >= 0.0; });
        rec.check(tag + ":nonnegative", nonneg);
        const auto sums = t.partial_sums();
        bool mono = true;
        for (std::size_t i = 1; i < sums.size(); ++i) mono = mono && sums[i] >= sums[i - 1];
        rec.check(tag + ":partial_sums_bounded", mono && sums.back() <= 1.0 + 1e-12, "sum = " + fmt17(sums.back()));
        res[tag] = {{"c_1", t.c(1)}, {"c_n_max", t.c(t.n_max)}, {"partial_sum", sums.back()}, {"clamped", t.clamped.size()}};
    }
    if (tables.size() == 2) {
        double worst = 0.0;
        for (int n = 1; n <= n_max; ++n) worst = std::max(worst, std::abs(tables[0].c(n) - tables[1].c(n)));
        rec.check("cross_method_agreement", worst <= 1e-11, "max |diff| = " + fmt17(worst));
        res["cross_method_max_diff"] = worst;
    }
}

inline void run_metric(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const BallPoint z = parse_point(cfg, "z"), w = parse_point(cfg, "w");
    if (z.dim() != w.dim()) throw ConfigError("conflicting values for --z and --w: dimensions differ");
    const std::string kname = cfg.get("kernel");
    KernelSpec spec;
    if (kname == "hardy") spec = KernelSpec::hardy();
    else if (kname == "dirichlet") spec = KernelSpec::dirichlet();
    else if (kname == "weighted") {
        const double a = cfg.get_double("a");
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("malformed value for --a: need 0 < a < 1");
        spec = KernelSpec::weighted_dirichlet(a);
    } else spec = KernelSpec::drury_arveson(static_cast<int>(z.dim()));
    if (spec.on_disc() && z.dim() != 1) throw ConfigError("--z/--w: kernel " + kname + " takes disc points (one RE,IM pair)");

    QuantityTable t;
    const cplx kzw = kernel_eval(spec, z, w);
    t.add("kernel_zw_re", kzw.real());
    t.add("kernel_zw_im", kzw.imag());
    t.add("kernel_zz", kernel_diag(spec, z));
    t.add("kernel_ww", kernel_diag(spec, w));
    const double delta = delta_from_kernel(spec, z, w);
    const double pick = pick_two_point(spec, z, w);
    t.add("delta", delta);
    t.add("pick_two_point", pick);
    rec.check("delta_in_unit_interval", delta >= 0.0 && delta <= 1.0);
    rec.check("delta_equals_pick", std::abs(delta - pick) <= 1e-12, "diff = " + fmt17(std::abs(delta - pick)));
    res["delta"] = delta;
    res["pick_two_point"] = pick;

    if (spec.kind == KernelSpec::Kind::DruryArveson || z.dim() == 1) {
        const double rho = pseudohyperbolic(z, w);
        t.add("pseudohyperbolic", rho);
        if (rho < 1.0) t.add("bergman", bergman(z, w));
        res["pseudohyperbolic"] = rho;
        if (spec.kind == KernelSpec::Kind::DruryArveson || spec.kind == KernelSpec::Kind::Hardy)
            rec.check("pseudohyperbolic_equals_delta", std::abs(rho - delta) <= 1e-12, "diff = " + fmt17(std::abs(rho - delta)));
    }
    if (spec.kind == KernelSpec::Kind::Dirichlet) {
        const double closed = dirichlet_metric(z.as_disc(), w.as_disc());
        t.add("dirichlet_closed_form", closed);
        rec.check("closed_form_equals_delta", std::abs(closed - delta) <= 1e-12, "diff = " + fmt17(std::abs(closed - delta)));
    }
    if (spec.kind == KernelSpec::Kind::WeightedDirichlet) {
        const WeightedBounds b = weighted_metric_bounds(spec.a, z.as_disc(), w.as_disc());
        t.add("weighted_lower", b.lower);
        t.add("weighted_closed_form", b.value);
        t.add("weighted_upper", b.upper);
        rec.check("weighted_bounds_ordered", b.lower <= b.value + 1e-12 && b.value <= b.upper + 1e-12);
        rec.check("weighted_closed_form_equals_delta", std::abs(b.value - b.kernel_value) <= 1e-12);
    }
    t.write(csv);
}

inline void run_length(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const double u = complement_of(cfg);
    const double tol = cfg.get_double_or("tol", 1e-10);
    if (!(tol > 0.0)) throw ConfigError("malformed value for --tol: must be positive");
    const double r = 1.0 - u;
    QuantityTable t;
    t.add("r", r);
    t.add("u", u);
    const double len = radial_length_complement(u, tol);
    t.add("radial_length", len);
    res["radial_length"] = len;
    if (u < 1.0) {
        const double scale = std::sqrt(-std::log(u));
        const double M = estimate_M_complements(default_M_grid());
        t.add("log_scale", scale);
        t.add("ratio", len / scale);
        t.add("M", M);
        res["ratio"] = len / scale;
        res["M"] = M;
        rec.check("within_M_bound", len <= M * scale, "M = " + fmt17(M));
    }
    if (u >= 0.01 && u < 1.0) {
        const Curve seg = radial_segment(0.0, r);
        const double riem = riemannian_length_dirichlet(seg, tol);
        t.add("riemannian_length", riem);
        rec.check("riemannian_matches_radial", std::abs(riem - len) <= 10.0 * tol + 1e-12);
        const LengthResult poly = polyline_length(MetricId::kernel_delta(KernelSpec::dirichlet()), seg, 1e-7, 16);
        t.add("polyline_dirichlet", poly.value);
        t.add("polyline_depth", poly.refinement_depth);
        rec.check("polyline_matches_radial", std::abs(poly.value - len) <= 1e-6, "diff = " + fmt17(std::abs(poly.value - len)));
        const LengthResult prho = polyline_length(MetricId::pseudohyperbolic(1), seg, 1e-7, 16);
        t.add("polyline_rho", prho.value);
        t.add("atanh_r", std::atanh(r));
        rec.check("rho_length_equals_bergman", std::abs(prho.value - std::atanh(r)) <= 1e-5);
    }
    t.write(csv);
}

inline void run_separate(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const double eps = cfg.get_double("eps");
    if (cfg.get_or("mode", "lattice") == "greedy") {
        const long long d = cfg.get_int_or("d", 2);
        const long long samples = cfg.get_int_or("samples", 10000);
        const double u = cfg.has("r") || cfg.has("u") ? complement_of(cfg) : 0.1;
        if (d < 1 || d > 16) throw ConfigError("malformed value for --d: need 1 <= d <= 16");
        if (samples < 1 || samples > 1'000'000) throw ConfigError("malformed value for --samples: need 1..1e6");
        if (!(eps > 0.0)) throw ConfigError("malformed value for --eps: must be positive");
        const double r = 1.0 - u;
        std::mt19937_64 rng(cfg.seed);
        std::vector<BallPoint> pts;
        for (long long i = 0; i < samples; ++i) pts.push_back(uniform_ball_point(rng, static_cast<int>(d), r));
        const SeparatedSet s = greedy_separated(pts, MetricId::pseudohyperbolic(static_cast<int>(d)), eps);
        const double bound = duren_weir_bound(static_cast<int>(d), r, eps);
        write_points_csv(csv, s.points);
        rec.check("greedy_certificate", s.size() < 2 || s.min_pairwise >= eps);
        rec.check("within_duren_weir_bound", static_cast<double>(s.size()) <= bound, "bound = " + fmt17(bound));
        res["count"] = s.size();
        res["duren_weir_bound"] = bound;
        return;
    }
    const double u = complement_of(cfg);
    if (!(u < 1.0)) throw ConfigError("malformed value for --r: lattice needs 0 < r < 1");
    if (!(eps > 0.0 && eps < kCircleLimit)) throw ConfigError("malformed value for --eps: need 0 < eps < sqrt(3/4)");
    const CircleLattice lat = circle_lattice_complement(u, eps);
    write_points_csv(csv, lat.set.points);
    rec.check("certificate", lat.set.min_pairwise >= eps, "min pairwise = " + fmt17(lat.set.min_pairwise));
    rec.check("cardinality_lower_bound", static_cast<double>(lat.set.size()) >= 1.0 / std::sqrt(u));
    rec.check("circle_monotone", circle_monotonicity_check(1.0 - u, 1000));
    res["count"] = lat.set.size();
    res["adjacent_min"] = lat.adjacent_min;
    res["min_pairwise"] = lat.set.min_pairwise;
    res["full_certificate"] = lat.set.full_certificate;
}

inline void run_obstruct(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const long long d = cfg.get_int("d");
    const double L = cfg.get_double_or("L", 1.0), m = cfg.get_double_or("m", 1.0), eps = cfg.get_double_or("eps", 0.8);
    const long long k_max = cfg.get_int_or("k-max", 15);
    if (d < 1 || d > 64) throw ConfigError("malformed value for --d: need 1 <= d <= 64");
    if (k_max < 2 || k_max > 300) throw ConfigError("malformed value for --k-max: need 2 <= k-max <= 300");
    if (!(m > 0.0 && L >= m)) throw ConfigError("conflicting values for --L and --m: need L >= m > 0");
    if (!(eps > 0.0 && eps < kCircleLimit)) throw ConfigError("malformed value for --eps: need 0 < eps < sqrt(3/4)");
    const auto grid = log_grid(static_cast<int>(k_max));
    const ObstructionReport rep = obstruction_report(static_cast<int>(d), L, m, eps, grid);
    write_obstruction_csv(csv, rep);

    bool increasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) increasing = increasing && rep.rows[i].lower > rep.rows[i - 1].lower;
    const Slopes sl = final_decade_slopes(rep);
    const double target = -static_cast<double>(d) / (2.0 * d + 1.0);
    rec.check("lower_increasing", increasing);
    rec.check("r_star_found", rep.r_star_u.has_value());
    rec.check("slope_lower", std::abs(sl.lower + 0.5) <= 0.02, "slope = " + fmt17(sl.lower));
    rec.check("slope_upper", std::abs(sl.upper - target) <= 0.02, "slope = " + fmt17(sl.upper));
    res["alpha"] = rep.alpha;
    res["M"] = rep.M;
    res["envelope_threshold_u"] = rep.envelope.u0;
    res["lattice_threshold_u"] = rep.lattice_u0 ? nlohmann::json(*rep.lattice_u0) : nlohmann::json(nullptr);
    res["r_star_u"] = rep.r_star_u ? nlohmann::json(*rep.r_star_u) : nlohmann::json(nullptr);
    res["slope_lower"] = sl.lower;
    res["slope_upper"] = sl.upper;
}

inline void run_embed_check(const RunConfig& cfg, std::ostream& csv, Recorder& rec, nlohmann::json& res) {
    const long long G = cfg.get_int_or("grid", 5), N = cfg.get_int_or("trunc", 200);
    const double radius = cfg.get_double_or("radius", 0.7), gap_tol = cfg.get_double_or("gap-tol", 1e-6);
    if (G < 2 || G > 200) throw ConfigError("malformed value for --grid: need 2 <= grid <= 200");
    if (N < 1 || N > 20000) throw ConfigError("malformed value for --trunc: need 1 <= trunc <= 20000");
    if (!(radius > 0.0 && radius < 1.0)) throw ConfigError("malformed value for --radius: need 0 < radius < 1");
    const CoeffTable table = gregory_recursion(static_cast<int>(N));
    const auto pts = embedding_grid(static_cast<int>(G), radius);
    csv << "z_re,z_im,w_re,w_im,reconstruction_error,bound,isometry_gap\n";
    double worst_err = 0.0, worst_gap = 0.0;
    bool within = true;
    char buf[256];
    for (const auto& z : pts) {
        for (const auto& w : pts) {
            const double e = reconstruction_error(z, w, static_cast<int>(N), table);
            const double b = reconstruction_bound(z, w, static_cast<int>(N), table);
            const double g = embedding_isometry_gap(z, w, static_cast<int>(N), table);
            within = within && e <= b;
            worst_err = std::max(worst_err, e);
            worst_gap = std::max(worst_gap, g);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", z.value().real(), z.value().imag(),
                          w.value().real(), w.value().imag(), e, b, g);
            csv << buf;
        }
    }
    rec.check("reconstruction_within_bound", within);
    rec.check("isometry_gap_small", worst_gap <= gap_tol, "max gap = " + fmt17(worst_gap));
    res["max_reconstruction_error"] = worst_err;
    res["max_isometry_gap"] = worst_gap;
}

} // namespace detail

inline std::string summary_path_for(const RunConfig& cfg) {
    return cfg.has("summary") ? cfg.get("summary") : cfg.output_path + ".summary.json";
}

/// Runs one command, writing the CSV to cfg.output_path and a JSON summary next
/// to it. Throws ConfigError for unwritable paths or invalid parameters.
inline RunSummary run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.command = to_string(cfg.command);

    std::ofstream csv(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("cannot open output path " + cfg.output_path);
    const std::string json_path = summary_path_for(cfg);
    std::ofstream js(json_path, std::ios::binary | std::ios::trunc);
    if (!js) throw ConfigError("cannot open summary path " + json_path);

    // Buffer so that only complete artifacts reach the file.
    std::ostringstream buffer;
    detail::Recorder rec(summary);
    switch (cfg.command) {
        case Command::Coeffs: detail::run_coeffs(cfg, buffer, rec, summary.results); break;
        case Command::Metric: detail::run_metric(cfg, buffer, rec, summary.results); break;
        case Command::Length: detail::run_length(cfg, buffer, rec, summary.results); break;
        case Command::Separate: detail::run_separate(cfg, buffer, rec, summary.results); break;
        case Command::Obstruct: detail::run_obstruct(cfg, buffer, rec, summary.results); break;
        case Command::EmbedCheck: detail::run_embed_check(cfg, buffer, rec, summary.results); break;
    }
    csv << buffer.str();
    csv.close();
    summary.artifacts = {cfg.output_path, json_path};
    summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : summary.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    nlohmann::json out{{"command", summary.command},
                       {"params", cfg.params},
                       {"seed", cfg.seed},
                       {"wall_time_seconds", summary.wall_time},
                       {"checks_passed", summary.checks_passed},
                       {"checks_failed", summary.checks_failed},
                       {"checks", checks},
                       {"results", summary.results},
                       {"artifacts", summary.artifacts}};
    js << out.dump(2) << '\n';
    return summary;
}

/// Exit code for an exception escaping parse_config or run: 2 for
/// precondition/configuration errors, 3 for numerical non-convergence.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const std::overflow_error*>(&e)) return 3;
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::domain_error*>(&e) ||
        dynamic_cast<const SeparationError*>(&e))
        return 2;
    return 1;
}

} // namespace pickmetrics::cli
