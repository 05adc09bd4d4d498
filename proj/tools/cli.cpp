#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ammlab/analytics.hpp"
#include "ammlab/cycle_model.hpp"
#include "ammlab/event_csv.hpp"
#include "ammlab/market_sim.hpp"
#include "ammlab/numeric.hpp"
#include "ammlab/pool.hpp"
#include "ammlab/pool_json.hpp"
#include "ammlab/range_model.hpp"
#include "ammlab/router.hpp"
#include "ammlab/walkthrough.hpp"

namespace ammlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

// Model assumptions fail; maps to exit code 2.
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// ==== parameter tables ====

template <class P>
using FieldTable = std::vector<std::pair<std::string, double P::*>>;

const FieldTable<range::RangeModelParams>& range_fields() {
    using P = range::RangeModelParams;
    static const FieldTable<P> t = {{"v", &P::v},         {"eta", &P::eta}, {"lambda_endow", &P::lambda_endow},
                                    {"ell", &P::ell},     {"h", &P::h},     {"r", &P::r},
                                    {"Delta", &P::Delta}, {"Gamma", &P::Gamma}};
    return t;
}

const FieldTable<cycle::CycleModelParams>& cycle_fields() {
    using P = cycle::CycleModelParams;
    static const FieldTable<P> t = {{"Q", &P::Q},         {"theta_rate", &P::theta_rate},
                                    {"lambda_rate", &P::lambda_rate}, {"Theta_big", &P::Theta_big},
                                    {"ell", &P::ell},     {"h", &P::h},
                                    {"Gamma", &P::Gamma}, {"Delta_gft", &P::Delta_gft}};
    return t;
}

template <class P>
double P::*find_field(const FieldTable<P>& t, const std::string& name) {
    for (const auto& [k, m] : t) {
        if (k == name) return m;
    }
    return nullptr;
}

template <class P>
bool has_field(const FieldTable<P>& t, const std::string& name) {
    return find_field(t, name) != nullptr;
}

template <class P>
P params_from(const json& j, const FieldTable<P>& t, P base) {
    require(j.is_object(), "params: must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        auto m = find_field(t, k);
        require(m != nullptr, "params." + k + ": unknown field");
        require(v.is_number(), "params." + k + ": must be a number");
        base.*m = v.template get<double>();
    }
    return base;
}

template <class P>
ojson params_to(const P& p, const FieldTable<P>& t) {
    ojson o = ojson::object();
    for (const auto& [k, m] : t) o[k] = p.*m;
    return o;
}

// Delta, when not given, follows the figure rule 1.1 (1+r) sqrt(1+h) at the
// effective h and r.
range::RangeModelParams range_params(const json& params) {
    auto p = params_from(params, range_fields(), range::RangeModelParams::defaults());
    if (!params.contains("Delta")) p.Delta = 1.1 * (1.0 + p.r) * std::sqrt(1.0 + p.h);
    return p;
}

cycle::CycleModelParams cycle_params(const json& params) {
    return params_from(params, cycle_fields(), cycle::CycleModelParams::defaults());
}

// ==== config files and overrides ====

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), what + ": cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path, const std::string& what) {
    try {
        return json::parse(read_file(path, what));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(what + ": '" + path + "' is not valid JSON: " + e.what());
    }
}

json parse_scalar(const std::string& s) {
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return json(s);
    }
}

// key=value; bare model parameter names land under params.
void apply_sets(json& cfg, const std::vector<std::string>& sets, const std::function<bool(const std::string&)>& is_param) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        require(eq != std::string::npos && eq > 0, "--set: expected key=value, got '" + s + "'");
        std::string key = s.substr(0, eq);
        const json val = parse_scalar(s.substr(eq + 1));
        if (key.rfind("params.", 0) == 0) {
            cfg["params"][key.substr(7)] = val;
        } else if (is_param(key)) {
            cfg["params"][key] = val;
        } else {
            cfg[key] = val;
        }
    }
}

std::string model_of(const json& cfg, const std::optional<std::string>& expected) {
    if (!cfg.contains("model")) {
        require(expected.has_value(), "model: missing, expected \"range\" or \"cycle\"");
        return *expected;
    }
    require(cfg["model"].is_string(), "model: must be a string");
    const auto m = cfg["model"].get<std::string>();
    require(m == "range" || m == "cycle", "model: expected \"range\" or \"cycle\", got \"" + m + "\"");
    if (expected) {
        require(m == *expected, "model: config describes \"" + m + "\" but the command asked for \"" + *expected + "\"");
    }
    return m;
}

bool is_model_param(const std::string& model, const std::string& key) {
    return model == "range" ? has_field(range_fields(), key) : has_field(cycle_fields(), key);
}

json load_config(const std::optional<std::string>& path, const std::vector<std::string>& sets,
                 const std::optional<std::string>& model) {
    json cfg = path ? read_json(*path, "--config") : json::object();
    require(cfg.is_object(), "--config: top level must be a JSON object");
    if (!cfg.contains("params")) cfg["params"] = json::object();
    const std::string m = model_of(cfg, model);
    apply_sets(cfg, sets, [&](const std::string& k) { return is_model_param(m, k); });
    cfg["model"] = m;
    return cfg;
}

// ==== simulation config ====

const std::vector<std::string> kSimKeys = {"model", "params", "horizon", "seed", "dt", "replications",
                                           "threads", "small_flow", "trade_unit", "lp_sample", "record_cycles"};

template <class T>
T field(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg[key];
    if constexpr (std::is_same_v<T, bool>) {
        require(v.is_boolean(), key + ": must be true or false");
    } else if constexpr (std::is_integral_v<T>) {
        require(v.is_number_integer() || v.is_number_unsigned(), key + ": must be an integer");
        if constexpr (std::is_unsigned_v<T>) require(v.is_number_unsigned(), key + ": must be nonnegative");
    } else if constexpr (std::is_floating_point_v<T>) {
        require(v.is_number(), key + ": must be a number");
    } else {
        require(v.is_string(), key + ": must be a string");
    }
    return v.get<T>();
}

void reject_unknown_keys(const json& cfg, const std::vector<std::string>& allowed) {
    for (const auto& [k, v] : cfg.items()) {
        require(std::find(allowed.begin(), allowed.end(), k) != allowed.end(), k + ": unknown config field");
    }
}

sim::SimConfig sim_config(const json& cfg) {
    reject_unknown_keys(cfg, kSimKeys);
    sim::SimConfig c;
    const auto m = cfg["model"].get<std::string>();
    c.model = m == "range" ? sim::SimModel::Range : sim::SimModel::Cycle;
    if (c.model == sim::SimModel::Range) {
        c.range = range_params(cfg["params"]);
    } else {
        c.cycle = cycle_params(cfg["params"]);
    }
    c.horizon = field<long long>(cfg, "horizon", c.horizon);
    c.seed = field<std::uint64_t>(cfg, "seed", c.seed);
    c.dt = field<double>(cfg, "dt", c.dt);
    c.replications = field<int>(cfg, "replications", c.replications);
    c.threads = field<int>(cfg, "threads", c.threads);
    const auto flow = field<std::string>(cfg, "small_flow", "continuous");
    require(flow == "continuous" || flow == "discrete", "small_flow: expected \"continuous\" or \"discrete\"");
    c.small_flow = flow == "discrete" ? sim::SmallFlow::Discrete : sim::SmallFlow::Continuous;
    c.trade_unit = field<double>(cfg, "trade_unit", c.trade_unit);
    c.lp_sample = field<long long>(cfg, "lp_sample", c.lp_sample);
    c.record_cycles = field<bool>(cfg, "record_cycles", c.record_cycles);
    c.validate();
    return c;
}

ojson sim_config_json(const sim::SimConfig& c) {
    ojson o;
    o["model"] = sim::to_string(c.model);
    o["params"] = c.model == sim::SimModel::Range ? params_to(c.range, range_fields()) : params_to(c.cycle, cycle_fields());
    o["horizon"] = c.horizon;
    o["seed"] = c.seed;
    o["dt"] = c.dt;
    o["replications"] = c.replications;
    o["threads"] = c.threads;
    o["small_flow"] = c.small_flow == sim::SmallFlow::Discrete ? "discrete" : "continuous";
    o["trade_unit"] = c.trade_unit;
    o["lp_sample"] = c.lp_sample;
    o["record_cycles"] = c.record_cycles;
    return o;
}

void check_cycle_assumptions(const cycle::CycleModelParams& p) {
    // Only the demand condition is fatal; Q*ell <= Gamma picks the all-high regime.
    for (const auto& v : p.assumption_violations()) {
        if (v.rfind("Theta_big", 0) == 0) throw Infeasible(v);
    }
}

// ==== output ====

std::string cell(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return numeric::format_sig(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Flat objects become a header line plus one row per object.
std::string rows_to_csv(const ojson& rows) {
    std::ostringstream os;
    if (rows.empty()) return "";
    bool first = true;
    for (const auto& [k, v] : rows.front().items()) {
        os << (first ? "" : ",") << k;
        first = false;
    }
    os << '\n';
    for (const auto& r : rows) {
        first = true;
        for (const auto& [k, v] : r.items()) {
            os << (first ? "" : ",") << cell(v);
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

ojson csv_cell(const std::string& s) {
    if (s.empty()) return nullptr;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(x)) {
        if (s.find_first_of(".eE") == std::string::npos && std::abs(x) < 9e15) return static_cast<long long>(x);
        return x;
    }
    if (s == "true") return true;
    if (s == "false") return false;
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// The library's CSV writers are the source of truth; JSON output mirrors them.
ojson csv_to_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    ojson rows = ojson::array();
    if (!std::getline(in, line)) return rows;
    const auto header = split(line, ',');
    while (std::getline(in, line)) {
        const auto cells = split(line, ',');
        ojson r = ojson::object();
        for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = i < cells.size() ? csv_cell(cells[i]) : nullptr;
        rows.push_back(r);
    }
    return rows;
}

enum class Format { Csv, Json };

struct Sink {
    std::ostream& out;
    std::optional<fs::path> dir;
    ojson effective;

    void emit(const std::string& name, const std::string& body) {
        out << body;
        if (!body.empty() && body.back() != '\n') out << '\n';
        if (dir) write(name, body);
    }

    void write(const std::string& name, const std::string& body) {
        std::error_code ec;
        fs::create_directories(*dir, ec);
        require(!ec, "--out: cannot create '" + dir->string() + "': " + ec.message());
        std::ofstream f(*dir / name, std::ios::binary);
        require(static_cast<bool>(f), "--out: cannot write '" + (*dir / name).string() + "'");
        f << body;
        if (!body.empty() && body.back() != '\n') f << '\n';
    }

    void finish() {
        if (dir) write("effective_config.json", effective.dump(2));
    }
};

std::string render(const ojson& rows, Format f, const std::string& csv = {}) {
    if (f == Format::Json) return rows.dump(2) + "\n";
    return csv.empty() ? rows_to_csv(rows) : csv;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; results stay in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errs(n);
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    if (workers == 1 || n < 2) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

ojson optional_json(const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); }

ojson strings(const std::vector<std::string>& xs) {
    ojson a = ojson::array();
    for (const auto& x : xs) a.push_back(x);
    return a;
}

// ==== equilibrium ====

ojson range_row(const range::RangeModelParams& p) {
    const auto eq = range::solve_equilibrium(p);
    ojson o;
    o["regime"] = range::to_string(eq.regime);
    o["q_t"] = optional_json(eq.q_t);
    o["q_lo_h"] = eq.q_lo_h;
    o["q_lo_l"] = eq.q_lo_l;
    o["w_low"] = eq.w_low;
    o["pool_supply_low"] = eq.pool_supply_low;
    o["pool_supply_high"] = eq.pool_supply_high;
    if (eq.regime == range::RangeRegime::Infeasible) {
        o["market_share_low"] = nullptr;
        o["gains_from_trade"] = nullptr;
    } else {
        o["market_share_low"] = range::market_share_low(eq, p);
        const range::PoolSupply pools[2] = {{p.ell, eq.pool_supply_low}, {p.h, eq.pool_supply_high}};
        o["gains_from_trade"] = range::gains_from_trade(pools, p);
    }
    o["ell_side"] = range::to_string(eq.ell_side);
    o["h_side"] = range::to_string(eq.h_side);
    return o;
}

int equilibrium_range(const json& cfg, Format f, Sink& sink) {
    reject_unknown_keys(cfg, kSimKeys);
    const auto p = range_params(cfg["params"]);
    p.validate();
    sink.effective["params"] = params_to(p, range_fields());
    const auto eq = range::solve_equilibrium(p);
    ojson o = range_row(p);
    o["yield_threshold"] = range::yield_threshold(p);
    o["yield_low"] = range::liquidity_yield(p.ell, p);
    o["yield_high"] = range::liquidity_yield(p.h, p);
    o["adverse_low"] = range::adverse_selection(p.ell, p);
    o["adverse_high"] = range::adverse_selection(p.h, p);
    o["depletion_low"] = range::depletion_probability(p.ell, p);
    o["depletion_high"] = range::depletion_probability(p.h, p);
    if (f == Format::Json) o["assumption_violations"] = strings(p.assumption_violations());
    sink.emit(f == Format::Json ? "equilibrium.json" : "equilibrium.csv",
              f == Format::Json ? o.dump(2) + "\n" : rows_to_csv(ojson::array({o})));
    if (eq.regime == range::RangeRegime::Infeasible) {
        std::string why = "range model assumptions violated";
        for (const auto& v : eq.violations) why += "; " + v;
        throw Infeasible(why);
    }
    return kExitOk;
}

ojson cycle_row(const cycle::CycleModelParams& p) {
    const auto eq = cycle::solve_cycle_equilibrium(p);
    ojson o;
    o["regime"] = cycle::to_string(eq.regime);
    o["q_t"] = eq.q_t;
    o["q_lo"] = eq.q_lo;
    o["w_low"] = eq.w_low;
    o["L_low"] = eq.L_low;
    o["L_high"] = eq.L_high;
    o["d_low"] = eq.d_low;
    o["d_high"] = eq.d_high;
    o["boundary_tie"] = eq.boundary_tie;
    return o;
}

int equilibrium_cycle(const json& cfg, Format f, Sink& sink) {
    reject_unknown_keys(cfg, kSimKeys);
    const auto p = cycle_params(cfg["params"]);
    p.validate();
    sink.effective["params"] = params_to(p, cycle_fields());
    check_cycle_assumptions(p);
    const auto eq = cycle::solve_cycle_equilibrium(p);
    ojson o = cycle_row(p);
    o["alternative_regime"] = eq.alternative_regime ? ojson(cycle::to_string(*eq.alternative_regime)) : ojson(nullptr);
    o["is_menu"] = cycle::menu_is(p.h, p.ell, p);
    o["is_single_h"] = cycle::single_pool_is(p.h, p);
    const auto opt = cycle::optimal_single_fee(p);
    o["f_star"] = opt.f_star;
    o["is_min"] = opt.is_min;
    o["dis_df"] = opt.dis_df;
    o["f_star_interior"] = opt.interior;
    o["lambert_branch"] = opt.matching_branch;
    if (f == Format::Json) {
        ojson lam = ojson::array();
        for (const auto& c : opt.lambert) {
            lam.push_back({{"branch", c.branch},
                           {"defined", c.defined},
                           {"f_star", c.defined ? ojson(c.f_star) : ojson(nullptr)},
                           {"rel_error", c.defined ? ojson(c.rel_error) : ojson(nullptr)},
                           {"matches", c.matches}});
        }
        o["lambert"] = lam;
        o["assumption_violations"] = strings(p.assumption_violations());
    }
    sink.emit(f == Format::Json ? "equilibrium.json" : "equilibrium.csv",
              f == Format::Json ? o.dump(2) + "\n" : rows_to_csv(ojson::array({o})));
    return kExitOk;
}

// ==== sweep ====

struct SweepAxis {
    std::string param;
    double min = 0.0;
    double max = 0.0;
    int points = 0;
};

template <class P>
ojson sweep_rows(const P& base, const FieldTable<P>& table, const SweepAxis& ax, int threads,
                 const std::function<ojson(const P&)>& row) {
    auto m = find_field(table, ax.param);
    const auto n = static_cast<std::size_t>(ax.points);
    auto rows = parallel_map<ojson>(n, threads, [&](std::size_t i) {
        P p = base;
        const double x = i + 1 == n ? ax.max : ax.min + (ax.max - ax.min) * static_cast<double>(i) / (n - 1);
        p.*m = x;
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("--min/--max: " + ax.param + "=" + numeric::format_sig(x) + " is invalid: " + e.what());
        }
        ojson o;
        o[ax.param] = x;
        o.update(row(p));
        return o;
    });
    ojson out = ojson::array();
    for (auto& r : rows) out.push_back(std::move(r));
    return out;
}

int sweep(const json& cfg, const SweepAxis& ax, int threads, Format f, Sink& sink) {
    reject_unknown_keys(cfg, kSimKeys);
    const auto model = cfg["model"].get<std::string>();
    require(ax.points >= 2, "--points: must be at least 2");
    require(std::isfinite(ax.min) && std::isfinite(ax.max) && ax.max > ax.min, "--max: must exceed --min");
    require(is_model_param(model, ax.param), "--param: unknown parameter '" + ax.param + "' for the " + model + " model");
    sink.effective["sweep"] = {{"param", ax.param}, {"min", ax.min}, {"max", ax.max}, {"points", ax.points}};
    ojson rows;
    if (model == "range") {
        const auto p = range_params(cfg["params"]);
        sink.effective["params"] = params_to(p, range_fields());
        rows = sweep_rows<range::RangeModelParams>(p, range_fields(), ax, threads, range_row);
    } else {
        const auto p = cycle_params(cfg["params"]);
        sink.effective["params"] = params_to(p, cycle_fields());
        check_cycle_assumptions(p);
        rows = sweep_rows<cycle::CycleModelParams>(p, cycle_fields(), ax, threads, [](const auto& q) {
            check_cycle_assumptions(q);
            return cycle_row(q);
        });
    }
    sink.emit(f == Format::Json ? "sweep.json" : "sweep.csv", render(rows, f));
    return kExitOk;
}

// ==== simulate ====

int simulate(const json& cfg, std::optional<std::uint64_t> seed, std::optional<int> threads, Format f, Sink& sink) {
    json merged = cfg;
    if (seed) merged["seed"] = *seed;
    if (threads) merged["threads"] = *threads;
    const auto c = sim_config(merged);
    sink.effective = sim_config_json(c);
    sink.effective["command"] = "simulate";
    if (c.model == sim::SimModel::Cycle) check_cycle_assumptions(c.cycle);
    sim::SimReport r;
    try {
        r = sim::simulate(c);
    } catch (const std::domain_error& e) {
        throw Infeasible(e.what());
    }
    if (f == Format::Json) {
        sink.emit("report.json", sim::report_to_json(r));
    } else {
        ojson rows = ojson::array();
        for (const auto& chk : sim::prediction_checks(r)) {
            rows.push_back({{"check", chk.name},
                            {"status", sim::to_string(chk.status)},
                            {"lhs", chk.lhs},
                            {"rhs", chk.rhs},
                            {"se", chk.se},
                            {"z", chk.z}});
        }
        sink.emit("checks.csv", rows_to_csv(rows));
    }
    if (c.record_cycles && sink.dir) sink.write("cycles.csv", sim::cycles_to_csv(r));
    return kExitOk;
}

// ==== analyze ====

int analyze(const std::string& kind, const std::string& path, Format f, Sink& sink) {
    using namespace analytics;
    sink.effective["analysis"] = kind;
    sink.effective["events"] = path;
    read_file(path, "--events");  // names the flag when the file is missing
    const auto events = read_events_csv(path);
    std::string csv;
    if (kind == "lvr") {
        csv = lvr_to_csv(lvr_table(events, LvrBenchmark::Instant), lvr_table(events, LvrBenchmark::Lagged));
    } else if (kind == "il") {
        csv = il_to_csv(build_panel(events));
    } else if (kind == "jit") {
        const auto ev = sorted_events(drop_empty_burns(events));
        csv = jit_to_csv(ev, jit_detect(ev));
    } else if (kind == "cycles") {
        csv = analytics::cycles_to_csv(liquidity_cycles(sorted_events(events)));
    } else {
        csv = panel_to_csv(build_panel(events));
    }
    const std::string name = kind + (f == Format::Json ? ".json" : ".csv");
    sink.emit(name, f == Format::Json ? csv_to_rows(csv).dump(2) + "\n" : csv);
    return kExitOk;
}

// ==== route ====

int route(const std::vector<std::string>& pools, const std::vector<double>& sizes, double gas, int threads, Format f,
          Sink& sink) {
    require(pools.size() == 2, "--pools: expected two snapshot files (low fee, high fee)");
    require(!sizes.empty(), "--sizes: at least one trade size is required");
    for (double s : sizes) require(std::isfinite(s) && s >= 0.0, "--sizes: trade sizes must be finite and nonnegative");
    require(std::isfinite(gas) && gas >= 0.0, "--gas: must be finite and nonnegative");
    const auto low = pool::pool_from_json(read_file(pools[0], "--pools"));
    const auto high = pool::pool_from_json(read_file(pools[1], "--pools"));
    router::RouteOptions opt;
    opt.gas_per_pool = gas;
    sink.effective["pools"] = pools;
    sink.effective["sizes"] = sizes;
    sink.effective["gas_per_pool"] = gas;
    const double depth = low.token_depth_above() + high.token_depth_above();
    auto results = parallel_map<router::RouteResult>(sizes.size(), threads, [&](std::size_t i) {
        try {
            return router::route(sizes[i], low, high, opt);
        } catch (const pool::InsufficientDepth&) {
            throw std::invalid_argument("--sizes: " + numeric::format_sig(sizes[i]) +
                                        " exceeds the combined depth " + numeric::format_sig(depth));
        }
    });
    const auto csv = router::routes_to_csv(results);
    sink.emit(f == Format::Json ? "routes.json" : "routes.csv", f == Format::Json ? csv_to_rows(csv).dump(2) + "\n" : csv);
    return kExitOk;
}

// ==== pool demo ====

int pool_demo(Format f, Sink& sink) {
    const auto w = pool::run_walkthrough();
    ojson o;
    o["price"] = w.price;
    o["L_A"] = w.l_a;
    o["L_B"] = w.l_b;
    o["deposit_A_usdt"] = w.deposit_a.numeraire;
    o["deposit_A_eth"] = w.deposit_a.token;
    o["deposit_B_usdt"] = w.deposit_b.numeraire;
    o["deposit_B_eth"] = w.deposit_b.token;
    o["stage1_eth"] = w.stage1_token;
    o["stage1_usdt"] = w.stage1_numeraire;
    o["stage1_fee"] = w.stage1_fee;
    o["stage2_eth"] = w.stage2_token;
    o["stage2_usdt"] = w.stage2_numeraire;
    o["stage2_fee"] = w.stage2_fee;
    o["stage2_fee_A"] = w.stage2_fee_a;
    o["stage2_fee_B"] = w.stage2_fee_b;
    o["fee_split"] = w.stage2_fee_a / w.stage2_fee_b;
    o["liquidity_ratio"] = w.l_a / w.l_b;
    o["end_price"] = w.end_price;
    o["average_price"] = w.average_price;
    sink.effective["demo"] = "walkthrough";
    sink.emit(f == Format::Json ? "pool_demo.json" : "pool_demo.csv",
              f == Format::Json ? o.dump(2) + "\n" : rows_to_csv(ojson::array({o})));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ammlab: fee-tier AMM models, simulation, analytics and routing", "ammlab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::vector<std::string> sets;
    app.add_option("--format", format, "csv or json (default depends on the command)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_dir, "output directory (default $" + std::string(kOutputDirEnv) + ")");
    app.add_option("--threads", threads, "worker threads for sweeps, replications and routing")
        ->check(CLI::PositiveNumber);
    app.add_option("--set", sets, "override a config field, key=value (repeatable)");

    std::string model;
    std::optional<std::string> config;
    auto* eq = app.add_subcommand("equilibrium", "solve a model's equilibrium");
    eq->add_option("model", model, "range or cycle")->required()->check(CLI::IsMember({"range", "cycle"}));
    eq->add_option("--config", config, "model config (JSON)")->check(CLI::ExistingFile);

    SweepAxis ax;
    auto* sw = app.add_subcommand("sweep", "solve the equilibrium along one parameter");
    sw->add_option("model", model, "range or cycle")->required()->check(CLI::IsMember({"range", "cycle"}));
    sw->add_option("--config", config, "model config (JSON)")->check(CLI::ExistingFile);
    sw->add_option("--param", ax.param, "parameter to vary")->required();
    sw->add_option("--min", ax.min)->required();
    sw->add_option("--max", ax.max)->required();
    sw->add_option("--points", ax.points)->required();

    std::optional<std::uint64_t> seed;
    auto* sm = app.add_subcommand("simulate", "run the market simulator");
    sm->add_option("--config", config, "simulation config (JSON)")->required()->check(CLI::ExistingFile);
    sm->add_option("--seed", seed, "overrides the config seed");

    std::string kind;
    std::string events;
    auto* an = app.add_subcommand("analyze", "event-log analytics");
    an->add_option("kind", kind, "lvr, il, jit, cycles or panel")
        ->required()
        ->check(CLI::IsMember({"lvr", "il", "jit", "cycles", "panel"}));
    an->add_option("--events", events, "event CSV")->required();

    std::vector<std::string> pools;
    std::vector<double> sizes;
    double gas = 0.0;
    auto* rt = app.add_subcommand("route", "split purchases across two pools");
    rt->add_option("--pools", pools, "low-fee and high-fee pool snapshots (JSON)")->required()->expected(2);
    rt->add_option("--sizes", sizes, "trade sizes in tokens")->required()->delimiter(',');
    rt->add_option("--gas", gas, "fixed cost per pool touched");

    std::string what;
    auto* pl = app.add_subcommand("pool", "pool engine utilities");
    pl->add_option("what", what, "demo")->required()->check(CLI::IsMember({"demo"}));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitValidation;
    }

    Sink sink{out, std::nullopt, ojson::object()};
    if (out_dir) {
        sink.dir = *out_dir;
    } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
        sink.dir = env;
    }
    auto fmt_or = [&](Format def) {
        if (format.empty()) return def;
        return format == "json" ? Format::Json : Format::Csv;
    };

    int code = kExitOk;
    try {
        if (*eq) {
            const auto cfg = load_config(config, sets, model);
            sink.effective = {{"command", "equilibrium"}, {"model", model}};
            code = model == "range" ? equilibrium_range(cfg, fmt_or(Format::Json), sink)
                                    : equilibrium_cycle(cfg, fmt_or(Format::Json), sink);
        } else if (*sw) {
            const auto cfg = load_config(config, sets, model);
            sink.effective = {{"command", "sweep"}, {"model", model}};
            code = sweep(cfg, ax, threads.value_or(1), fmt_or(Format::Csv), sink);
        } else if (*sm) {
            const auto cfg = load_config(config, sets, std::nullopt);
            code = simulate(cfg, seed, threads, fmt_or(Format::Json), sink);
        } else if (*an) {
            require(sets.empty(), "--set: analyze takes no config");
            sink.effective = {{"command", "analyze"}};
            code = analyze(kind, events, fmt_or(Format::Csv), sink);
        } else if (*rt) {
            require(sets.empty(), "--set: route takes no config");
            sink.effective = {{"command", "route"}};
            code = route(pools, sizes, gas, threads.value_or(1), fmt_or(Format::Csv), sink);
        } else if (*pl) {
            require(sets.empty(), "--set: pool demo takes no config");
            sink.effective = {{"command", "pool demo"}};
            code = pool_demo(fmt_or(Format::Json), sink);
        }
        sink.finish();
    } catch (const Infeasible& e) {
        sink.finish();
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::domain_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return code;
}

}  // namespace ammlab::cli
