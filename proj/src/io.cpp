#include "hjlab/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "hjlab/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hjlab {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// Quote a cell only when the dialect demands it.
std::string csv_cell(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += '"';
    return q;
}

} // namespace

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows) {
    // Binary mode pins the line ending to LF.
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigInvalid("cannot open for writing: " + path);
    auto emit = [&out](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_cell(cells[i]);
        }
        out << '\n';
    };
    emit(header);
    for (const auto &r : rows) emit(r);
}

namespace {

const json &need(const json &j, const char *field, const std::string &ctx) {
    if (!j.is_object() || !j.contains(field))
        throw ConfigInvalid(ctx + ": missing field \"" + field + "\"");
    return j.at(field);
}

std::string as_str(const json &v, const std::string &ctx) {
    if (!v.is_string()) throw ConfigInvalid(ctx + " must be a string");
    return v.get<std::string>();
}

double as_num(const json &v, const std::string &ctx) {
    if (!v.is_number()) throw ConfigInvalid(ctx + " must be a number");
    return v.get<double>();
}

std::vector<double> as_num_list(const json &v, const std::string &ctx) {
    if (!v.is_array()) throw ConfigInvalid(ctx + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto &e : v) out.push_back(as_num(e, ctx + " entries"));
    return out;
}

} // namespace

JunctionScenario scenario_from_json(const json &j) {
    JunctionScenario s;
    s.positions =
        as_num_list(need(j, "positions", "scenario"), "scenario.positions");
    for (std::size_t i = 0; i + 1 < s.positions.size(); ++i)
        if (!(s.positions[i] < s.positions[i + 1]))
            throw ConfigInvalid("scenario.positions must be strictly increasing");

    const json &br = need(j, "branches", "scenario");
    if (!br.is_array())
        throw ConfigInvalid(
            "scenario.branches must be an array of Hamiltonian descriptors");
    for (std::size_t i = 0; i < br.size(); ++i) {
        try {
            s.branches.push_back(QuasiConvexHamiltonian::from_descriptor(br[i]));
        } catch (const Error &e) {
            std::ostringstream os;
            os << "scenario.branches[" << i << "]: " << e.what();
            throw ConfigInvalid(os.str());
        }
    }

    const json &sch = need(j, "schedules", "scenario");
    if (!sch.is_array())
        throw ConfigInvalid(
            "scenario.schedules must be an array of {switch_times, values}");
    for (std::size_t i = 0; i < sch.size(); ++i) {
        std::ostringstream ctx;
        ctx << "scenario.schedules[" << i << "]";
        const auto times = as_num_list(need(sch[i], "switch_times", ctx.str()),
                                       ctx.str() + ".switch_times");
        const auto vals = as_num_list(need(sch[i], "values", ctx.str()),
                                      ctx.str() + ".values");
        try {
            s.schedules.emplace_back(times, vals);
        } catch (const Error &e) {
            throw ConfigInvalid(ctx.str() + ": " + e.what());
        }
    }

    try {
        s.validate();
    } catch (const Error &e) {
        throw ConfigInvalid(std::string("scenario: ") + e.what());
    }
    return s;
}

InitialDatum u0_from_json(const json &j) {
    if (j.is_null()) return InitialDatum::zero();
    const std::string kind = as_str(need(j, "kind", "u0"), "u0.kind");
    if (kind == "zero") return InitialDatum::zero();
    if (kind == "linear")
        return InitialDatum::linear(as_num(need(j, "slope", "u0"), "u0.slope"),
                                    j.value("offset", 0.0));
    if (kind == "kink")
        return InitialDatum::kink(
            as_num(need(j, "center", "u0"), "u0.center"),
            as_num(need(j, "slope_left", "u0"), "u0.slope_left"),
            as_num(need(j, "slope_right", "u0"), "u0.slope_right"),
            j.value("offset", 0.0));
    throw ConfigInvalid("u0.kind must be zero | linear | kink (got \"" + kind +
                        "\")");
}

SpaceTimeHamiltonian spacetime_from_json(const json &j) {
    const std::string kind = as_str(need(j, "kind", "hamiltonian"), "hamiltonian.kind");
    if (kind == "from_branch") {
        try {
            return SpaceTimeHamiltonian::from_hamiltonian(
                QuasiConvexHamiltonian::from_descriptor(
                    need(j, "branch", "hamiltonian")));
        } catch (const ConfigInvalid &) {
            throw;
        } catch (const Error &e) {
            throw ConfigInvalid(std::string("hamiltonian.branch: ") + e.what());
        }
    }
    if (kind == "vee_cosine") {
        const double amp = j.value("amplitude", 1.0);
        const double pi = std::acos(-1.0);
        auto H = SpaceTimeHamiltonian::stationary(
            [amp, pi](double x, double p) {
                return std::abs(p) - amp * (1.0 + std::cos(2.0 * pi * x)) / 2.0;
            },
            j.value("p_min", -3.0), j.value("p_max", 3.0));
        H.rho0 = 0.0; // periodic everywhere; no far-field claim
        return H;
    }
    throw ConfigInvalid("hamiltonian.kind must be from_branch | vee_cosine (got \"" +
                        kind + "\")");
}

ExperimentConfig parse_config(const json &j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.kind = as_str(need(j, "kind", "config"), "config.kind");
    const bool known = cfg.kind == "cauchy" || cfg.kind == "effective_hamiltonian" ||
                       cfg.kind == "flux_limiter" || cfg.kind == "epsilon_sweep" ||
                       cfg.kind == "traffic_checks";
    if (!known)
        throw ConfigInvalid("config.kind must be one of cauchy | "
                            "effective_hamiltonian | flux_limiter | "
                            "epsilon_sweep | traffic_checks (got \"" +
                            cfg.kind + "\")");

    if (cfg.kind == "effective_hamiltonian") {
        cfg.hamiltonian = need(j, "hamiltonian", "config");
        spacetime_from_json(cfg.hamiltonian); // fail at load, not mid-run
    } else {
        cfg.scenario = scenario_from_json(need(j, "scenario", "config"));
    }

    if (j.contains("u0")) cfg.u0 = u0_from_json(j.at("u0"));

    if (j.contains("numerics")) {
        const json &n = j.at("numerics");
        if (!n.is_object()) throw ConfigInvalid("config.numerics must be an object");
        cfg.dx = n.value("dx", cfg.dx);
        cfg.cfl_safety = n.value("cfl_safety", cfg.cfl_safety);
        cfg.T = n.value("T", cfg.T);
        if (n.contains("rho_schedule"))
            cfg.rho_schedule =
                as_num_list(n.at("rho_schedule"), "numerics.rho_schedule");
        if (n.contains("epsilons"))
            cfg.epsilons = as_num_list(n.at("epsilons"), "numerics.epsilons");
        cfg.tol = n.value("tol", cfg.tol);
        cfg.T_sweep = n.value("T_sweep", cfg.T_sweep);
        cfg.x_radius = n.value("x_radius", cfg.x_radius);
        cfg.dx_effective = n.value("dx_effective", cfg.dx_effective);
        cfg.oversample = n.value("oversample", cfg.oversample);
    }
    if (!(cfg.dx > 0)) throw ConfigInvalid("numerics.dx must be positive");
    if (!(cfg.cfl_safety > 0 && cfg.cfl_safety < 1))
        throw ConfigInvalid("numerics.cfl_safety must lie in (0, 1)");
    if (!(cfg.T > 0)) throw ConfigInvalid("numerics.T must be positive");
    if (!(cfg.tol > 0)) throw ConfigInvalid("numerics.tol must be positive");
    if (!(cfg.T_sweep > 0)) throw ConfigInvalid("numerics.T_sweep must be positive");
    if (!(cfg.dx_effective > 0))
        throw ConfigInvalid("numerics.dx_effective must be positive");
    if (cfg.oversample < 1)
        throw ConfigInvalid("numerics.oversample must be at least 1");

    cfg.x_lo = j.value("x_lo", cfg.x_lo);
    cfg.x_hi = j.value("x_hi", cfg.x_hi);
    if (!(cfg.x_lo < cfg.x_hi))
        throw ConfigInvalid("config.x_lo must be below x_hi");
    if (j.contains("snapshot_times"))
        cfg.snapshot_times =
            as_num_list(j.at("snapshot_times"), "config.snapshot_times");

    if (j.contains("p_values"))
        cfg.p_values = as_num_list(j.at("p_values"), "config.p_values");
    cfg.cell_nodes = j.value("cell_nodes", cfg.cell_nodes);
    cfg.cell_T = j.value("cell_T", cfg.cell_T);

    if (j.contains("checks")) {
        const json &c = j.at("checks");
        if (!c.is_array()) throw ConfigInvalid("config.checks must be an array");
        for (const auto &e : c)
            cfg.checks.push_back(as_str(e, "config.checks entries"));
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.n_random = j.value("n_random", cfg.n_random);
    if (cfg.n_random < 0) throw ConfigInvalid("config.n_random must be >= 0");
    if (j.contains("spacing_deltas"))
        cfg.spacing_deltas =
            as_num_list(j.at("spacing_deltas"), "config.spacing_deltas");
    if (j.contains("merge_scales"))
        cfg.merge_scales =
            as_num_list(j.at("merge_scales"), "config.merge_scales");
    cfg.output_dir = j.value("output_dir", std::string());
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigInvalid(path + " is not valid JSON: " + std::string(e.what()));
    }
    ExperimentConfig cfg = parse_config(j);
    cfg.label = fs::path(path).stem().string();
    if (cfg.label.empty()) cfg.label = "run";
    return cfg;
}

std::string default_output_root() {
    if (const char *env = std::getenv("HJLAB_OUT_ROOT"); env && *env) return env;
    return "runs";
}

namespace {

// Deterministic parallel map: slot i always holds f(items[i]) regardless of
// the job count, so downstream output is identical for any --jobs.
template <class T, class F>
auto parallel_map(const std::vector<T> &items, int jobs, F &&f) {
    using R = std::invoke_result_t<F &, const T &>;
    std::vector<std::optional<R>> slots(items.size());
    const std::size_t n_workers =
        std::min<std::size_t>(std::max(jobs, 1), items.size());
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) slots[i].emplace(f(items[i]));
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mx;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= items.size()) return;
                try {
                    slots[i].emplace(f(items[i]));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mx);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < n_workers; ++k) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (auto &s : slots) out.push_back(std::move(*s));
    return out;
}

struct KindOutcome {
    json result;
    json summary = json::object();
    bool gating_failed = false;
};

json grid_meta(const Grid1D &g) {
    std::vector<double> jx;
    jx.reserve(g.junction_indices.size());
    for (int idx : g.junction_indices) jx.push_back(g.x(idx));
    return json{{"x0", g.x0}, {"dx", g.dx}, {"n_nodes", g.n_nodes}, {"junctions", jx}};
}

json h_table(const QuasiConvexHamiltonian &h) {
    json t;
    t["p_min"] = h.p_min();
    t["p_max"] = h.p_max();
    t["values"] =
        std::vector<double>(h.values().data(), h.values().data() + h.values().size());
    if (h.has_closed_form()) t["descriptor"] = h.descriptor();
    return t;
}

KindOutcome run_cauchy(const ExperimentConfig &cfg, const fs::path &dir) {
    const Grid1D grid =
        Grid1D::over(cfg.x_lo, cfg.x_hi, cfg.dx, cfg.scenario.positions);
    SolveOptions opt;
    opt.snapshot_times = cfg.snapshot_times;
    if (opt.snapshot_times.empty())
        for (int k = 0; k <= 8; ++k)
            opt.snapshot_times.push_back(cfg.T * k / 8.0);
    // eps = 1 is the plain scenario problem; oversample 1 accepts any dx <= 1.
    const Trajectory traj = solve_oscillatory(cfg.scenario, 1.0, cfg.u0, cfg.T,
                                              grid, opt, 1, cfg.cfl_safety);

    std::vector<std::vector<std::string>> rows;
    for (const auto &s : traj.snapshots)
        for (int jn = 0; jn < s.grid.n_nodes; ++jn)
            rows.push_back(
                {fmt_g17(s.t), fmt_g17(s.grid.x(jn)), fmt_g17(s.values[jn])});
    write_csv((dir / "cauchy.csv").string(), {"t", "x", "u"}, rows);

    json res;
    res["kind"] = "cauchy";
    res["grid"] = grid_meta(grid);
    res["C_barrier"] = traj.C_barrier;
    res["lip_space_cert"] = traj.lip_space_cert;
    std::vector<double> ts;
    json certs = json::array();
    for (const auto &s : traj.snapshots) {
        ts.push_back(s.t);
        certs.push_back(
            {{"t", s.t}, {"lip_space", s.lip_space}, {"lip_time", s.lip_time}});
    }
    res["snapshot_times"] = ts;
    res["lipschitz"] = certs;
    const GridSolution &fin = traj.last();
    std::vector<double> xs(fin.grid.n_nodes), us(fin.grid.n_nodes);
    for (int jn = 0; jn < fin.grid.n_nodes; ++jn) {
        xs[jn] = fin.grid.x(jn);
        us[jn] = fin.values[jn];
    }
    res["final_profile"] = json{{"x", xs}, {"u", us}};

    KindOutcome out;
    out.result = std::move(res);
    out.summary = {{"snapshots", static_cast<int>(traj.snapshots.size())},
                   {"C_barrier", traj.C_barrier}};
    return out;
}

KindOutcome run_effective_h(const ExperimentConfig &cfg, const fs::path &dir,
                            int jobs) {
    if (cfg.p_values.empty())
        throw ConfigInvalid("config.p_values must be non-empty");
    const SpaceTimeHamiltonian H = spacetime_from_json(cfg.hamiltonian);
    const auto estimates =
        parallel_map(cfg.p_values, jobs, [&](double p) {
            return effective_hamiltonian(H, p, cfg.cell_nodes, cfg.cell_T);
        });

    std::vector<std::vector<std::string>> rows;
    json jrows = json::array();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto &e = estimates[i];
        rows.push_back({fmt_g17(cfg.p_values[i]), fmt_g17(e.lambda),
                        fmt_g17(e.lower), fmt_g17(e.upper)});
        jrows.push_back({{"p", cfg.p_values[i]},
                         {"H_bar", e.lambda},
                         {"lower", e.lower},
                         {"upper", e.upper}});
    }
    write_csv((dir / "effective_hamiltonian.csv").string(),
              {"p", "H_bar", "lower", "upper"}, rows);

    KindOutcome out;
    out.result = json{{"kind", "effective_hamiltonian"},
                      {"rows", jrows},
                      {"cell_nodes", cfg.cell_nodes},
                      {"T", cfg.cell_T}};
    out.summary = {{"points", static_cast<int>(estimates.size())}};
    return out;
}

KindOutcome run_flux_limiter(const ExperimentConfig &cfg, const fs::path &dir) {
    const CellParams prm{cfg.dx, cfg.T, cfg.cfl_safety,
                         std::numeric_limits<double>::infinity()};
    const EffectiveModel m =
        effective_flux_limiter(cfg.scenario, prm, cfg.rho_schedule, cfg.tol);

    std::vector<std::vector<std::string>> rows;
    json prov = json::array();
    for (const auto &pt : m.provenance) {
        rows.push_back({fmt_g17(pt.rho), fmt_g17(pt.lambda), fmt_g17(pt.lower),
                        fmt_g17(pt.upper)});
        prov.push_back({{"rho", pt.rho},
                        {"lambda", pt.lambda},
                        {"lower", pt.lower},
                        {"upper", pt.upper}});
    }
    write_csv((dir / "flux_limiter.csv").string(),
              {"rho", "lambda", "lower", "upper"}, rows);

    json res;
    res["kind"] = "flux_limiter";
    res["H_bar_L"] = h_table(m.H_bar_L);
    res["H_bar_R"] = h_table(m.H_bar_R);
    res["A_bar"] = m.A_bar;
    res["bracket"] = m.bracket_width;
    res["A0"] = m.A0;
    res["slopes"] = json{{"p_bar_L", m.slopes.p_bar_L},
                         {"p_hat_L", m.slopes.p_hat_L},
                         {"p_bar_R", m.slopes.p_bar_R},
                         {"p_hat_R", m.slopes.p_hat_R}};
    res["provenance"] = prov;

    KindOutcome out;
    out.result = std::move(res);
    out.summary = {{"A_bar", m.A_bar}, {"bracket", m.bracket_width}, {"A0", m.A0}};
    return out;
}

KindOutcome run_epsilon_sweep(const ExperimentConfig &cfg, const fs::path &dir) {
    const CellParams prm{cfg.dx, cfg.T, cfg.cfl_safety,
                         std::numeric_limits<double>::infinity()};
    const EffectiveModel m =
        effective_flux_limiter(cfg.scenario, prm, cfg.rho_schedule, cfg.tol);

    EpsilonSweep sw;
    sw.epsilons = cfg.epsilons;
    sw.T = cfg.T_sweep;
    sw.x_radius = cfg.x_radius;
    sw.dx_effective = cfg.dx_effective;
    sw.oversample = cfg.oversample;
    sw.u0 = cfg.u0;
    const ConvergenceReport rep = convergence_report(sw, cfg.scenario, m);

    std::vector<std::vector<std::string>> rows;
    json jrows = json::array();
    for (const auto &r : rep.rows) {
        rows.push_back({fmt_g17(r.eps), fmt_g17(r.dx), fmt_g17(r.dt),
                        fmt_g17(r.sup_error), fmt_g17(r.runtime_s)});
        jrows.push_back({{"eps", r.eps},
                         {"dx", r.dx},
                         {"dt", r.dt},
                         {"sup_error", r.sup_error},
                         {"runtime_s", r.runtime_s}});
    }
    write_csv((dir / "epsilon_sweep.csv").string(),
              {"eps", "dx", "dt", "sup_error", "runtime_s"}, rows);

    json prov = json::array();
    for (const auto &pt : m.provenance)
        prov.push_back({{"rho", pt.rho},
                        {"lambda", pt.lambda},
                        {"lower", pt.lower},
                        {"upper", pt.upper}});

    json res;
    res["kind"] = "epsilon_sweep";
    res["rows"] = jrows;
    res["window"] = json{{"t_min", rep.window.t_min},
                         {"t_max", rep.window.t_max},
                         {"x_lo", rep.window.x_lo},
                         {"x_hi", rep.window.x_hi}};
    res["monotone_tail"] = rep.monotone_tail;
    res["not_converging"] = rep.not_converging;
    res["effective"] = json{{"A_bar", m.A_bar},
                            {"bracket", m.bracket_width},
                            {"A0", m.A0},
                            {"provenance", prov}};

    KindOutcome out;
    out.result = std::move(res);
    out.gating_failed = !rep.monotone_tail || rep.not_converging;
    out.summary = {{"monotone_tail", rep.monotone_tail},
                   {"converging", !rep.not_converging},
                   {"final_sup_error",
                    rep.rows.empty() ? 0.0 : rep.rows.back().sup_error}};
    return out;
}

KindOutcome run_traffic(const ExperimentConfig &cfg, const fs::path &dir,
                        int jobs) {
    const CellParams prm{cfg.dx, cfg.T, cfg.cfl_safety,
                         std::numeric_limits<double>::infinity()};
    const JunctionScenario &base = cfg.scenario;
    const std::size_t N = base.n_junctions();
    if (N == 0)
        throw ConfigInvalid("traffic_checks: scenario.positions must name at "
                            "least one junction");

    std::vector<std::string> checks = cfg.checks;
    if (checks.empty()) {
        if (N == 1) checks.push_back("n1_identity");
        checks.push_back("lower_bound");
        checks.push_back("monotonicity");
        if (cfg.merge_scales.size() >= 2) checks.push_back("merging");
        checks.push_back("critical_distance");
    }

    std::vector<CheckReport> reports;
    for (const std::string &c : checks) {
        if (c == "n1_identity") {
            try {
                reports.push_back(check_n1_identity(base, prm, cfg.tol));
            } catch (const ToleranceExceeded &e) {
                CheckReport rep;
                rep.check = "n1_identity";
                rep.add({"A_bar vs <a>", mean_limiter(base.schedules.at(0)),
                         std::numeric_limits<double>::quiet_NaN(), 0.0, false,
                         e.what()});
                reports.push_back(rep);
            }
        } else if (c == "lower_bound") {
            // Draw every random scenario up front (sequentially, from the
            // seeded generator) so the set is independent of the job count.
            std::mt19937_64 rng(cfg.seed);
            std::vector<JunctionScenario> scens{base};
            for (int i = 0; i < cfg.n_random; ++i)
                scens.push_back(random_scenario(rng));
            const auto reps =
                parallel_map(scens, jobs, [&](const JunctionScenario &s) {
                    return check_lower_bound(s, prm, cfg.tol);
                });
            CheckReport rep;
            rep.check = "lower_bound";
            for (std::size_t i = 0; i < reps.size(); ++i) {
                CheckRow row = reps[i].rows.at(0);
                row.name = i == 0 ? "base" : "random_" + std::to_string(i - 1);
                rep.add(row);
            }
            reports.push_back(rep);
        } else if (c == "monotonicity") {
            reports.push_back(check_monotonicity_in_spacing(
                base, cfg.spacing_deltas, prm, cfg.tol));
        } else if (c == "merging") {
            reports.push_back(
                check_merging_limit(base, cfg.merge_scales, prm, cfg.tol));
        } else if (c == "critical_distance") {
            const CriticalDistance d = critical_distance_estimate(base);
            CheckReport rep;
            rep.check = "critical_distance";
            rep.add({"d0", d.d0, d.d0, 0.0, true,
                     d.degenerate_level ? "degenerate level: any spacing works"
                                        : "sufficient spacing, not sharp"});
            reports.push_back(rep);
        } else {
            throw ConfigInvalid("config.checks: unknown check \"" + c + "\"");
        }
    }

    std::vector<std::vector<std::string>> rows;
    json jreports = json::array();
    bool all_pass = true;
    for (const auto &rep : reports) {
        json jrows = json::array();
        for (const auto &r : rep.rows) {
            rows.push_back({rep.check, r.name, fmt_g17(r.expected),
                            fmt_g17(r.computed), fmt_g17(r.bracket),
                            r.pass ? "1" : "0", r.note});
            jrows.push_back({{"name", r.name},
                             {"expected", r.expected},
                             {"computed", r.computed},
                             {"bracket", r.bracket},
                             {"pass", r.pass},
                             {"note", r.note}});
        }
        jreports.push_back(
            {{"check", rep.check}, {"pass", rep.pass}, {"rows", jrows}});
        all_pass = all_pass && rep.pass;
    }
    write_csv((dir / "traffic_checks.csv").string(),
              {"check", "name", "expected", "computed", "bracket", "pass", "note"},
              rows);

    // (spacing, A_bar) curve for plotting, from whichever sweep ran.
    json curve = json::array();
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < base.positions.size(); ++i)
        min_gap = std::min(min_gap, base.positions[i + 1] - base.positions[i]);
    for (const auto &rep : reports) {
        if (rep.check != "merging_limit" || N < 2) continue;
        for (std::size_t i = 0;
             i < rep.rows.size() && i < cfg.merge_scales.size(); ++i)
            curve.push_back({{"ell", cfg.merge_scales[i] * min_gap},
                             {"A_bar", rep.rows[i].computed},
                             {"bracket", rep.rows[i].bracket}});
    }
    if (curve.empty() && N == 2) {
        for (const auto &rep : reports) {
            if (rep.check != "monotonicity_in_spacing" || rep.rows.size() < 2)
                continue;
            curve.push_back({{"ell", min_gap},
                             {"A_bar", rep.rows[0].computed},
                             {"bracket", rep.rows[0].bracket}});
            for (std::size_t i = 1;
                 i < rep.rows.size() && i - 1 < cfg.spacing_deltas.size(); ++i)
                curve.push_back({{"ell", min_gap + cfg.spacing_deltas[i - 1]},
                                 {"A_bar", rep.rows[i].computed},
                                 {"bracket", rep.rows[i].bracket}});
        }
    }

    json res;
    res["kind"] = "traffic_checks";
    res["reports"] = jreports;
    res["spacing_curve"] = curve;
    res["all_pass"] = all_pass;

    int n_rows = 0, n_failed = 0;
    for (const auto &rep : reports)
        for (const auto &r : rep.rows) {
            ++n_rows;
            if (!r.pass) ++n_failed;
        }

    KindOutcome out;
    out.result = std::move(res);
    out.gating_failed = !all_pass;
    out.summary = {{"checks", static_cast<int>(reports.size())},
                   {"rows", n_rows},
                   {"failed_rows", n_failed}};
    return out;
}

} // namespace

RunResult run_experiment(const ExperimentConfig &cfg, const std::string &out_dir,
                         int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = out_dir.empty()
                             ? fs::path(default_output_root()) / cfg.label
                             : fs::path(out_dir);
    fs::create_directories(dir);

    json manifest;
    manifest["version"] = version_string;
    manifest["kind"] = cfg.kind;
    manifest["config"] = cfg.raw.is_null() ? json::object() : cfg.raw;
    manifest["jobs"] = jobs;

    KindOutcome outcome;
    std::string error;
    try {
        if (cfg.kind == "cauchy")
            outcome = run_cauchy(cfg, dir);
        else if (cfg.kind == "effective_hamiltonian")
            outcome = run_effective_h(cfg, dir, jobs);
        else if (cfg.kind == "flux_limiter")
            outcome = run_flux_limiter(cfg, dir);
        else if (cfg.kind == "epsilon_sweep")
            outcome = run_epsilon_sweep(cfg, dir);
        else if (cfg.kind == "traffic_checks")
            outcome = run_traffic(cfg, dir, jobs);
        else
            throw ConfigInvalid("unknown experiment kind \"" + cfg.kind + "\"");

        std::ofstream rf(dir / "result.json", std::ios::binary);
        if (!rf)
            throw ConfigInvalid("cannot write " + (dir / "result.json").string());
        rf << outcome.result.dump(2) << '\n';
        rf.close();
        emit_plot_data(dir.string());
    } catch (const std::exception &e) {
        error = e.what();
    }

    RunResult rr;
    rr.out_dir = dir.string();
    rr.exit_code = !error.empty() ? 3 : (outcome.gating_failed ? 1 : 0);

    manifest["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest["summary"] = outcome.summary;
    manifest["error"] = error.empty() ? json(nullptr) : json(error);
    manifest["exit_code"] = rr.exit_code;
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
    return rr;
}

void emit_plot_data(const std::string &run_dir) {
    const fs::path dir(run_dir);
    std::ifstream in(dir / "result.json");
    if (!in)
        throw MissingResult("no result.json under " + run_dir);
    json res;
    try {
        res = json::parse(in);
    } catch (const json::parse_error &e) {
        throw MissingResult("unreadable result.json: " + std::string(e.what()));
    }
    const std::string kind = res.value("kind", "");
    std::vector<std::vector<std::string>> rows;

    if (kind == "cauchy") {
        const json &fp = need(res, "final_profile", "result");
        const auto xs = as_num_list(need(fp, "x", "result.final_profile"),
                                    "result.final_profile.x");
        const auto us = as_num_list(need(fp, "u", "result.final_profile"),
                                    "result.final_profile.u");
        for (std::size_t i = 0; i < xs.size() && i < us.size(); ++i)
            rows.push_back({fmt_g17(xs[i]), fmt_g17(us[i])});
        write_csv((dir / "plot_profile.csv").string(), {"x", "u"}, rows);
    } else if (kind == "effective_hamiltonian") {
        for (const auto &r : need(res, "rows", "result"))
            rows.push_back({fmt_g17(r.value("p", 0.0)), fmt_g17(r.value("H_bar", 0.0)),
                            fmt_g17(r.value("lower", 0.0)),
                            fmt_g17(r.value("upper", 0.0))});
        write_csv((dir / "plot_hbar.csv").string(),
                  {"p", "H_bar", "lower", "upper"}, rows);
    } else if (kind == "flux_limiter") {
        for (const auto &r : need(res, "provenance", "result"))
            rows.push_back({fmt_g17(r.value("rho", 0.0)),
                            fmt_g17(r.value("lambda", 0.0)),
                            fmt_g17(r.value("lower", 0.0)),
                            fmt_g17(r.value("upper", 0.0))});
        write_csv((dir / "plot_bracket.csv").string(),
                  {"rho", "lambda", "lower", "upper"}, rows);
    } else if (kind == "epsilon_sweep") {
        for (const auto &r : need(res, "rows", "result"))
            rows.push_back({fmt_g17(r.value("eps", 0.0)),
                            fmt_g17(r.value("sup_error", 0.0))});
        write_csv((dir / "plot_error.csv").string(), {"eps", "sup_error"}, rows);
    } else if (kind == "traffic_checks") {
        for (const auto &r : res.value("spacing_curve", json::array()))
            rows.push_back({fmt_g17(r.value("ell", 0.0)),
                            fmt_g17(r.value("A_bar", 0.0))});
        if (!rows.empty())
            write_csv((dir / "plot_spacing.csv").string(), {"ell", "A_bar"}, rows);
    } else {
        throw MissingResult("result.json carries no recognizable kind");
    }
}

} // namespace hjlab
