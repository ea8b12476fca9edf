// Command-line driver: every experiment writes CSV data files plus one JSON
// summary (config echo, headline numbers, wall time).  Data files are byte
// stable: rerunning with the same flags reproduces them exactly, for any
// worker count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dydw/bounds.hpp"
#include "dydw/errors.hpp"
#include "dydw/estimators.hpp"
#include "dydw/intervals.hpp"
#include "dydw/io.hpp"
#include "dydw/rectangles.hpp"
#include "dydw/sticking.hpp"
#include "dydw/web.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dydw;

namespace {

struct CommonOpts {
    double gamma = 2.0;
    double width_alpha = 0.1;
    double exponent_alpha = 0.2;
    double beta = 0.6;
    int k = 1;
    int k_max = 3;
    double tau = 0.0;
    double tau_prime = 0.5;
    double window_a = 0.0;
    double window_b = 1.0;
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int workers = 0;  // 0 = auto

    int effective_workers() const {
        if (workers > 0) return workers;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool geometry_opts = true) {
    if (geometry_opts) {
        cmd->add_option("--gamma", o.gamma, "rectangle growth factor (> 1)");
        cmd->add_option("--width-alpha", o.width_alpha, "superdiffusive width parameter");
    }
    cmd->add_option("--seed", o.seed, "root seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--workers", o.workers, "parallel workers (0 = auto); results identical");
}

std::string path_in(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

json config_echo(const CommonOpts& o) {
    return json{{"gamma", o.gamma},
                {"width_alpha", o.width_alpha},
                {"exponent_alpha", o.exponent_alpha},
                {"beta", o.beta},
                {"k", o.k},
                {"k_max", o.k_max},
                {"tau", o.tau},
                {"tau_prime", o.tau_prime},
                {"window", {o.window_a, o.window_b}},
                {"n_replicates", o.n},
                {"seed_root", o.seed},
                {"output_dir", o.out_dir},
                {"workers", o.effective_workers()}};
}

class Summary {
  public:
    Summary(std::string experiment, const CommonOpts& o)
        : start_(std::chrono::steady_clock::now()), opts_(o) {
        doc_["schema"] = 1;
        doc_["experiment"] = std::move(experiment);
        doc_["config"] = config_echo(o);
        doc_["results"] = json::object();
    }

    json& results() { return doc_["results"]; }

    void emit(const std::string& filename) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["runtime_seconds"] = secs;
        const std::string path = path_in(opts_, filename);
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure("cannot open " + path);
        out << doc_.dump(2) << '\n';
        std::cout << path << '\n';
    }

  private:
    std::chrono::steady_clock::time_point start_;
    const CommonOpts& opts_;
    json doc_;
};

void announce(const std::string& path) { std::cout << path << '\n'; }

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ValidationError(std::string("empty list for ") + what);
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    for (double v : parse_double_list(text, what)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    // "start:stop:step", inclusive of both ends up to rounding
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || parts[2] <= 0.0)
        throw ValidationError("grid must be start:stop:step with step > 0");
    std::vector<double> out;
    for (double v = parts[0]; v <= parts[1] + parts[2] * 1e-9; v += parts[2]) out.push_back(v);
    if (out.empty()) throw ValidationError("grid is empty");
    return out;
}

std::string seed_tag(const CommonOpts& o) { return "seed" + std::to_string(o.seed); }

// ---------------------------------------------------------------------------

int run_dump_stream(const CommonOpts& o, const std::string& web_name, int x, int t,
                    double tau_max) {
    Summary summary("dump-stream", o);
    const WebPair web(o.seed, tau_max);
    const WebId id = web_name == "secondary" ? WebId::secondary : WebId::main;
    const auto stream = web.arrow_stream(id, {x, t});

    const std::string csv = path_in(
        o, "stream_" + std::string(web_id_name(id)) + "_x" + std::to_string(x) + "_t" +
               std::to_string(t) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"ring_index", "ring_time", "value_after"});
    w.row(0, "", static_cast<int>(stream.values[0]));
    for (std::size_t j = 0; j < stream.ring_times.size(); ++j)
        w.row(j + 1, io::fmt(stream.ring_times[j]), static_cast<int>(stream.values[j + 1]));
    announce(csv);

    summary.results()["rings"] = stream.ring_times.size();
    summary.results()["site"] = {x, t};
    summary.emit("stream_" + seed_tag(o) + ".json");
    return 0;
}

int run_geometry(const CommonOpts& o, double skew_left, double skew_right) {
    Summary summary("geometry", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, o.k_max, skew_left, skew_right);

    const std::string csv = path_in(o, "geometry_g" + io::fmt(o.gamma) + "_kmax" +
                                           std::to_string(o.k_max) + ".csv");
    io::CsvWriter w(csv, {"k", "d_k", "t_k", "w_k"});
    for (int k = 0; k <= stack.k_max; ++k)
        w.row(k, stack.d[static_cast<std::size_t>(k)], stack.t[static_cast<std::size_t>(k)],
              stack.w[static_cast<std::size_t>(k)]);
    announce(csv);

    if (skew_left != 1.0 || skew_right != 1.0) {
        const std::string edges = path_in(o, "geometry_edges_g" + io::fmt(o.gamma) + ".csv");
        io::CsvWriter we(edges, {"k", "left_edge", "right_edge"});
        for (int k = 0; k <= stack.k_max; ++k)
            we.row(k, stack.left_edge[static_cast<std::size_t>(k)],
                   stack.right_edge[static_cast<std::size_t>(k)]);
        announce(edges);
    }
    summary.results()["horizon"] = stack.horizon();
    summary.emit("geometry_g" + io::fmt(o.gamma) + ".json");
    return 0;
}

int run_estimate(const CommonOpts& o, const std::string& event_name) {
    Summary summary("estimate", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));
    const EventSpec spec{parse_event_kind(event_name), o.k, stack};
    const auto est = estimate_event(spec, o.tau, o.n, o.seed, o.effective_workers());

    const std::string csv =
        path_in(o, "estimate_" + event_name + "_k" + std::to_string(o.k) + "_g" +
                       io::fmt(o.gamma) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"experiment_id", "event", "k", "gamma", "width_alpha", "tau", "mean",
                          "stderr", "n"});
    w.row("estimate", event_name, o.k, o.gamma, o.width_alpha, o.tau, est.mean, est.se, est.n);
    announce(csv);

    summary.results()["mean"] = est.mean;
    summary.results()["stderr"] = est.se;
    std::cerr << "P(" << event_name << "_" << o.k << ") = " << est.mean << " +- " << est.se
              << "  (n = " << est.n << ")\n";
    summary.emit("estimate_" + event_name + "_k" + std::to_string(o.k) + "_" + seed_tag(o) +
                 ".json");
    return 0;
}

int run_joint(const CommonOpts& o, const std::string& event_name) {
    Summary summary("joint", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));
    const EventSpec spec{parse_event_kind(event_name), o.k, stack};
    const auto single = estimate_event(spec, o.tau, o.n, o.seed, o.effective_workers());
    const auto joint = joint_event(spec, o.tau, o.tau_prime, o.n, o.seed + 0x9E37ull,
                                   o.effective_workers());
    const double excess = joint.mean - single.mean * single.mean;
    const double excess_se = std::sqrt(joint.se * joint.se +
                                       4 * single.mean * single.mean * single.se * single.se);

    const std::string csv = path_in(o, "joint_" + event_name + "_k" + std::to_string(o.k) + "_g" +
                                           io::fmt(o.gamma) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"experiment_id", "event", "k", "gamma", "tau", "tau_prime", "joint_mean",
                          "joint_stderr", "single_mean", "single_stderr", "excess", "excess_stderr",
                          "n"});
    w.row("joint", event_name, o.k, o.gamma, o.tau, o.tau_prime, joint.mean, joint.se, single.mean,
          single.se, excess, excess_se, o.n);
    announce(csv);

    summary.results()["joint"] = joint.mean;
    summary.results()["excess"] = excess;
    summary.emit("joint_" + event_name + "_k" + std::to_string(o.k) + "_" + seed_tag(o) + ".json");
    return 0;
}

int run_sweep(const CommonOpts& o, const std::string& tau_primes_text) {
    Summary summary("sweep", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));
    const auto tau_primes = parse_double_list(tau_primes_text, "--tau-primes");
    const auto sweep = decorrelation_sweep(stack, o.k, tau_primes, o.n, o.seed,
                                           o.effective_workers());

    const std::string csv = path_in(o, "sweep_k" + std::to_string(o.k) + "_g" + io::fmt(o.gamma) +
                                           "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"tau_prime", "delta", "joint_mean", "joint_stderr", "excess",
                          "excess_stderr", "admissible", "product_ratio", "product_envelope"});
    for (const auto& pt : sweep.points)
        w.row(pt.tau_prime, pt.delta, pt.joint.mean, pt.joint.se, pt.excess, pt.excess_se,
              pt.admissible, pt.product_ratio, pt.product_envelope);
    announce(csv);

    auto& r = summary.results();
    r["fit_ok"] = sweep.fit_ok;
    r["exponent_a"] = sweep.exponent_a;
    r["exponent_a_stderr"] = sweep.exponent_a_se;
    r["coeff_c"] = sweep.coeff_c;
    r["b_estimate"] = sweep.b_estimate;
    r["product_c_hat"] = sweep.product_c_hat;
    for (const auto& s : sweep.singles) r["singles"].push_back(s.mean);
    std::cerr << "fitted exponent a = " << sweep.exponent_a << " +- " << sweep.exponent_a_se
              << (sweep.fit_ok ? "" : "  [degenerate]") << "\n";
    summary.emit("sweep_k" + std::to_string(o.k) + "_" + seed_tag(o) + ".json");
    return sweep.fit_ok ? 0 : 3;
}

void write_interval_csv(const std::string& path, const TauIntervalSet& set) {
    io::CsvWriter w(path, {"interval_index", "a", "b", "producing_site_x", "producing_site_t"});
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        const auto& m = set.members[i];
        if (m.open_switch)
            w.row(i, m.a, m.b, m.open_switch->site.x, m.open_switch->site.t);
        else
            w.row(i, m.a, m.b, "", "");
    }
    announce(path);
}

int run_search_sub(const CommonOpts& o, std::size_t replicates) {
    Summary summary("search-sub", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, o.k_max);
    const int n_levels = o.k_max;

    const std::string csv = path_in(o, "search_sub_n" + std::to_string(n_levels) + "_g" +
                                           io::fmt(o.gamma) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"replicate", "n_intervals", "measure", "nonempty"});
    double total_measure = 0.0;
    std::size_t nonempty = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        const WebPair web(replicate_seed(o.seed, r), std::max(1.0, o.window_b));
        const auto set = exceptional_search_sub(web, stack, n_levels, o.window_a, o.window_b);
        w.row(r, set.members.size(), set.measure(), !set.empty());
        total_measure += set.measure();
        if (!set.empty()) ++nonempty;
        if (r == 0)
            write_interval_csv(path_in(o, "search_sub_intervals_rep0_" + seed_tag(o) + ".csv"),
                               set);
    }
    announce(csv);

    summary.results()["mean_measure"] = total_measure / static_cast<double>(replicates);
    summary.results()["nonempty_freq"] =
        static_cast<double>(nonempty) / static_cast<double>(replicates);
    summary.emit("search_sub_" + seed_tag(o) + ".json");
    return 0;
}

int run_search_super(const CommonOpts& o, const std::string& k_list_text, std::size_t replicates) {
    Summary summary("search-super", o);
    const auto k_list = parse_int_list(k_list_text, "--k-list");
    int k_needed = o.k_max;
    for (int k : k_list) k_needed = std::max(k_needed, k);
    const auto stack = make_stack(o.gamma, o.width_alpha, k_needed);

    const std::string csv = path_in(o, "search_super_g" + io::fmt(o.gamma) + "_a" +
                                           io::fmt(o.width_alpha) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"replicate", "depth_reached", "exhausted", "final_a", "final_b"});
    std::vector<std::size_t> depth_hist(k_list.size() + 1, 0);
    for (std::size_t r = 0; r < replicates; ++r) {
        const WebPair web(replicate_seed(o.seed, r), std::max(1.0, o.window_b));
        const auto res = exceptional_search_super(web, stack, k_list, o.window_a, o.window_b);
        const double fa = res.levels.empty() ? o.window_a : res.levels.back().a;
        const double fb = res.levels.empty() ? o.window_b : res.levels.back().b;
        w.row(r, res.levels.size(), res.exhausted, fa, fb);
        ++depth_hist[res.levels.size()];
        if (r == 0) {
            const std::string lv = path_in(o, "search_super_levels_rep0_" + seed_tag(o) + ".csv");
            io::CsvWriter wl(lv, {"depth", "k", "a", "b"});
            for (std::size_t j = 0; j < res.levels.size(); ++j)
                wl.row(j + 1, res.k_done[j], res.levels[j].a, res.levels[j].b);
            announce(lv);
        }
    }
    announce(csv);

    for (std::size_t d = 0; d < depth_hist.size(); ++d)
        summary.results()["depth_histogram"].push_back(depth_hist[d]);
    summary.results()["full_depth_freq"] =
        static_cast<double>(depth_hist.back()) / static_cast<double>(replicates);
    summary.emit("search_super_" + seed_tag(o) + ".json");
    return 0;
}

int run_sticking(const CommonOpts& o, const std::string& tau_primes_text, std::size_t replicates) {
    Summary summary("sticking", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));
    const auto tau_primes = parse_double_list(tau_primes_text, "--tau-primes");

    std::vector<Lemma2Point> points;
    std::size_t split_violations = 0;
    for (std::size_t g = 0; g < tau_primes.size(); ++g) {
        const double tp = tau_primes[g];
        if (!(tp > o.tau)) throw ValidationError("sticking: tau-primes must exceed --tau");
        std::vector<StickingProfile> profiles;
        profiles.reserve(replicates);
        for (std::size_t r = 0; r < replicates; ++r) {
            const WebPair web(replicate_seed(o.seed + 131ull * g, r), std::max(1.0, tp));
            const auto quad = make_quadruple(web, stack, o.k, o.tau, tp);
            profiles.push_back(classify_sticking(web, quad));
            const auto& p = profiles.back();
            for (int t = 0; t <= p.n_steps; ++t) {
                const std::size_t i = static_cast<std::size_t>(t);
                if (t - p.g[i] > (t - p.g_ll[i]) + (t - p.g_lr[i]) + (t - p.g_rl[i]) +
                                     (t - p.g_rr[i]))
                    ++split_violations;
            }
            if (r == 0 && g == 0) {
                const std::string lab = path_in(o, "sticking_labels_rep0_" + seed_tag(o) + ".csv");
                io::CsvWriter wl(lab, {"n", "ll", "lr", "rl", "rr"});
                for (int s = 0; s < p.n_steps; ++s) {
                    const auto m = p.labels[static_cast<std::size_t>(s)];
                    wl.row(s, (m & StickingProfile::LL) != 0, (m & StickingProfile::LR) != 0,
                           (m & StickingProfile::RL) != 0, (m & StickingProfile::RR) != 0);
                }
                announce(lab);
            }
        }
        points.push_back(lemma2_statistic(profiles, o.beta));
    }

    const std::string csv = path_in(o, "sticking_lemma2_k" + std::to_string(o.k) + "_" +
                                           seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"tau_prime", "delta", "beta", "threshold", "frequency", "stderr", "n"});
    for (std::size_t g = 0; g < points.size(); ++g)
        w.row(tau_primes[g], points[g].delta, points[g].beta, points[g].threshold,
              points[g].frequency, points[g].se, points[g].n);
    announce(csv);

    // modulus sweep over the same Delta grid
    std::vector<double> deltas;
    for (const auto& p : points) deltas.push_back(p.delta);
    const auto mod = modulus_statistic(stack, o.k, replicates, o.seed + 0xABCDull, deltas,
                                       {{o.exponent_alpha, o.beta}});
    const std::string mcsv = path_in(o, "sticking_modulus_k" + std::to_string(o.k) + "_" +
                                            seed_tag(o) + ".csv");
    io::CsvWriter wm(mcsv, {"delta", "alpha", "beta", "epsilon", "threshold", "frequency",
                            "stderr", "n"});
    for (const auto& p : mod)
        wm.row(p.delta, p.alpha, p.beta, p.epsilon, p.threshold, p.frequency, p.se, p.n);
    announce(mcsv);

    summary.results()["split_violations"] = split_violations;
    summary.results()["c_doubleprime"] = lemma2_envelope(points);
    summary.emit("sticking_k" + std::to_string(o.k) + "_" + seed_tag(o) + ".json");
    return 0;
}

int run_coupling(const CommonOpts& o, int horizon, std::size_t replicates) {
    Summary summary("coupling", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));

    std::vector<std::size_t> ref_ge(6, 0), star_ge(6, 0);
    std::size_t partial = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
        const WebPair web(replicate_seed(o.seed, r), std::max(1.0, o.tau_prime));
        const auto pair = coupling_trace(web, stack, o.k, o.tau, o.tau_prime, horizon);
        if (pair.reference.partial || pair.starred.partial) ++partial;
        const auto first_delta = [](const CouplingTrace& tr) -> long long {
            if (!tr.deltas.empty()) return tr.deltas.front();
            return tr.censored_delta ? *tr.censored_delta : 0;
        };
        for (int j = 1; j <= 5; ++j) {
            if (first_delta(pair.reference) >= j) ++ref_ge[static_cast<std::size_t>(j)];
            if (first_delta(pair.starred) >= j) ++star_ge[static_cast<std::size_t>(j)];
        }
    }

    const std::string csv = path_in(o, "coupling_k" + std::to_string(o.k) + "_" + seed_tag(o) +
                                           ".csv");
    io::CsvWriter w(csv, {"j", "P_ref", "P_starred", "stderr"});
    bool dominated = true;
    const double n = static_cast<double>(replicates);
    for (int j = 1; j <= 5; ++j) {
        const double pr = static_cast<double>(ref_ge[static_cast<std::size_t>(j)]) / n;
        const double ps = static_cast<double>(star_ge[static_cast<std::size_t>(j)]) / n;
        const double se = std::sqrt((pr * (1 - pr) + ps * (1 - ps)) / n);
        w.row(j, pr, ps, se);
        if (ps > pr + 3.0 * se) dominated = false;
    }
    announce(csv);

    summary.results()["domination_holds_3se"] = dominated;
    summary.results()["partial_fraction"] = static_cast<double>(partial) / n;
    summary.emit("coupling_k" + std::to_string(o.k) + "_" + seed_tag(o) + ".json");
    return 0;
}

int run_pivotal(const CommonOpts& o, std::size_t replicates) {
    Summary summary("pivotal", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, std::max(o.k_max, o.k));
    const auto rep = pivotal_chain(stack, o.k, replicates, o.seed, o.effective_workers());

    const std::string csv = path_in(o, "pivotal_k" + std::to_string(o.k) + "_" + seed_tag(o) +
                                           ".csv");
    io::CsvWriter w(csv, {"k", "omega_size", "p_exists", "p_exists_stderr", "p_upsilon0",
                          "p_upsilon0_stderr", "mean_endpoints", "endpoints_stderr", "ratio",
                          "chain_holds_3se", "chain_holds_exact", "n"});
    w.row(rep.k, rep.omega_size, rep.p_exists.mean, rep.p_exists.se, rep.p_upsilon_0.mean,
          rep.p_upsilon_0.se, rep.mean_endpoints, rep.endpoints_se, rep.ratio, rep.chain_holds_3se,
          rep.chain_holds_exact, rep.n_rep);
    announce(csv);

    summary.results()["p_exists"] = rep.p_exists.mean;
    summary.results()["p_upsilon0"] = rep.p_upsilon_0.mean;
    summary.results()["mean_endpoints"] = rep.mean_endpoints;
    summary.results()["chain_holds_exact"] = rep.chain_holds_exact;
    summary.emit("pivotal_k" + std::to_string(o.k) + "_" + seed_tag(o) + ".json");
    return 0;
}

int run_bounds(const CommonOpts& o, const std::string& grid_text, double K_L, double K_R) {
    Summary summary("bounds", o);
    if (!grid_text.empty()) {
        const auto grid = parse_grid(grid_text);
        const std::string csv = path_in(o, "bounds_grid.csv");
        io::CsvWriter w(csv, {"K", "gamma_tilde", "P_C_inf", "b_inf", "lower", "p", "upper",
                              "empty_flag"});
        for (double K : grid) {
            const auto rep = bound_report(K, K);
            w.row(K, rep.gamma_tilde, rep.p_c_infinity, rep.b_infinity, rep.lower, rep.p_L,
                  rep.upper, rep.empty_flag);
        }
        announce(csv);
        summary.results()["grid_points"] = grid.size();
    }
    if (K_L > 0.0 && K_R > 0.0) {
        const auto rep = bound_report(K_L, K_R);
        const std::string csv = path_in(o, "bounds_pair_KL" + io::fmt(K_L) + "_KR" +
                                               io::fmt(K_R) + ".csv");
        io::CsvWriter w(csv, {"K_L", "K_R", "p_L", "p_R", "upper", "empty_flag", "lower",
                              "lower_available"});
        w.row(K_L, K_R, rep.p_L, rep.p_R, rep.upper, rep.empty_flag,
              rep.lower_available ? io::fmt(rep.lower) : std::string(""), rep.lower_available);
        announce(csv);
        summary.results()["upper"] = rep.upper;
        summary.results()["empty"] = rep.empty_flag;
    }
    summary.results()["c_star"] = c_star_probability();
    summary.emit("bounds.json");
    return 0;
}

int run_second_moment(const CommonOpts& o, int resolution, std::size_t replicates) {
    Summary summary("second-moment", o);
    const auto stack = make_stack(o.gamma, o.width_alpha, o.k_max);
    const auto rep =
        second_moment_bound(stack, o.k_max, resolution, replicates, o.seed, o.effective_workers());

    const std::string csv = path_in(o, "second_moment_n" + std::to_string(o.k_max) + "_g" +
                                           io::fmt(o.gamma) + "_" + seed_tag(o) + ".csv");
    io::CsvWriter w(csv, {"n", "n_rep", "mean_measure", "mean_square", "ratio", "ratio_stderr",
                          "observed_freq", "observed_stderr", "degenerate", "resolution",
                          "quadrature_integral", "quadrature_ratio"});
    w.row(rep.n_levels, rep.n_rep, rep.mean_measure, rep.mean_square, rep.ratio, rep.ratio_se,
          rep.observed_freq, rep.observed_se, rep.degenerate, rep.resolution,
          rep.quadrature_integral, rep.quadrature_ratio);
    announce(csv);

    summary.results()["ratio"] = rep.ratio;
    summary.results()["observed_freq"] = rep.observed_freq;
    summary.results()["degenerate"] = rep.degenerate;
    summary.emit("second_moment_n" + std::to_string(o.k_max) + "_" + seed_tag(o) + ".json");
    return rep.degenerate ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamical discrete web simulator and analysis toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags win");

    CommonOpts o;
    std::function<int()> action;

    std::string ds_web = "main";
    int ds_x = 0, ds_t = 0;
    double ds_tau_max = 1.0;
    double skew_left = 1.0, skew_right = 1.0;
    std::string event_name = "C";
    std::string tau_primes = "0.05,0.1,0.2,0.4,0.8,1.6,3.2";
    std::string sticking_tau_primes = "0.1,0.2,0.4,0.8";
    std::string k_list = "1,2,3";
    std::string K_grid = "0.5:5:0.5";
    double K_L = 0.0, K_R = 0.0;
    int horizon = 100;
    int resolution = 0;
    std::size_t replicates = 100;
    std::size_t sticking_reps = 2000;
    std::size_t coupling_reps = 20000;
    std::size_t pivotal_reps = 5000;
    std::size_t sm_reps = 2000;

    {
        auto* cmd = app.add_subcommand("dump-stream", "dump one arrow stream as CSV");
        cmd->add_option("--web", ds_web, "main | secondary");
        cmd->add_option("--x", ds_x, "site x");
        cmd->add_option("--t", ds_t, "site t");
        cmd->add_option("--tau-max", ds_tau_max, "dynamical window end");
        add_common(cmd, o, false);
        cmd->callback(
            [&] { action = [&] { return run_dump_stream(o, ds_web, ds_x, ds_t, ds_tau_max); }; });
    }
    {
        auto* cmd = app.add_subcommand("geometry", "dump rectangle stack geometry");
        cmd->add_option("--k-max", o.k_max, "number of rectangles");
        cmd->add_option("--skew-left", skew_left, "left horizontal scale");
        cmd->add_option("--skew-right", skew_right, "right horizontal scale");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_geometry(o, skew_left, skew_right); }; });
    }
    {
        auto* cmd = app.add_subcommand("estimate", "Monte Carlo event probability");
        cmd->add_option("--event", event_name, "B | C | Ahat | Upsilon");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--tau", o.tau, "dynamical time");
        cmd->add_option("--n", o.n, "replicates");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_estimate(o, event_name); }; });
    }
    {
        auto* cmd = app.add_subcommand("joint", "joint probability at two dynamical times");
        cmd->add_option("--event", event_name, "B | C | Ahat | Upsilon");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--tau", o.tau, "first dynamical time");
        cmd->add_option("--tau-prime", o.tau_prime, "second dynamical time");
        cmd->add_option("--n", o.n, "replicates");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_joint(o, event_name); }; });
    }
    {
        auto* cmd = app.add_subcommand("sweep", "decorrelation sweep over tau'");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--tau-primes", tau_primes, "comma list of separations from tau = 0");
        cmd->add_option("--n", o.n, "replicates per grid point");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_sweep(o, tau_primes); }; });
    }
    {
        auto* cmd = app.add_subcommand("search-sub", "exact E_n interval sets over replicates");
        cmd->add_option("--k-max", o.k_max, "levels: E_n with n = k-max");
        cmd->add_option("--replicates", replicates, "replicate webs");
        cmd->add_option("--window-a", o.window_a, "window start");
        cmd->add_option("--window-b", o.window_b, "window end");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_search_sub(o, replicates); }; });
    }
    {
        auto* cmd = app.add_subcommand("search-super", "nested superdiffusive interval search");
        cmd->add_option("--k-list", k_list, "increasing rectangle indices");
        cmd->add_option("--replicates", replicates, "replicate webs");
        cmd->add_option("--window-a", o.window_a, "window start");
        cmd->add_option("--window-b", o.window_b, "window end");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_search_super(o, k_list, replicates); }; });
    }
    {
        auto* cmd = app.add_subcommand("sticking", "sticking classification and Lemma-2 sweep");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--tau", o.tau, "base dynamical time");
        cmd->add_option("--tau-primes", sticking_tau_primes, "comma list of tau' values");
        cmd->add_option("--beta", o.beta, "Lemma-2 exponent in (0,1)");
        cmd->add_option("--exponent-alpha", o.exponent_alpha, "modulus exponent alpha");
        cmd->add_option("--replicates", sticking_reps, "replicates per point");
        add_common(cmd, o);
        cmd->callback(
            [&] { action = [&] { return run_sticking(o, sticking_tau_primes, sticking_reps); }; });
    }
    {
        auto* cmd = app.add_subcommand("coupling", "coupled sticking/excursion cycles");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--tau", o.tau, "first dynamical time");
        cmd->add_option("--tau-prime", o.tau_prime, "second dynamical time");
        cmd->add_option("--horizon", horizon, "path-time horizon");
        cmd->add_option("--replicates", coupling_reps, "replicates");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_coupling(o, horizon, coupling_reps); }; });
    }
    {
        auto* cmd = app.add_subcommand("pivotal", "endpoint census and the pivotal chain");
        cmd->add_option("--k", o.k, "rectangle index");
        cmd->add_option("--k-max", o.k_max, "stack depth");
        cmd->add_option("--replicates", pivotal_reps, "replicates");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_pivotal(o, pivotal_reps); }; });
    }
    {
        auto* cmd = app.add_subcommand("bounds", "Hausdorff-dimension bound formulas");
        cmd->add_option("--K-grid", K_grid, "symmetric K grid start:stop:step");
        cmd->add_option("--KL", K_L, "left constant for one asymmetric row");
        cmd->add_option("--KR", K_R, "right constant for one asymmetric row");
        add_common(cmd, o, false);
        cmd->callback([&] { action = [&] { return run_bounds(o, K_grid, K_L, K_R); }; });
    }
    {
        auto* cmd = app.add_subcommand("second-moment", "second-moment lower-bound diagnostics");
        cmd->add_option("--k-max", o.k_max, "levels: E_n with n = k-max");
        cmd->add_option("--resolution", resolution, "quadrature cells per axis (0 = skip)");
        cmd->add_option("--replicates", sm_reps, "replicates");
        add_common(cmd, o);
        cmd->callback([&] { action = [&] { return run_second_moment(o, resolution, sm_reps); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        return action();
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DiagnosticError& e) {
        std::cerr << "diagnostic: " << e.what() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
