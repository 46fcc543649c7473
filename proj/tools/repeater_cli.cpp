// repeater: command-line front end producing rate curves, exponents,
// fidelity/distillation tables and Fock-space chain simulations.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repeater/analytic_chain.hpp"
#include "repeater/config.hpp"
#include "repeater/envelope.hpp"
#include "repeater/fock_sim.hpp"
#include "repeater/parallel.hpp"
#include "repeater/phenomenology.hpp"
#include "repeater/rate_curve.hpp"

#ifndef REPEATER_VERSION
#define REPEATER_VERSION "0.0.0"
#endif

namespace {

using namespace repeater;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string preset = "fig4";
    std::string config_path;
    std::optional<double> p2;
    std::string out_path;
    std::string format = "csv";
};

struct GridOptions {
    std::vector<int> n_links;
    double l_min = 0.0;
    double l_max = 1000.0;
    double l_step = 10.0;
};

Config resolve_config(const CommonOptions& o) {
    Config base;
    try {
        base.params = preset_by_name(o.preset);
    } catch (const ParamError& e) {
        throw ConfigError(e.what());
    }
    Config cfg = o.config_path.empty() ? base : load_config_file(o.config_path, base);
    if (o.p2) cfg = apply_config(json{{"p2", *o.p2}}, cfg);
    return cfg;
}

std::vector<double> make_grid(const GridOptions& g) {
    if (!(g.l_step > 0.0)) throw ConfigError("--l-step must be positive");
    if (!(g.l_min >= 0.0) || !(g.l_max >= g.l_min)) {
        throw ConfigError("--l-min/--l-max must satisfy 0 <= l-min <= l-max");
    }
    std::vector<double> xs;
    const auto count = static_cast<long>(std::floor((g.l_max - g.l_min) / g.l_step + 1e-9));
    for (long i = 0; i <= count; ++i) xs.push_back(g.l_min + i * g.l_step);
    return xs;
}

void require_links(const std::vector<int>& n_links) {
    if (n_links.empty()) throw ConfigError("--n-links must list at least one link count");
    for (int n : n_links) {
        if (n < 1) throw ConfigError("--n-links entries must be >= 1");
    }
}

json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

std::vector<std::string> header(const Config& cfg, const std::string& command) {
    return {"repeater " + std::string(REPEATER_VERSION) + " " + command,
            "params: " + resolved_params_json(cfg).dump()};
}

std::string range_text(double l) { return std::isfinite(l) ? format_number(l) : "unbounded"; }

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const CommonOptions& o, const json& j) {
    Output out(o.out_path);
    out.stream() << j.dump(2) << '\n';
}

void emit_table(const CommonOptions& o, const Config& cfg, const std::string& command,
                const CurveTable& table, const std::vector<std::string>& extra_comments,
                const json& extra_json) {
    if (o.format == "json") {
        json j;
        j["tool"] = {{"name", "repeater"}, {"version", REPEATER_VERSION}, {"command", command}};
        j["params"] = resolved_params_json(cfg);
        j["x_label"] = table.x_label;
        j["x"] = json::array();
        for (double x : table.x) j["x"].push_back(number(x));
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            json col = json::array();
            for (double y : table.columns[c]) col.push_back(number(y));
            j["series"][table.labels[c]] = col;
        }
        for (const auto& [k, v] : extra_json.items()) j[k] = v;
        emit_json(o, j);
        return;
    }
    std::vector<std::string> comments = header(cfg, command);
    comments.insert(comments.end(), extra_comments.begin(), extra_comments.end());
    Output out(o.out_path);
    write_csv(out.stream(), table, comments);
}

std::string link_label(const std::string& prefix, int n) { return prefix + "_N" + std::to_string(n); }

void cmd_params(const CommonOptions& o) {
    const Config cfg = resolve_config(o);
    emit_json(o, resolved_params_json(cfg));
}

void cmd_rate_curve(const CommonOptions& o, const GridOptions& g) {
    const Config cfg = resolve_config(o);
    require_links(g.n_links);
    const SystemParams& p = cfg.params;
    CurveTable table;
    table.x_label = "L_km";
    table.x = make_grid(g);
    std::vector<std::string> comments;
    json l_max = json::object();
    for (int n : g.n_links) {
        std::vector<double> col(table.x.size());
        parallel_for(table.x.size(), [&](std::size_t i) {
            col[i] = secret_key_rate(p, {table.x[i], n});
        });
        table.add_column(link_label("R", n), std::move(col));
        const double lm = max_range_qkd(p, n);
        comments.push_back("l_max_N" + std::to_string(n) + ": " + range_text(lm));
        l_max[std::to_string(n)] = std::isfinite(lm) ? json(lm) : json("unbounded");
    }
    std::vector<double> tgw, bb84;
    for (double l : table.x) {
        const double eta = db_to_linear(p.alpha_db_per_km * l);
        tgw.push_back(tgw_rate(eta, p.m_modes, p.t_q_seconds));
        bb84.push_back(ideal_bb84_rate(eta, p.m_modes, p.t_q_seconds));
    }
    table.add_column("TGW", std::move(tgw));
    table.add_column("ideal_BB84", std::move(bb84));
    emit_table(o, cfg, "rate-curve", table, comments, json{{"l_max_km", l_max}});
}

// Powers of two up to 1024 unless --n-links or --max-n picks the set.
std::vector<int> envelope_candidates(const std::vector<int>& n_links, int max_n) {
    if (!n_links.empty()) return n_links;
    if (max_n <= 0) return power_of_two_candidates();
    std::vector<int> c(max_n);
    for (int i = 0; i < max_n; ++i) c[i] = i + 1;
    return c;
}

void cmd_envelope(const CommonOptions& o, const GridOptions& g, int max_n,
                  const std::vector<double>& pd_sweep) {
    const Config cfg = resolve_config(o);
    const auto cands = envelope_candidates(g.n_links, max_n);
    require_links(cands);
    const auto grid = make_grid(g);
    double xi = std::nan("");
    try {
        xi = exponent_xi(cfg.params).xi;
    } catch (const std::exception&) {
    }

    if (!pd_sweep.empty()) {
        CurveTable table;
        table.x_label = "P_dark";
        table.x = pd_sweep;
        std::vector<double> zeta, pref, points;
        for (double pd : pd_sweep) {
            const EnvelopeResult r = numeric_envelope(cfg.params.with_dark(pd), grid, cands);
            zeta.push_back(r.fit_exponent);
            pref.push_back(r.fit_prefactor);
            points.push_back(r.fit_points);
        }
        table.add_column("zeta", std::move(zeta));
        table.add_column("prefactor", std::move(pref));
        table.add_column("fit_points", std::move(points));
        emit_table(o, cfg, "envelope", table, {"xi: " + format_number(xi)},
                   json{{"xi", number(xi)}});
        return;
    }

    const EnvelopeResult r = numeric_envelope(cfg.params, grid, cands);
    CurveTable table;
    table.x_label = "L_km";
    table.x = grid;
    table.add_column("envelope", r.curve.y);
    table.add_column("n_star", std::vector<double>(r.n_star.begin(), r.n_star.end()));
    std::vector<double> fit, tgw;
    for (double l : grid) {
        const double eta = db_to_linear(cfg.params.alpha_db_per_km * l);
        fit.push_back(r.fit_prefactor * std::pow(eta, r.fit_exponent));
        tgw.push_back(tgw_rate(eta, cfg.params.m_modes, cfg.params.t_q_seconds));
    }
    table.add_column("fit", std::move(fit));
    table.add_column("TGW", std::move(tgw));
    const std::vector<std::string> comments = {
        "fit_exponent: " + format_number(r.fit_exponent),
        "fit_prefactor: " + format_number(r.fit_prefactor),
        "fit_points: " + std::to_string(r.fit_points), "xi: " + format_number(xi)};
    emit_table(o, cfg, "envelope", table, comments,
               json{{"fit_exponent", number(r.fit_exponent)},
                    {"fit_prefactor", number(r.fit_prefactor)},
                    {"fit_points", r.fit_points},
                    {"xi", number(xi)}});
}

void cmd_xi(const CommonOptions& o) {
    const Config cfg = resolve_config(o);
    const XiSolution s = exponent_xi(cfg.params);
    emit_json(o, json{{"xi", s.xi},
                      {"t", exponent_t(cfg.params)},
                      {"z_root", s.z},
                      {"residual", s.residual},
                      {"sign_changes", s.sign_changes}});
}

std::optional<double> xi_at(SystemParams p, int m) {
    p.m_modes = m;
    try {
        return exponent_xi(SystemParams::checked(p)).xi;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Smallest M with xi(M) < 1, or nullopt if none up to m_cap.
std::optional<int> find_m_min(const SystemParams& p, int m_cap) {
    auto beats = [&](int m) {
        const auto x = xi_at(p, m);
        return x && *x < 1.0;
    };
    if (beats(1)) return 1;
    int lo = 1;
    int hi = 2;
    while (!beats(hi)) {
        if (hi >= m_cap) return std::nullopt;
        lo = hi;
        hi = std::min(2 * hi, m_cap);
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (beats(mid) ? hi : lo) = mid;
    }
    return hi;
}

void cmd_xi_vs_m(const CommonOptions& o, std::vector<int> m_list) {
    const Config cfg = resolve_config(o);
    if (m_list.empty()) {
        for (int m = 10; m <= 100000; m *= 10) {
            for (int k : {1, 2, 5}) {
                if (k * m <= 100000) m_list.push_back(k * m);
            }
        }
    }
    std::sort(m_list.begin(), m_list.end());
    m_list.erase(std::unique(m_list.begin(), m_list.end()), m_list.end());
    for (int m : m_list) {
        if (m < 1) throw ConfigError("--m-list entries must be >= 1");
    }
    CurveTable table;
    table.x_label = "M";
    table.x.assign(m_list.begin(), m_list.end());
    std::vector<double> xs(m_list.size()), ts(m_list.size());
    parallel_for(m_list.size(), [&](std::size_t i) {
        xs[i] = xi_at(cfg.params, m_list[i]).value_or(std::nan(""));
        SystemParams p = cfg.params;
        p.m_modes = m_list[i];
        try {
            ts[i] = exponent_t(p);
        } catch (const std::exception&) {
            ts[i] = std::nan("");
        }
    });
    table.add_column("xi", std::move(xs));
    table.add_column("t", std::move(ts));
    const auto m_min = find_m_min(cfg.params, 1 << 30);
    const std::string m_text = m_min ? std::to_string(*m_min) : "none";
    emit_table(o, cfg, "xi-vs-m", table, {"m_min: " + m_text},
               json{{"m_min", m_min ? json(*m_min) : json(nullptr)}});
}

void cmd_fidelity(const CommonOptions& o, const GridOptions& g) {
    const Config cfg = resolve_config(o);
    require_links(g.n_links);
    CurveTable table;
    table.x_label = "L_km";
    table.x = make_grid(g);
    std::vector<std::string> comments;
    json summary = json::array();
    for (int n : g.n_links) {
        std::vector<double> col(table.x.size());
        parallel_for(table.x.size(), [&](std::size_t i) {
            col[i] = fidelity(cfg.params, {table.x[i], n});
        });
        table.add_column(link_label("F", n), std::move(col));
        const double lm = max_range_qkd(cfg.params, n);
        const double f_at = std::isfinite(lm) ? fidelity(cfg.params, {lm, n}) : std::nan("");
        comments.push_back("N" + std::to_string(n) + ": l_max_qkd " + range_text(lm) +
                           ", fidelity_at_l_max " + format_number(f_at));
        summary.push_back({{"n_links", n},
                           {"l_max_qkd_km", std::isfinite(lm) ? json(lm) : json("unbounded")},
                           {"fidelity_at_l_max", number(f_at)}});
    }
    emit_table(o, cfg, "fidelity", table, comments, json{{"summary", summary}});
}

void cmd_distill(const CommonOptions& o, const GridOptions& g) {
    const Config cfg = resolve_config(o);
    require_links(g.n_links);
    CurveTable table;
    table.x_label = "L_km";
    table.x = make_grid(g);
    std::vector<std::string> comments;
    json summary = json::array();
    for (int n : g.n_links) {
        std::vector<double> col(table.x.size());
        parallel_for(table.x.size(), [&](std::size_t i) {
            col[i] = distillation_rate(cfg.params, {table.x[i], n});
        });
        table.add_column(link_label("E", n), std::move(col));
        const double lm = max_range_distillation(cfg.params, n);
        comments.push_back("l_max_distill_N" + std::to_string(n) + ": " + range_text(lm));
        summary.push_back({{"n_links", n},
                           {"l_max_distill_km", std::isfinite(lm) ? json(lm) : json("unbounded")}});
    }
    emit_table(o, cfg, "distill", table, comments, json{{"summary", summary}});
}

void cmd_simulate(const CommonOptions& o, int n_links, double length_km, bool dump_state) {
    const Config cfg = resolve_config(o);
    if (n_links < 1) throw ConfigError("--n-links must be a single count >= 1");
    const ChainConfig chain{length_km, n_links};
    const ChainResult r = simulate_chain(cfg.params, chain, cfg.fock);
    json j;
    j["tool"] = {{"name", "repeater"}, {"version", REPEATER_VERSION}, {"command", "simulate"}};
    j["params"] = resolved_params_json(cfg);
    j["n_links"] = n_links;
    j["length_km"] = length_km;
    j["q"] = r.q;
    j["q_rotated"] = r.q_rotated;
    j["p_succ"] = r.p_succ;
    j["p_sift"] = r.p_sift;
    j["p_single"] = r.p_single;
    j["rate_bits_per_s"] = r.rate_bits_per_s;
    j["level_qbers"] = r.level_qbers;
    j["level_success"] = r.level_success;
    j["coeffs"] = {{"a", r.coeffs.a}, {"b", r.coeffs.b}, {"c", r.coeffs.c},
                   {"d", r.coeffs.d}, {"s", r.coeffs.s}};
    j["pruned_weight"] = r.pruned_weight;
    if (cfg.params.p2 == 0.0) {
        j["analytic"] = {{"q", qber(cfg.params, chain)},
                         {"p_succ", success_probability(cfg.params, chain)},
                         {"rate_bits_per_s", secret_key_rate(cfg.params, chain)}};
    }
    if (dump_state) j["state"] = json::parse(r.state.to_json());
    emit_json(o, j);
}

void cmd_nmax(const CommonOptions& o, std::vector<int> n_links, const std::string& rule) {
    const Config cfg = resolve_config(o);
    if (n_links.empty()) n_links = {2, 4, 8};
    require_links(n_links);
    double range = 0.0;
    if (rule == "10km") {
        range = rule_range_km(cfg.params, RangeRule::ten_km);
    } else if (rule == "single-link") {
        range = rule_range_km(cfg.params, RangeRule::single_link);
    } else {
        try {
            std::size_t used = 0;
            range = std::stod(rule, &used);
            if (used != rule.size()) throw std::invalid_argument(rule);
        } catch (const std::exception&) {
            throw ConfigError("--rule must be 10km, single-link or a range in km");
        }
        if (!(range > 0.0) || !std::isfinite(range)) throw ConfigError("--rule range must be > 0");
    }
    std::vector<NmaxRow> rows(n_links.size());
    parallel_for(n_links.size(), [&](std::size_t i) {
        NmaxRow& row = rows[i];
        row.n_links = n_links[i];
        row.range_km = range;
        row.p2_threshold = p2_threshold(cfg.params, n_links[i], range, cfg.fock);
        row.estimate_at_threshold = std::isfinite(row.p2_threshold) && row.p2_threshold > 0.0
                                        ? n_max_estimate(row.p2_threshold)
                                        : 0;
    });
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"n_links", r.n_links},
                           {"range_km", r.range_km},
                           {"p2_threshold", number(r.p2_threshold)},
                           {"n_max_estimate", r.estimate_at_threshold}});
        }
        emit_json(o, json{{"tool", {{"name", "repeater"}, {"version", REPEATER_VERSION},
                                    {"command", "nmax"}}},
                          {"params", resolved_params_json(cfg)},
                          {"rule", rule},
                          {"rows", arr}});
        return;
    }
    Output out(o.out_path);
    for (const auto& line : header(cfg, "nmax")) out.stream() << "# " << line << '\n';
    out.stream() << "# rule: " << rule << " (" << format_number(range) << " km)\n";
    out.stream() << "n_links,range_km,p2_threshold,n_max_estimate\n";
    for (const auto& r : rows) {
        out.stream() << r.n_links << ',' << format_number(r.range_km) << ','
                     << format_number(r.p2_threshold) << ',' << r.estimate_at_threshold << '\n';
    }
}

void add_common(CLI::App* sub, CommonOptions& o, bool tabular) {
    sub->add_option("--config", o.config_path, "JSON parameter file layered over the preset");
    sub->add_option("--preset", o.preset, "Base parameter set")
        ->check(CLI::IsMember({"fig4", "fig8"}));
    sub->add_option("--p2", o.p2, "Two-pair emission probability override");
    sub->add_option("--out", o.out_path, "Write output here instead of stdout");
    if (tabular) {
        sub->add_option("--format", o.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
}

void add_grid(CLI::App* sub, GridOptions& g, std::vector<int> default_links) {
    g.n_links = std::move(default_links);
    sub->add_option("--n-links", g.n_links, "Link counts, comma separated")->delimiter(',');
    sub->add_option("--l-min", g.l_min, "First range (km)");
    sub->add_option("--l-max", g.l_max, "Last range (km)");
    sub->add_option("--l-step", g.l_step, "Range step (km)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum repeater chain rate, fidelity and Fock-space simulation tool"};
    app.set_version_flag("--version", REPEATER_VERSION);
    app.require_subcommand(1);

    CommonOptions common;
    GridOptions grid;
    const std::vector<int> kDefaultLinks = {1, 2, 4, 8, 16};

    auto* params = app.add_subcommand("params", "Print the resolved parameter set as JSON");
    add_common(params, common, false);

    auto* rate = app.add_subcommand("rate-curve", "Secret key rate vs range per link count");
    add_common(rate, common, true);
    add_grid(rate, grid, kDefaultLinks);

    int env_max_n = 0;
    std::vector<double> pd_sweep;
    GridOptions env_grid;
    env_grid.l_max = 2000.0;
    env_grid.l_step = 1.0;
    auto* env = app.add_subcommand("envelope", "Rate-distance envelope and its power-law fit");
    add_common(env, common, true);
    add_grid(env, env_grid, {});
    auto* max_n_opt =
        env->add_option("--max-n", env_max_n, "Use every integer 1..max-n as a candidate")
            ->check(CLI::PositiveNumber);
    max_n_opt->excludes(env->get_option("--n-links"));
    env->add_option("--sweep-pd", pd_sweep, "Dark probabilities; reports the fit per value")
        ->delimiter(',');

    auto* xi = app.add_subcommand("xi", "Zero-dark-click envelope exponent");
    add_common(xi, common, false);

    std::vector<int> m_list;
    auto* xim = app.add_subcommand("xi-vs-m", "Envelope exponent vs number of frequency modes");
    add_common(xim, common, true);
    xim->add_option("--m-list", m_list, "Mode counts, comma separated")->delimiter(',');

    auto* fid = app.add_subcommand("fidelity", "End-to-end fidelity vs range");
    add_common(fid, common, true);
    add_grid(fid, grid, kDefaultLinks);

    auto* dist = app.add_subcommand("distill", "Entanglement distillation rate vs range");
    add_common(dist, common, true);
    add_grid(dist, grid, kDefaultLinks);

    int sim_links = 1;
    double sim_length = 10.0;
    bool dump_state = false;
    auto* sim = app.add_subcommand("simulate", "Fock-space simulation of one chain");
    add_common(sim, common, false);
    sim->add_option("--n-links", sim_links, "Number of elementary links");
    sim->add_option("--length", sim_length, "Total range (km)");
    sim->add_flag("--dump-state", dump_state, "Include the final ensemble");

    std::vector<int> nmax_links;
    std::string rule = "10km";
    auto* nmax = app.add_subcommand("nmax", "p2 thresholds at which N-link chains stop working");
    add_common(nmax, common, true);
    nmax->add_option("--n-links", nmax_links, "Link counts, comma separated")->delimiter(',');
    nmax->add_option("--rule", rule, "10km, single-link, or an explicit range in km");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (params->parsed()) cmd_params(common);
        else if (rate->parsed()) cmd_rate_curve(common, grid);
        else if (env->parsed()) cmd_envelope(common, env_grid, env_max_n, pd_sweep);
        else if (xi->parsed()) cmd_xi(common);
        else if (xim->parsed()) cmd_xi_vs_m(common, m_list);
        else if (fid->parsed()) cmd_fidelity(common, grid);
        else if (dist->parsed()) cmd_distill(common, grid);
        else if (sim->parsed()) cmd_simulate(common, sim_links, sim_length, dump_state);
        else if (nmax->parsed()) cmd_nmax(common, nmax_links, rule);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParamError& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
