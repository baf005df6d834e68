#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/clt_theory.hpp"
#include "rmtlab/config.hpp"
#include "rmtlab/dbm.hpp"
#include "rmtlab/dyson.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/girko.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/test_functions.hpp"

using namespace rmtlab;

namespace {

using Clock = std::chrono::steady_clock;
using Rows = std::vector<std::vector<std::string>>;

std::string num(double x) { return format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }

// "re" or "re,im".
Complex parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw InvalidParameter("cannot parse complex number '" + s + "' (expected re or re,im)");
    }
}

// "family:key=value,key=value", e.g. "gaussian:s=0.4,center_re=0.2" or "fourier:k=3,part=cos".
Json parse_function(const std::string& s) {
    Json j;
    const auto colon = s.find(':');
    j["family"] = s.substr(0, colon);
    j["params"] = Json::object();
    if (colon == std::string::npos) return j;
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidParameter("function parameter '" + item + "' needs key=value");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "part") j["part"] = value;
        else j["params"][key] = std::stod(value);
    }
    return j;
}

// "ginibre", "four_phase", "sparse_phase:0.3", "mixture:0.5".
Json parse_distribution(const std::string& s) {
    const auto colon = s.find(':');
    Json j{{"kind", s.substr(0, colon)}};
    if (colon != std::string::npos) {
        const double p = std::stod(s.substr(colon + 1));
        j["params"] = {{j["kind"] == "mixture" ? "weight" : "p", p}};
    }
    return j;
}

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string csv, json;
    std::optional<std::size_t> n;
    std::optional<std::string> dist;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
};

void add_common(CLI::App* sub, Common& c, bool experiment_flags = true) {
    sub->add_option("--config", c.config, "JSON experiment file");
    sub->add_option("--override", c.overrides, "key.path=value applied to the config");
    sub->add_option("--csv", c.csv, "CSV output path (overrides output.csv)");
    sub->add_option("--json", c.json, "JSON output path (overrides output.json)");
    if (experiment_flags) {
        sub->add_option("--n", c.n, "matrix dimension");
        sub->add_option("--dist", c.dist, "entry law: ginibre, four_phase, sparse_phase:p, mixture:w");
        sub->add_option("--seed", c.seed, "base seed");
        sub->add_option("--replicas", c.replicas, "number of replicas");
    }
}

Json load_doc(const Common& c, const std::string& experiment) {
    Json doc = c.config.empty() ? Json::object() : load_json_file(c.config);
    if (!doc.contains("experiment")) doc["experiment"] = experiment;
    for (const auto& o : c.overrides) apply_override(doc, o);
    if (c.n) doc["n"] = *c.n;
    if (c.dist) doc["distribution"] = parse_distribution(*c.dist);
    if (c.seed) doc["base_seed"] = *c.seed;
    if (c.replicas) doc["replicas"] = *c.replicas;
    if (!c.csv.empty()) doc["output"]["csv"] = c.csv;
    if (!c.json.empty()) doc["output"]["json"] = c.json;
    return doc;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void emit_csv(const ExperimentConfig& cfg, const std::vector<std::string>& header, const Rows& rows,
              const RunManifest& manifest, bool to_stdout_if_unset) {
    if (!cfg.output_csv.empty()) {
        write_csv(cfg.output_csv, header, rows, manifest);
        return;
    }
    if (!to_stdout_if_unset) return;
    for (std::size_t i = 0; i < header.size(); ++i) std::cout << (i ? "," : "") << header[i];
    std::cout << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
        std::cout << '\n';
    }
}

void emit_json(const ExperimentConfig& cfg, const Json& doc, bool to_stdout_if_unset) {
    if (!cfg.output_json.empty()) write_json(cfg.output_json, doc);
    else if (to_stdout_if_unset) std::cout << doc.dump(2) << '\n';
}

std::vector<TestFunction> functions_of(const ExperimentConfig& cfg) {
    std::vector<TestFunction> out;
    for (const auto& s : cfg.functions) out.push_back(make_test_function(s));
    if (out.empty()) out.push_back(monomial_function(1, 0));
    return out;
}

// ---------------------------------------------------------------------------

struct TheoryOpts {
    std::string table = "covariance";
    std::vector<std::string> zs{"0", "0.5", "0.9", "1.2"};
    std::string z1 = "0";
    double eta_min = 1e-6, eta_max = 10.0;
    std::size_t eta_count = 8;
};

std::vector<double> log_etas(const TheoryOpts& t) {
    if (t.eta_count < 1 || !(t.eta_min > 0) || t.eta_max < t.eta_min) throw InvalidParameter("theory: bad eta grid");
    std::vector<double> out;
    for (std::size_t k = 0; k < t.eta_count; ++k) {
        const double a = t.eta_count == 1 ? 0.0 : double(k) / double(t.eta_count - 1);
        out.push_back(t.eta_min * std::pow(t.eta_max / t.eta_min, a));
    }
    return out;
}

int cmd_theory(const Common& c, const TheoryOpts& t) {
    const ExperimentConfig cfg = parse_experiment(load_doc(c, "theory"));
    RunManifest manifest = make_manifest(cfg);
    std::vector<std::string> header;
    Rows rows;
    if (t.table == "covariance") {
        header = {"label_f", "label_g", "kappa4", "gradient_term", "h_half_term", "kappa4_term", "total", "total_imag"};
        const auto fs = functions_of(cfg);
        for (const auto& f : fs)
            for (const auto& g : fs) {
                const CovarianceBreakdown b = covariance_functional(g, f, cfg.kappa4(), cfg.quad);
                rows.push_back({f.label(), g.label(), num(cfg.kappa4()), num(b.gradient_term.real()),
                                num(b.h_half_term.real()), num(b.kappa4_term.real()), num(b.total.real()),
                                num(b.total.imag())});
            }
    } else if (t.table == "dyson") {
        header = {"z_re", "z_im", "eta", "m_re", "m_im", "u_re", "u_im", "beta_re", "beta_im", "residual"};
        for (const auto& zs : t.zs)
            for (double eta : log_etas(t)) {
                const Complex z = parse_complex(zs);
                const DysonPoint p = solve_m(z, Complex(0, eta));
                rows.push_back({num(z.real()), num(z.imag()), num(eta), num(p.m.real()), num(p.m.imag()),
                                num(p.u.real()), num(p.u.imag()), num(p.beta.real()), num(p.beta.imag()),
                                num(p.residual)});
            }
    } else if (t.table == "two-body") {
        header = {"z1_re", "z1_im", "z2_re", "z2_im", "eta", "beta_hat_re", "beta_hat_im", "beta_hat_star_re",
                  "beta_hat_star_im", "inv_norm_bound"};
        const Complex z1 = parse_complex(t.z1);
        for (const auto& zs : t.zs)
            for (double eta : log_etas(t)) {
                const Complex z2 = parse_complex(zs);
                const TwoBodyStability s = two_body_stability(z1, z2, Complex(0, eta), Complex(0, eta));
                rows.push_back({num(z1.real()), num(z1.imag()), num(z2.real()), num(z2.imag()), num(eta),
                                num(s.beta_hat.real()), num(s.beta_hat.imag()), num(s.beta_hat_star.real()),
                                num(s.beta_hat_star.imag()), num(s.inv_norm_bound)});
            }
    } else {
        throw InvalidParameter("theory: unknown table '" + t.table + "' (covariance, dyson, two-body)");
    }
    emit_csv(cfg, header, rows, manifest, true);
    return 0;
}

int cmd_clt(const Common& c) {
    const ExperimentConfig cfg = parse_experiment(load_doc(c, "clt"));
    const CltRun run = run_clt_experiment(cfg);
    Json doc = clt_run_to_json(run);
    const auto fs = functions_of(cfg);
    Rows rows;
    doc["comparison"] = Json::array();
    for (std::size_t k = 0; k < fs.size(); ++k) {
        const TheoryPrediction p = predict(fs[k], cfg.kappa4(), run.n, cfg.quad);
        const ComparisonReport r = compare_to_theory(run.stats[k], p);
        doc["comparison"].push_back(r.to_json());
        const SummaryStats& s = run.stats[k];
        rows.push_back({run.labels[k], num(s.count), num(s.mean.value.real()), num(s.mean.value.imag()),
                        num(s.mean.se_re), num(s.mean.se_im), num(s.variance.value), num(s.variance.se),
                        num(s.second.value.real()), num(s.second.value.imag()), num(s.kurtosis_re.value),
                        num(s.kurtosis_im.value), num(r.mean_predicted.real()), num(r.variance_predicted),
                        num(r.z_mean_re), num(r.z_variance)});
    }
    emit_csv(cfg,
             {"label", "count", "mean_re", "mean_im", "mean_se_re", "mean_se_im", "variance", "variance_se",
              "second_re", "second_im", "kurtosis_re", "kurtosis_im", "mean_predicted_re", "variance_predicted",
              "z_mean_re", "z_variance"},
             rows, run.manifest, false);
    emit_json(cfg, doc, true);
    return 0;
}

struct GirkoOpts {
    std::optional<std::string> function;
    std::optional<std::size_t> grid_r, grid_theta;
    std::optional<double> T;
};

int cmd_girko(const Common& c, const GirkoOpts& g) {
    Json d = load_doc(c, "girko-check");
    if (g.function) d["functions"] = Json::array({parse_function(*g.function)});
    if (g.grid_r) d["girko"]["grid_r"] = *g.grid_r;
    if (g.grid_theta) d["girko"]["grid_theta"] = *g.grid_theta;
    if (g.T) d["girko"]["T"] = *g.T;
    if (!d.contains("n")) d["n"] = 64;
    const ExperimentConfig cfg = parse_experiment(d);
    const auto t0 = Clock::now();
    const TestFunction f = functions_of(cfg).front();
    const MatrixSample x = sample_matrix(cfg.distribution, cfg.ns.front(), cfg.base_seed);
    const GirkoReport r = girko_reconstruct(x, f, cfg.girko);
    RunManifest m = make_manifest(cfg);
    m.seeds = {cfg.base_seed};
    m.wall_clock_seconds = since(t0);
    const Json doc{{"function", f.label()},
                   {"n", cfg.ns.front()},
                   {"reconstructed", complex_to_json(r.reconstructed)},
                   {"direct", complex_to_json(r.direct)},
                   {"relative_error", r.relative_error()},
                   {"regimes",
                    {{"J_T", complex_to_json(r.regimes.J_T)},
                     {"I_0_eta0", complex_to_json(r.regimes.I_0_eta0)},
                     {"I_eta0_etac", complex_to_json(r.regimes.I_eta0_etac)},
                     {"I_etac_T", complex_to_json(r.regimes.I_etac_T)}}},
                   {"eta0", r.eta0},
                   {"etac", r.etac},
                   {"T", r.T},
                   {"jittered_nodes", r.jittered_nodes},
                   {"manifest", m.to_json()}};
    emit_json(cfg, doc, true);
    return 0;
}

int cmd_locallaw(const Common& c) {
    const ExperimentConfig cfg = parse_experiment(load_doc(c, "locallaw"));
    const auto t0 = Clock::now();
    const LocalLawSettings& s = cfg.locallaw;
    const LocalLawResult ll = local_law_scan(cfg.ns, s.eta_exponents, s.z, cfg.replicas, cfg.base_seed, cfg.distribution);
    const auto tr = two_resolvent_scan(s.two_resolvent_ns, s.two_resolvent_eta, s.z1, s.z2, BlockScalar::identity(),
                                       s.two_resolvent_replicas, cfg.base_seed + 1, cfg.distribution);
    RunManifest m = make_manifest(cfg);
    m.wall_clock_seconds = since(t0);
    Rows rows;
    Json single = Json::array(), pair = Json::array();
    for (const auto& r : ll.rows) {
        rows.push_back({"single", num(r.n), num(r.eta), num(r.mean_error), num(r.se)});
        single.push_back({{"n", r.n}, {"eta", r.eta}, {"mean_error", r.mean_error}, {"se", r.se}});
    }
    for (const auto& r : tr) {
        rows.push_back({"two_resolvent", num(r.n), num(r.eta), num(r.mean_error), num(r.se)});
        pair.push_back({{"n", r.n}, {"eta", r.eta}, {"mean_error", r.mean_error}, {"se", r.se}});
    }
    emit_csv(cfg, {"kind", "n", "eta", "mean_error", "se"}, rows, m, true);
    emit_json(cfg,
              {{"z", complex_to_json(s.z)},
               {"slope", ll.fit.slope},
               {"intercept", ll.fit.intercept},
               {"single", single},
               {"two_resolvent", pair},
               {"manifest", m.to_json()}},
              false);
    return 0;
}

int cmd_overlap(const Common& c) {
    Json d = load_doc(c, "overlap");
    if (!d.contains("n")) d["n"] = 512;
    const ExperimentConfig cfg = parse_experiment(d);
    const auto t0 = Clock::now();
    const OverlapSettings& s = cfg.overlap;
    const OverlapResult r =
        overlap_experiment(cfg.ns.front(), s.z1, s.z2, s.k, cfg.replicas, cfg.base_seed, cfg.distribution);
    RunManifest m = make_manifest(cfg);
    m.wall_clock_seconds = since(t0);
    Rows rows;
    Json mat = Json::array();
    for (Eigen::Index i = 0; i < r.mean_abs.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < r.mean_abs.cols(); ++j) {
            rows.push_back({num(std::size_t(i + 1)), num(std::size_t(j + 1)), num(r.mean_abs(i, j))});
            row.push_back(r.mean_abs(i, j));
        }
        mat.push_back(row);
    }
    emit_csv(cfg, {"i", "j", "mean_abs_theta"}, rows, m, false);
    emit_json(cfg,
              {{"n", r.n},
               {"seeds", r.seeds},
               {"z1", complex_to_json(s.z1)},
               {"z2", complex_to_json(s.z2)},
               {"mean_abs", mat},
               {"max_mean_abs", r.max_mean_abs},
               {"self_max_deviation", r.self_max_deviation},
               {"manifest", m.to_json()}},
              true);
    return 0;
}

struct DbmOpts {
    std::optional<double> dt, t_final;
    std::optional<std::string> mode;
    std::vector<std::string> zs;
    std::optional<std::size_t> record_every, K, substep_cap;
};

int cmd_dbm(const Common& c, const DbmOpts& o) {
    Json d = load_doc(c, "dbm");
    if (o.dt) d["dbm"]["dt"] = *o.dt;
    if (o.t_final) d["dbm"]["t_final"] = *o.t_final;
    if (o.mode) d["dbm"]["mode"] = *o.mode;
    if (!o.zs.empty()) {
        d["dbm"]["z"] = Json::array();
        for (const auto& z : o.zs) d["dbm"]["z"].push_back(complex_to_json(parse_complex(z)));
    }
    if (o.record_every) d["dbm"]["record_every"] = *o.record_every;
    if (o.K) d["dbm"]["K"] = *o.K;
    if (o.substep_cap) d["dbm"]["substep_cap"] = *o.substep_cap;
    if (!d.contains("n")) d["n"] = 32;
    if (!d.contains("replicas")) d["replicas"] = 1;
    const ExperimentConfig cfg = parse_experiment(d);
    const auto t0 = Clock::now();
    const std::size_t n = cfg.ns.front();
    const DriverMode mode = driver_mode_from_name(cfg.dbm.mode);
    DbmConfig dc;
    dc.n = n;
    dc.dt = cfg.dbm.dt;
    dc.t_final = cfg.dbm.t_final;
    dc.substep_cap = cfg.dbm.substep_cap;
    dc.record_every = cfg.dbm.record_every;

    RunManifest m = make_manifest(cfg);
    const std::size_t reps = cfg.replicas;
    m.seeds.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) m.seeds[r] = derive_seed(cfg.base_seed, r);
    std::vector<Trajectories> runs(reps);
    std::vector<char> failed(reps, 0);
    parallel_for(reps, [&](std::size_t r) {
        const MatrixSample x = sample_matrix(cfg.distribution, n, m.seeds[r]);
        try {
            runs[r] = run_coupled(dc, {}, {mode, cfg.dbm.K, splitmix64(m.seeds[r])}, MatrixFlowSetup{x.entries, cfg.dbm.zs});
        } catch (const StepFailure&) {
            failed[r] = 1;
        }
    });
    m.wall_clock_seconds = since(t0);

    const std::size_t procs = cfg.dbm.zs.size();
    Json reps_json = Json::array();
    std::vector<std::vector<double>> smallest(procs);
    double worst_truth = -1.0;
    for (std::size_t r = 0; r < reps; ++r) {
        if (failed[r]) {
            m.failed_replicas.push_back(r);
            continue;
        }
        const Trajectories& t = runs[r];
        Json fin = Json::array();
        for (std::size_t p = 0; p < procs; ++p) {
            fin.push_back(t.final_states[p].points.front());
            smallest[p].push_back(t.final_states[p].points.front());
        }
        for (std::size_t k = 0; k < t.truth.size(); ++k)
            for (std::size_t p = 0; p < procs; ++p)
                for (std::size_t i = 0; i < n; ++i)
                    worst_truth = std::max(worst_truth, std::abs(t.records[k][p][i] - t.truth[k][p][i]));
        reps_json.push_back({{"replica", r}, {"steps", t.steps}, {"smallest_final", fin}});
    }
    Json summary{{"n", n},
                 {"mode", driver_mode_name(mode)},
                 {"dt", dc.dt},
                 {"t_final", dc.t_final},
                 {"z", Json::array()},
                 {"replicas", reps_json},
                 {"manifest", m.to_json()}};
    for (Complex z : cfg.dbm.zs) summary["z"].push_back(complex_to_json(z));
    if (worst_truth >= 0) summary["max_deviation_from_matrix_flow"] = worst_truth;
    if (procs >= 2 && smallest[0].size() >= 3) {
        const Estimate e = correlation(smallest[0], smallest[1]);
        summary["smallest_final_correlation"] = {{"value", e.value}, {"se", e.se}};
    }

    Rows rows;
    for (std::size_t r = 0; r < reps && rows.empty(); ++r) {
        if (failed[r]) continue;
        const Trajectories& t = runs[r];
        for (std::size_t k = 0; k < t.times.size(); ++k)
            for (std::size_t p = 0; p < procs; ++p)
                for (std::size_t i = 0; i < n; ++i)
                    rows.push_back({num(t.times[k]), num(i + 1), num(t.records[k][p][i]), num(p)});
    }
    emit_csv(cfg, {"time", "index", "value", "process"}, rows, m, true);
    emit_json(cfg, summary, false);
    return m.failed_replicas.size() == reps ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmtlab: non-Hermitian random matrix linear statistics"};
    app.require_subcommand(1);

    Common theory_c, clt_c, girko_c, ll_c, ov_c, dbm_c;
    TheoryOpts theory_o;
    GirkoOpts girko_o;
    DbmOpts dbm_o;

    auto* theory = app.add_subcommand("theory", "deterministic tables as CSV");
    add_common(theory, theory_c, false);
    theory->add_option("--table", theory_o.table, "covariance, dyson or two-body")->capture_default_str();
    theory->add_option("--z", theory_o.zs, "spectral parameters (re or re,im)");
    theory->add_option("--z1", theory_o.z1, "fixed first parameter for the two-body table");
    theory->add_option("--eta-min", theory_o.eta_min)->capture_default_str();
    theory->add_option("--eta-max", theory_o.eta_max)->capture_default_str();
    theory->add_option("--eta-count", theory_o.eta_count)->capture_default_str();

    auto* clt = app.add_subcommand("clt-run", "Monte Carlo linear statistics against the theory");
    add_common(clt, clt_c);

    auto* girko = app.add_subcommand("girko-check", "pathwise Girko reconstruction on one sample");
    add_common(girko, girko_c);
    girko->add_option("--function", girko_o.function, "family:key=value,... e.g. gaussian:s=0.4");
    girko->add_option("--grid-r", girko_o.grid_r);
    girko->add_option("--grid-theta", girko_o.grid_theta);
    girko->add_option("--T", girko_o.T);

    auto* ll = app.add_subcommand("locallaw", "local law scaling and two-resolvent errors");
    add_common(ll, ll_c);

    auto* ov = app.add_subcommand("overlap", "eigenvector overlaps between two shifts");
    add_common(ov, ov_c);

    auto* dbm = app.add_subcommand("dbm", "Dyson Brownian motion trajectories");
    add_common(dbm, dbm_c);
    dbm->add_option("--dt", dbm_o.dt);
    dbm->add_option("--t-final", dbm_o.t_final);
    dbm->add_option("--mode", dbm_o.mode, "independent, coupled_below_K, overlap_correlated, matrix_flow");
    dbm->add_option("--z", dbm_o.zs, "shift (re or re,im); repeat for several processes");
    dbm->add_option("--record-every", dbm_o.record_every);
    dbm->add_option("--K", dbm_o.K);
    dbm->add_option("--substep-cap", dbm_o.substep_cap);

    CLI11_PARSE(app, argc, argv);
    try {
        if (theory->parsed()) return cmd_theory(theory_c, theory_o);
        if (clt->parsed()) return cmd_clt(clt_c);
        if (girko->parsed()) return cmd_girko(girko_c, girko_o);
        if (ll->parsed()) return cmd_locallaw(ll_c);
        if (ov->parsed()) return cmd_overlap(ov_c);
        if (dbm->parsed()) return cmd_dbm(dbm_c, dbm_o);
    } catch (const Error& e) {
        std::cerr << "rmtlab: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
