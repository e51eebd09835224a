// Command-line front end: simulate paths, run estimators on CSV data, and
// drive the Monte Carlo harness. Exit codes: 0 ok, 2 input error,
// 3 infeasible configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "hfsub/altvar.hpp"
#include "hfsub/csv_io.hpp"
#include "hfsub/experiment.hpp"
#include "hfsub/inference.hpp"
#include "hfsub/kde.hpp"
#include "hfsub/moments.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/simulate.hpp"
#include "hfsub/subsample.hpp"
#include "hfsub/variation.hpp"

using json = nlohmann::ordered_json;
using namespace hfsub;

namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::TooFewSubsamples:
        case ErrorCode::SubsampleTooSmall:
        case ErrorCode::BlockTooSmall:
        case ErrorCode::InsufficientData:
        case ErrorCode::ZeroBlocks:
        case ErrorCode::WindowTooLarge:
            return 3;
        default:
            return 2;
    }
}

json cov_to_json(const CovEstimate& cov) {
    json m = json::array();
    for (Eigen::Index i = 0; i < cov.matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < cov.matrix.cols(); ++j) row.push_back(cov.matrix(i, j));
        m.push_back(row);
    }
    MatrixDiagnostics diag = matrix_diagnostics(cov.matrix);
    return json{{"estimator", cov.estimator_id},
                {"matrix", m},
                {"min_eigenvalue", cov.min_eigenvalue},
                {"condition_number", cov.condition_number},
                {"psd", cov.psd()},
                {"ill_conditioned", diag.ill_conditioned},
                {"effective_window", cov.effective_window},
                {"asymmetry", cov.asymmetry}};
}

json estimate_to_json(const EstimateVector& est) {
    json out{{"values", est.values}, {"n", est.n}};
    out["q"] = est.spec.q;
    out["r"] = est.spec.r;
    switch (est.kind) {
        case EstimatorKind::Plain: out["kind"] = "plain"; break;
        case EstimatorKind::Truncated: out["kind"] = "truncated"; break;
        case EstimatorKind::Preaveraged: out["kind"] = "preaveraged"; break;
    }
    if (est.truncation) {
        out["alpha"] = est.truncation->alpha;
        out["omega_check"] = est.truncation->omega_check;
    }
    if (est.kind == EstimatorKind::Preaveraged) {
        out["theta"] = est.theta;
        out["kn"] = est.window;
    }
    return out;
}

void write_output(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(path);
        if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
        out << j.dump(2) << '\n';
    }
}

json summary_to_json(const ExperimentResult& result) {
    json cells = json::array();
    for (const auto& cs : result.summaries) {
        json c{{"cell", cs.cell}, {"theta", cs.theta}, {"n", cs.n}, {"L", cs.L}, {"p", cs.p}};
        if (!cs.error.empty()) {
            c["error"] = cs.error;
            cells.push_back(c);
            continue;
        }
        json per = json::array();
        for (const auto& es : cs.per_estimator) {
            double cnt = static_cast<double>(es.count);
            json e{{"estimator", es.estimator},
                   {"count", es.count},
                   {"errors", es.errors},
                   {"frac_nonpsd", es.count ? static_cast<double>(es.nonpsd) / cnt : 0.0},
                   {"frac_negative_contrast",
                    es.count ? static_cast<double>(es.negative_contrast) / cnt : 0.0}};
            if (es.estimator == "jump")
                e["coverage_95_right"] = es.count ? static_cast<double>(es.covered_95_right) / cnt : 0.0;
            e["mean_t"] = es.mean_t;
            e["std_t"] = es.std_t;
            per.push_back(e);
        }
        c["estimators"] = per;
        cells.push_back(c);
    }
    return json{{"schema", "hfsub-mc-v1"}, {"cells", cells}};
}

struct SpecFlags {
    std::vector<double> q{2.0};
    std::vector<double> r{0.0};

    void attach(CLI::App* cmd) {
        cmd->add_option("--q", q, "power vector q")->delimiter(',');
        cmd->add_option("--r", r, "power vector r")->delimiter(',');
    }
    PowerSpec spec() const { return PowerSpec(q, r); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volatility functionals and subsampled covariance estimation "
                 "for high-frequency data"};
    app.require_subcommand(1);

    // ---------- simulate ----------
    auto* sim = app.add_subcommand("simulate", "simulate a price path and write a CSV");
    std::string sim_model = "sv", sim_noise = "hetero_ma1", sim_out, sim_meta_out;
    HestonConfig heston;
    double sim_gamma = 0.5, sim_zeta = -0.4, sim_omega2 = 0.0;
    double jump_lambda = 0.0, jump_var_mult = 2.0;
    bool sim_log_prices = false;
    sim->add_option("--model", sim_model, "sv or bm")->check(CLI::IsMember({"sv", "bm"}));
    sim->add_option("--n", heston.n, "number of increments");
    sim->add_option("--seed", heston.seed, "random seed");
    sim->add_option("--kappa", heston.kappa, "mean reversion (per year)");
    sim->add_option("--sigma2", heston.sigma2, "long-run variance (annual)");
    sim->add_option("--xi", heston.xi, "volatility of volatility (annual)");
    sim->add_option("--rho", heston.rho, "leverage correlation");
    sim->add_option("--interval-years", heston.interval_years, "window length in years");
    sim->add_option("--noise", sim_noise, "none|iid|ma1|hetero_ma1")
        ->check(CLI::IsMember({"none", "iid", "ma1", "hetero_ma1"}));
    sim->add_option("--gamma", sim_gamma, "noise-to-signal ratio");
    sim->add_option("--zeta", sim_zeta, "MA(1) parameter");
    sim->add_option("--omega2", sim_omega2, "fixed noise variance (iid/ma1)");
    sim->add_option("--jump-lambda", jump_lambda, "jump intensity per interval");
    sim->add_option("--jump-var-mult", jump_var_mult, "jump size variance as multiple of IV");
    sim->add_flag("--log-prices", sim_log_prices, "write log-prices instead of prices");
    sim->add_option("--out", sim_out, "output CSV path")->required();
    sim->add_option("--meta-out", sim_meta_out, "write simulation metadata JSON here");

    // ---------- estimate ----------
    auto* est_cmd = app.add_subcommand("estimate", "point estimates from a price CSV");
    std::string est_in, est_out;
    SpecFlags est_spec;
    bool est_in_log = false, est_preavg = false, est_truncate = false, est_kn_floor = false;
    double est_theta = 1.0, est_alpha = 1.0, est_omega_check = 0.49;
    est_cmd->add_option("--in", est_in, "input CSV")->required();
    est_cmd->add_flag("--in-log-prices", est_in_log, "input column holds log-prices");
    est_spec.attach(est_cmd);
    est_cmd->add_flag("--preavg", est_preavg, "pre-averaged estimator");
    est_cmd->add_option("--theta", est_theta, "pre-averaging theta");
    est_cmd->add_flag("--kn-floor", est_kn_floor, "floor(theta sqrt(n)) window instead of rounding");
    est_cmd->add_flag("--truncate", est_truncate, "jump truncation");
    est_cmd->add_option("--alpha", est_alpha, "truncation alpha");
    est_cmd->add_option("--omega-check", est_omega_check, "truncation exponent");
    est_cmd->add_option("--out", est_out, "output JSON (stdout if omitted)");

    // ---------- subsample ----------
    auto* sub = app.add_subcommand("subsample", "covariance estimate with diagnostics");
    std::string sub_in, sub_out, sub_regime = "noisy", sub_corrections = "on";
    SpecFlags sub_spec;
    std::size_t sub_L = 15, sub_p = 10;
    double sub_theta = 1.0, sub_alpha = 1.0, sub_omega_check = 0.49;
    bool sub_in_log = false, sub_kn_floor = false;
    sub->add_option("--in", sub_in, "input CSV")->required();
    sub->add_flag("--in-log-prices", sub_in_log, "input column holds log-prices");
    sub_spec.attach(sub);
    sub->add_option("--regime", sub_regime, "power|bipower|truncated|noisy")
        ->check(CLI::IsMember({"power", "bipower", "truncated", "noisy"}));
    sub->add_option("--L", sub_L, "number of subsamples");
    sub->add_option("--p", sub_p, "block multiplier");
    sub->add_option("--theta", sub_theta, "pre-averaging theta (noisy)");
    sub->add_flag("--kn-floor", sub_kn_floor, "floor window rounding");
    sub->add_option("--alpha", sub_alpha, "truncation alpha");
    sub->add_option("--omega-check", sub_omega_check, "truncation exponent");
    sub->add_option("--corrections", sub_corrections, "on|off")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--out", sub_out, "output JSON (stdout if omitted)");

    // ---------- test ----------
    auto* test = app.add_subcommand("test", "hypothesis tests");
    test->require_subcommand(1);
    std::string test_in, test_out, test_corrections = "on";
    double test_theta = 1.0, test_level = 0.95;
    std::size_t test_L = 15, test_p = 10;
    bool test_in_log = false, test_log_form = false;
    auto add_common = [&](CLI::App* t) {
        t->add_option("--in", test_in, "input CSV")->required();
        t->add_flag("--in-log-prices", test_in_log, "input column holds log-prices");
        t->add_option("--theta", test_theta, "pre-averaging theta");
        t->add_option("--L", test_L, "subsamples");
        t->add_option("--p", test_p, "block multiplier");
        t->add_option("--level", test_level, "confidence level");
        t->add_option("--corrections", test_corrections, "on|off")
            ->check(CLI::IsMember({"on", "off"}));
        t->add_option("--out", test_out, "output JSON (stdout if omitted)");
    };
    auto* test_jumps = test->add_subcommand("jumps", "jump contrast test");
    test_jumps->add_flag("--log-form", test_log_form, "log-difference form");
    add_common(test_jumps);
    auto* test_cv = test->add_subcommand("constvol", "constant-volatility ratio test");
    add_common(test_cv);

    // ---------- mc ----------
    auto* mc = app.add_subcommand("mc", "Monte Carlo experiment grid");
    ExperimentSpec ex;
    std::string mc_model = "sv", mc_noise = "hetero_ma1", mc_corrections = "on";
    std::string mc_out = "mc_rows.csv", mc_summary;
    std::vector<std::size_t> mc_L{15}, mc_p{10};
    SpecFlags mc_spec;
    mc_spec.q = {2.0, 1.0};
    mc_spec.r = {0.0, 1.0};
    mc->add_option("--model", mc_model, "sv or bm")->check(CLI::IsMember({"sv", "bm"}));
    mc->add_option("--noise", mc_noise, "none|iid|ma1|hetero_ma1")
        ->check(CLI::IsMember({"none", "iid", "ma1", "hetero_ma1"}));
    mc->add_option("--gamma", ex.gamma, "noise ratio");
    mc->add_option("--zeta", ex.zeta, "MA(1) parameter");
    mc->add_option("--omega2", ex.omega2, "fixed noise variance (iid/ma1); <=0 derives gamma^2 IV/n");
    mc->add_option("--theta", ex.thetas, "theta grid")->delimiter(',');
    mc->add_option("--n", ex.ns, "sample size grid")->delimiter(',');
    mc->add_option("--L", mc_L, "L grid")->delimiter(',');
    mc->add_option("--p", mc_p, "p grid")->delimiter(',');
    mc_spec.attach(mc);
    mc->add_option("--estimators", ex.estimators, "subsample,pv,avar,jump")->delimiter(',');
    mc->add_option("--n-sim", ex.n_sim, "replications per cell");
    mc->add_option("--seed", ex.seed, "master seed");
    mc->add_option("--threads", ex.threads, "worker threads (0 = hardware)");
    mc->add_option("--corrections", mc_corrections, "on|off")->check(CLI::IsMember({"on", "off"}));
    mc->add_option("--kappa", ex.heston.kappa, "mean reversion (per year)");
    mc->add_option("--sigma2", ex.heston.sigma2, "long-run variance (annual)");
    mc->add_option("--xi", ex.heston.xi, "vol of vol (annual)");
    mc->add_option("--rho", ex.heston.rho, "leverage correlation");
    mc->add_option("--interval-years", ex.heston.interval_years, "window length in years");
    mc->add_option("--out", mc_out, "replication table CSV");
    mc->add_option("--summary", mc_summary, "summary JSON (stdout if omitted)");

    // ---------- report ----------
    auto* rep = app.add_subcommand("report", "aggregate a replication table");
    std::string rep_in, rep_out, rep_kde_out, rep_kde_col = "t0", rep_kde_estimator = "subsample";
    double rep_kde_lo = -4.0, rep_kde_hi = 4.0;
    std::size_t rep_kde_points = 201;
    rep->add_option("--in", rep_in, "replication CSV from mc")->required();
    rep->add_option("--out", rep_out, "summary JSON (stdout if omitted)");
    rep->add_option("--kde-out", rep_kde_out, "write a kernel density CSV for one column");
    rep->add_option("--kde-col", rep_kde_col, "column for the density (e.g. t0)");
    rep->add_option("--kde-estimator", rep_kde_estimator, "estimator filter for the density");
    rep->add_option("--kde-lo", rep_kde_lo, "grid lower end");
    rep->add_option("--kde-hi", rep_kde_hi, "grid upper end");
    rep->add_option("--kde-points", rep_kde_points, "grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            HestonConfig hc = heston;
            if (sim_model == "bm") hc.xi = 0.0;
            Rng rng(hc.seed, 0);
            HestonPath path = simulate_heston(hc, rng);
            NoiseConfig nc;
            nc.zeta = sim_zeta;
            nc.gamma = sim_gamma;
            nc.omega2 = sim_omega2;
            if (sim_noise == "none") nc.kind = NoiseKind::None;
            else if (sim_noise == "iid") nc.kind = NoiseKind::Iid;
            else if (sim_noise == "ma1") nc.kind = NoiseKind::Ma1;
            else nc.kind = NoiseKind::HeteroMa1;
            if ((nc.kind == NoiseKind::Iid || nc.kind == NoiseKind::Ma1) && nc.omega2 <= 0.0)
                nc.omega2 = nc.gamma * nc.gamma * path.iv / static_cast<double>(hc.n);
            TickSeries prices = add_noise(path.log_prices, path.sigma2, nc, rng);
            json meta{{"n", hc.n}, {"iv", path.iv}, {"iq", path.iq},
                      {"sigma2_initial_annual", path.sigma2_initial_annual},
                      {"truncation_events", path.truncation_events},
                      {"feller", hc.feller()}};
            if (jump_lambda > 0.0) {
                JumpConfig jc{jump_lambda, jump_var_mult, {}};
                auto [jumped, log] = add_jumps(prices, jc, path.iv, rng);
                prices = jumped;
                meta["jump_count"] = log.sizes.size();
                meta["jump_sum_squared"] = log.sum_squared;
            }
            export_csv(sim_out, prices, ExportOptions{sim_log_prices});
            if (!sim_meta_out.empty()) write_output(meta, sim_meta_out);
            return 0;
        }

        if (*est_cmd) {
            TickSeries prices = ingest_csv(est_in, IngestOptions{est_in_log});
            PowerSpec spec = est_spec.spec();
            EstimateVector result;
            if (est_preavg) {
                WeightScheme scheme = WeightScheme::min_weight(
                    est_theta, prices.size() - 1,
                    est_kn_floor ? WindowRounding::Floor : WindowRounding::Nearest);
                result = preavg_bipower(prices, spec, scheme);
            } else if (est_truncate) {
                result = truncated_bipower_variation(log_returns(prices), spec,
                                                     TruncationRule(est_alpha, est_omega_check));
            } else {
                result = bipower_variation(log_returns(prices), spec);
            }
            write_output(estimate_to_json(result), est_out);
            return 0;
        }

        if (*sub) {
            TickSeries prices = ingest_csv(sub_in, IngestOptions{sub_in_log});
            ReturnSeries returns = log_returns(prices);
            PowerSpec spec = sub_spec.spec();
            bool corr = sub_corrections == "on";
            SubsampleConfig cfg{sub_L, sub_p, corr, corr, true};
            CovEstimate cov;
            if (sub_regime == "power") {
                cov = subsample_cov_power(returns, spec, sub_L);
            } else if (sub_regime == "bipower") {
                cov = subsample_cov_bipower(returns, spec, cfg);
            } else if (sub_regime == "truncated") {
                cov = subsample_cov_truncated(returns, spec,
                                              TruncationRule(sub_alpha, sub_omega_check), cfg);
            } else {
                WeightScheme scheme = WeightScheme::min_weight(
                    sub_theta, returns.n(),
                    sub_kn_floor ? WindowRounding::Floor : WindowRounding::Nearest);
                cov = subsample_cov_noisy(prices, spec, scheme, cfg);
            }
            write_output(cov_to_json(cov), sub_out);
            return 0;
        }

        if (*test) {
            TickSeries prices = ingest_csv(test_in, IngestOptions{test_in_log});
            std::size_t n = prices.size() - 1;
            WeightScheme scheme = WeightScheme::min_weight(test_theta, n);
            bool corr = test_corrections == "on";
            SubsampleConfig cfg{test_L, test_p, corr, corr, true};
            TestResult tr;
            if (*test_jumps) {
                PowerSpec spec({2.0, 1.0}, {0.0, 1.0});
                CovEstimate cov = subsample_cov_noisy(prices, spec, scheme, cfg);
                tr = jump_test(prices, scheme, cov, test_log_form);
            } else {
                PowerSpec spec({2.0, 4.0}, {0.0, 0.0});
                CovEstimate cov = subsample_cov_noisy(prices, spec, scheme, cfg);
                tr = const_vol_test(prices, scheme, cov);
            }
            auto [lo, hi] = confidence_interval(
                tr.statistic, tr.std_error, test_level,
                *test_jumps ? Sidedness::TwoSided : Sidedness::LeftSided);
            json out{{"statistic", tr.statistic},
                     {"std_error", tr.std_error},
                     {"t", tr.t},
                     {"rate", tr.rate == ConvergenceRate::FourthRootN ? "n^1/4" : "sqrt(n)"},
                     {"p_right", tr.p_right},
                     {"p_two_sided", tr.p_two_sided},
                     {"ci_level", test_level},
                     {"ci_lo", lo},
                     {"ci_hi", hi},
                     {"cov_min_eigenvalue", tr.cov_min_eigenvalue},
                     {"cov_condition_number", tr.cov_condition_number},
                     {"cov_psd", tr.cov_psd}};
            write_output(out, test_out);
            return 0;
        }

        if (*mc) {
            ex.model = (mc_model == "sv") ? PriceModel::SV : PriceModel::BM;
            if (mc_noise == "none") ex.noise = NoiseKind::None;
            else if (mc_noise == "iid") ex.noise = NoiseKind::Iid;
            else if (mc_noise == "ma1") ex.noise = NoiseKind::Ma1;
            else ex.noise = NoiseKind::HeteroMa1;
            ex.corrections = mc_corrections == "on";
            if (mc_L.size() != mc_p.size())
                fail(ErrorCode::InvalidConfig, "mc: --L and --p must have the same length");
            ex.lp.clear();
            for (std::size_t i = 0; i < mc_L.size(); ++i) ex.lp.emplace_back(mc_L[i], mc_p[i]);
            ex.spec = mc_spec.spec();
            ExperimentResult result = run_experiment(ex);
            write_rows_csv(result, mc_out);
            write_output(summary_to_json(result), mc_summary);
            return 0;
        }

        if (*rep) {
            std::ifstream in(rep_in);
            if (!in) fail(ErrorCode::ParseError, "report: cannot open " + rep_in);
            std::string line;
            if (!std::getline(in, line)) fail(ErrorCode::ParseError, "report: empty file");
            std::vector<std::string> header;
            {
                std::stringstream ss(line);
                std::string cell;
                while (std::getline(ss, cell, ',')) header.push_back(cell);
            }
            auto col = [&](const std::string& name) {
                for (std::size_t i = 0; i < header.size(); ++i)
                    if (header[i] == name) return i;
                fail(ErrorCode::ParseError, "report: missing column " + name);
            };
            std::size_t c_cell = col("cell"), c_est = col("estimator"), c_min = col("min_eig"),
                        c_contrast = col("contrast_pos"), c_t = col("t"), c_err = col("error");
            std::size_t c_kde = rep_kde_out.empty() ? 0 : col(rep_kde_col);

            struct Agg {
                std::size_t count = 0, errors = 0, nonpsd = 0, neg_contrast = 0, covered = 0;
                std::size_t test_rows = 0;
                std::vector<double> tvals;
            };
            std::map<std::pair<std::string, std::string>, Agg> groups;
            std::vector<double> kde_samples;
            double z95 = normal_quantile(0.95);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::vector<std::string> cells;
                std::stringstream ss(line);
                std::string cell;
                while (std::getline(ss, cell, ',')) cells.push_back(cell);
                while (cells.size() < header.size()) cells.push_back("");
                Agg& a = groups[{cells[c_cell], cells[c_est]}];
                ++a.count;
                if (!cells[c_err].empty()) ++a.errors;
                if (!cells[c_min].empty()) {
                    double me = std::strtod(cells[c_min].c_str(), nullptr);
                    if (me <= 0.0) ++a.nonpsd;
                }
                if (cells[c_contrast] == "0") ++a.neg_contrast;
                if (!cells[c_t].empty()) {
                    double t = std::strtod(cells[c_t].c_str(), nullptr);
                    if (std::isfinite(t)) {
                        ++a.test_rows;
                        if (t <= z95) ++a.covered;
                    }
                }
                if (!rep_kde_out.empty() && cells[c_est] == rep_kde_estimator &&
                    !cells[c_kde].empty()) {
                    double v = std::strtod(cells[c_kde].c_str(), nullptr);
                    if (std::isfinite(v)) kde_samples.push_back(v);
                }
            }
            json out = json::array();
            for (const auto& [key, a] : groups) {
                double cnt = static_cast<double>(a.count);
                json g{{"cell", key.first},
                       {"estimator", key.second},
                       {"count", a.count},
                       {"errors", a.errors},
                       {"frac_nonpsd", a.nonpsd / cnt},
                       {"frac_negative_contrast", a.neg_contrast / cnt}};
                if (a.test_rows > 0)
                    g["coverage_95_right"] =
                        static_cast<double>(a.covered) / static_cast<double>(a.test_rows);
                out.push_back(g);
            }
            write_output(json{{"schema", "hfsub-report-v1"}, {"groups", out}}, rep_out);
            if (!rep_kde_out.empty()) {
                std::vector<double> grid = linspace(rep_kde_lo, rep_kde_hi, rep_kde_points);
                std::vector<double> dens = kde(kde_samples, grid);
                std::ofstream kf(rep_kde_out);
                if (!kf) fail(ErrorCode::ParseError, "report: cannot open " + rep_kde_out);
                kf << "x,density\n";
                for (std::size_t i = 0; i < grid.size(); ++i)
                    kf << format_double(grid[i]) << ',' << format_double(dens[i]) << '\n';
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
