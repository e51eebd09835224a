#include "hfsub/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "hfsub/altvar.hpp"
#include "hfsub/csv_io.hpp"
#include "hfsub/inference.hpp"
#include "hfsub/moments.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/subsample.hpp"

namespace hfsub {

namespace {

struct Cell {
    std::size_t index;
    double theta;
    std::size_t n;
    std::size_t L, p;
};

struct RepRows {
    std::vector<std::string> rows;
    // per estimator tallies, aligned with spec.estimators
    struct Tally {
        bool error = false;
        bool nonpsd = false;
        bool negative_contrast = false;
        bool covered = false;
        std::vector<double> t;   // NaN when unavailable
    };
    std::vector<Tally> tallies;
};

std::string fmt(double x) { return format_double(x); }

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '"' || c == '\n') c = ';';
    return s;
}

const char* noise_name(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::None: return "none";
        case NoiseKind::Iid: return "iid";
        case NoiseKind::Ma1: return "ma1";
        case NoiseKind::HeteroMa1: return "hetero_ma1";
    }
    return "unknown";
}

void append_t_cols(std::ostringstream& os, const std::vector<double>& t, std::size_t m_max) {
    for (std::size_t k = 0; k < m_max; ++k) {
        os << ',';
        if (k < t.size() && std::isfinite(t[k])) os << fmt(t[k]);
        else os << "nan";
    }
}

RepRows run_replication(const ExperimentSpec& spec, const Cell& cell, std::size_t rep) {
    constexpr std::size_t m_max = 4;
    RepRows out;
    out.tallies.resize(spec.estimators.size());

    Rng rng(spec.seed, cell.index * spec.n_sim + rep);

    HestonConfig hc = spec.heston;
    hc.n = cell.n;
    if (spec.model == PriceModel::BM) hc.xi = 0.0;
    HestonPath path = simulate_heston(hc, rng);

    NoiseConfig nc;
    nc.kind = spec.noise;
    nc.zeta = spec.zeta;
    nc.gamma = spec.gamma;
    nc.omega2 = spec.omega2;
    if ((nc.kind == NoiseKind::Iid || nc.kind == NoiseKind::Ma1) && spec.omega2 <= 0.0)
        nc.omega2 = spec.gamma * spec.gamma * path.iv / static_cast<double>(cell.n);
    TickSeries prices = add_noise(path.log_prices, path.sigma2, nc, rng);

    WeightScheme scheme = WeightScheme::min_weight(cell.theta, cell.n);
    EstimateVector est = preavg_bipower(prices, spec.spec, scheme);
    std::vector<double> target = preavg_bipower_limit(
        spec.spec, scheme, cell.n, path.sigma2,
        noise_effective_variance_path(path.sigma2, cell.n, nc));

    std::size_t m = spec.spec.m();
    double rf = rate_factor(ConvergenceRate::FourthRootN, cell.n);
    double mu1 = gaussian_abs_moment(1.0);
    bool jump_shape = (m == 2 && spec.spec.q[0] == 2.0 && spec.spec.r[0] == 0.0 &&
                       spec.spec.q[1] == 1.0 && spec.spec.r[1] == 1.0);
    Eigen::Vector2d w(1.0, -1.0 / (mu1 * mu1));

    CovEstimate subsample_cov;   // reused by the jump rows
    bool have_subsample = false;

    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        const std::string& name = spec.estimators[e];
        auto& tally = out.tallies[e];
        std::ostringstream os;
        os << cell.index << ',' << (spec.model == PriceModel::SV ? "SV" : "BM") << ','
           << noise_name(spec.noise) << ',' << fmt(cell.theta) << ',' << cell.n << ','
           << cell.L << ',' << cell.p << ',' << rep << ',' << name;
        try {
            if (name == "jump") {
                if (!have_subsample) {
                    SubsampleConfig cfg{cell.L, cell.p, spec.corrections, spec.corrections, true};
                    subsample_cov = subsample_cov_noisy(prices, spec.spec, scheme, cfg);
                    have_subsample = true;
                }
                if (!jump_shape)
                    fail(ErrorCode::InvalidConfig, "jump rows need spec q=(2,1), r=(0,1)");
                TestResult tr = jump_test(prices, scheme, subsample_cov, false);
                tally.covered = tr.t <= normal_quantile(0.95);
                os << ',' << fmt(subsample_cov.min_eigenvalue) << ','
                   << fmt(subsample_cov.condition_number) << ',' << (subsample_cov.psd() ? 1 : 0)
                   << ',' << fmt(subsample_cov.effective_window) << ",1";
                for (std::size_t k = 0; k < m_max; ++k) os << ',' << (k < m ? fmt(est.values[k]) : "");
                append_t_cols(os, {}, m_max);
                os << ',' << fmt(tr.statistic) << ',' << fmt(tr.std_error) << ',' << fmt(tr.t)
                   << ',' << fmt(tr.p_right) << ',';
                out.rows.push_back(os.str());
                continue;
            }

            CovEstimate cov;
            if (name == "subsample") {
                SubsampleConfig cfg{cell.L, cell.p, spec.corrections, spec.corrections, true};
                cov = subsample_cov_noisy(prices, spec.spec, scheme, cfg);
                subsample_cov = cov;
                have_subsample = true;
            } else if (name == "pv") {
                cov = sigma_tilde_star_pv(prices, spec.spec, scheme);
            } else if (name == "avar") {
                cov = observed_avar(prices, spec.spec, scheme,
                                    ObservedAvarConfig(cell.L, 1, 2, true));
            } else {
                fail(ErrorCode::InvalidConfig, "unknown estimator " + name);
            }

            tally.nonpsd = cov.min_eigenvalue <= 0.0;
            tally.t.assign(m, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t k = 0; k < m; ++k) {
                double var = cov.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
                if (var > 0.0) tally.t[k] = rf * (est.values[k] - target[k]) / std::sqrt(var);
            }
            double contrast = 1.0;
            if (jump_shape) contrast = w.dot(cov.matrix * w);
            tally.negative_contrast = contrast <= 0.0;

            os << ',' << fmt(cov.min_eigenvalue) << ',' << fmt(cov.condition_number) << ','
               << (cov.psd() ? 1 : 0) << ',' << fmt(cov.effective_window) << ','
               << (contrast > 0.0 ? 1 : 0);
            for (std::size_t k = 0; k < m_max; ++k) os << ',' << (k < m ? fmt(est.values[k]) : "");
            append_t_cols(os, tally.t, m_max);
            os << ",,,,,";
            out.rows.push_back(os.str());
        } catch (const Error& err) {
            tally.error = true;
            os << ",,,,,";
            for (std::size_t k = 0; k < m_max; ++k) os << ',';
            for (std::size_t k = 0; k < m_max; ++k) os << ',';
            os << ",,,,," << sanitize(err.what());
            out.rows.push_back(os.str());
        }
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.n_sim < 1) fail(ErrorCode::InvalidConfig, "run_experiment: n_sim must be >= 1");

    std::vector<Cell> cells;
    std::size_t idx = 0;
    for (double theta : spec.thetas)
        for (std::size_t n : spec.ns)
            for (auto [L, p] : spec.lp) cells.push_back({idx++, theta, n, L, p});

    ExperimentResult result;
    result.header = {"cell", "model", "noise", "theta", "n",  "L",  "p",  "rep", "estimator",
                     "min_eig", "cond", "psd", "effective_window", "contrast_pos",
                     "v0", "v1", "v2", "v3", "t0", "t1", "t2", "t3",
                     "stat", "se", "t", "p_right", "error"};

    for (const Cell& cell : cells) {
        CellSummary cs;
        cs.cell = cell.index;
        cs.theta = cell.theta;
        cs.n = cell.n;
        cs.L = cell.L;
        cs.p = cell.p;

        // feasibility gate: one error record, grid continues
        try {
            WeightScheme scheme = WeightScheme::min_weight(cell.theta, cell.n);
            bool needs_blocks = false;
            for (const auto& e : spec.estimators)
                if (e == "subsample" || e == "jump") needs_blocks = true;
            if (needs_blocks && n_block(cell.n, scheme.kn(), cell.p, cell.L) < 1)
                fail(ErrorCode::InsufficientData, "cell infeasible: n < L*p*k_n");
            if (cell.n < 4 * scheme.kn())
                fail(ErrorCode::InsufficientData, "cell infeasible: n < 4*k_n");
        } catch (const Error& err) {
            cs.error = err.what();
            std::ostringstream os;
            os << cell.index << ',' << (spec.model == PriceModel::SV ? "SV" : "BM") << ','
               << noise_name(spec.noise) << ',' << fmt(cell.theta) << ',' << cell.n << ','
               << cell.L << ',' << cell.p << ",,error,,,,,,,,,,,,,,,,,,"
               << sanitize(err.what());
            result.rows.push_back(os.str());
            result.summaries.push_back(std::move(cs));
            continue;
        }

        std::vector<RepRows> reps(spec.n_sim);
        std::size_t nthreads = spec.threads ? spec.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
        nthreads = std::min<std::size_t>(nthreads, spec.n_sim);
        if (nthreads <= 1) {
            for (std::size_t r = 0; r < spec.n_sim; ++r) reps[r] = run_replication(spec, cell, r);
        } else {
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            for (std::size_t t = 0; t < nthreads; ++t)
                pool.emplace_back([&] {
                    for (;;) {
                        std::size_t r = next.fetch_add(1);
                        if (r >= spec.n_sim) break;
                        reps[r] = run_replication(spec, cell, r);
                    }
                });
            for (auto& th : pool) th.join();
        }

        // ordered reduction
        std::size_t m = spec.spec.m();
        std::vector<CellEstimatorSummary> per(spec.estimators.size());
        std::vector<std::vector<double>> tsum(spec.estimators.size(), std::vector<double>(m, 0.0));
        std::vector<std::vector<double>> tsq(spec.estimators.size(), std::vector<double>(m, 0.0));
        std::vector<std::vector<std::size_t>> tcount(spec.estimators.size(),
                                                     std::vector<std::size_t>(m, 0));
        for (std::size_t e = 0; e < per.size(); ++e) per[e].estimator = spec.estimators[e];
        for (std::size_t r = 0; r < spec.n_sim; ++r) {
            for (auto& row : reps[r].rows) result.rows.push_back(std::move(row));
            for (std::size_t e = 0; e < per.size(); ++e) {
                const auto& tally = reps[r].tallies[e];
                ++per[e].count;
                if (tally.error) ++per[e].errors;
                if (tally.nonpsd) ++per[e].nonpsd;
                if (tally.negative_contrast) ++per[e].negative_contrast;
                if (tally.covered) ++per[e].covered_95_right;
                for (std::size_t k = 0; k < std::min(m, tally.t.size()); ++k)
                    if (std::isfinite(tally.t[k])) {
                        tsum[e][k] += tally.t[k];
                        tsq[e][k] += tally.t[k] * tally.t[k];
                        ++tcount[e][k];
                    }
            }
        }
        for (std::size_t e = 0; e < per.size(); ++e) {
            per[e].mean_t.assign(m, std::numeric_limits<double>::quiet_NaN());
            per[e].std_t.assign(m, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t k = 0; k < m; ++k) {
                if (tcount[e][k] < 2) continue;
                double cnt = static_cast<double>(tcount[e][k]);
                double mean = tsum[e][k] / cnt;
                per[e].mean_t[k] = mean;
                per[e].std_t[k] = std::sqrt((tsq[e][k] - cnt * mean * mean) / (cnt - 1.0));
            }
        }
        cs.per_estimator = std::move(per);
        result.summaries.push_back(std::move(cs));
    }
    return result;
}

void write_rows_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::ParseError, "write_rows_csv: cannot open " + path);
    for (std::size_t i = 0; i < result.header.size(); ++i)
        out << (i ? "," : "") << result.header[i];
    out << '\n';
    for (const auto& row : result.rows) out << row << '\n';
}

} // namespace hfsub
