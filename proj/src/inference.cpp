#include "hfsub/inference.hpp"

#include <cmath>
#include <limits>

#include "hfsub/moments.hpp"

namespace hfsub {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// AS241 (Wichura) rational approximations.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        fail(ErrorCode::InvalidLevel, "normal_quantile: p must be in (0,1)");
    double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        double num = (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                           67265.770927008700853) * r + 45921.953931549871457) * r +
                         13731.693765509461125) * r + 1971.5909503065514427) * r +
                       133.14166789178437745) * r + 3.387132872796366608);
        double den = (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                           39307.89580009271061) * r + 21213.794301586595867) * r +
                         5394.1960214247511077) * r + 687.1870074920579083) * r +
                       42.313330701600911252) * r + 1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        double num = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                           0.24178072517745061177) * r + 1.27045825245236838258) * r +
                         3.64784832476320460504) * r + 5.7694972214606914055) * r +
                       4.6303378461565452959) * r + 1.42343711074968357734);
        double den = (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                           0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                         0.68976733498510000455) * r + 1.6763848301838038494) * r +
                       2.05319162663775882187) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                           0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                         0.29656057182850489123) * r + 1.7848265399172913358) * r +
                       5.4637849111641143699) * r + 6.6579046435011037772);
        double den = (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                           1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                         0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                       0.59983220655588793769) * r + 1.0);
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

double rate_factor(ConvergenceRate rate, std::size_t n) {
    double nd = static_cast<double>(n);
    return rate == ConvergenceRate::SqrtN ? std::sqrt(nd) : std::pow(nd, 0.25);
}

std::vector<double> studentize(const EstimateVector& estimate, const std::vector<double>& target,
                               const CovEstimate& cov, std::size_t n, ConvergenceRate rate) {
    std::size_t m = estimate.m();
    if (target.size() != m || static_cast<std::size_t>(cov.matrix.rows()) != m)
        fail(ErrorCode::LengthMismatch, "studentize: dimension mismatch");
    double rf = rate_factor(rate, n);
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        double var = cov.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        if (var <= 0.0)
            fail(ErrorCode::NonPositiveVariance, "studentize: non-positive diagonal variance");
        out[k] = rf * (estimate.values[k] - target[k]) / std::sqrt(var);
    }
    return out;
}

double jump_log_statistic(double v20, double v11) {
    double mu1 = gaussian_abs_moment(1.0);
    return std::log(v20) - std::log(v11 / (mu1 * mu1));
}

Eigen::Vector2d jump_log_gradient(double v20, double v11) {
    // component order (V*(2,0), V*(1,1))
    return {1.0 / v20, -1.0 / v11};
}

TestResult jump_test(const TickSeries& prices, const WeightScheme& scheme, const CovEstimate& cov,
                     bool log_form) {
    std::size_t n = prices.size() - 1;
    PowerSpec spec({2.0, 1.0}, {0.0, 1.0});
    EstimateVector v = preavg_bipower(prices, spec, scheme);
    double v20 = v.values[0], v11 = v.values[1];
    double mu1 = gaussian_abs_moment(1.0);

    TestResult out;
    out.rate = ConvergenceRate::FourthRootN;
    out.cov_min_eigenvalue = cov.min_eigenvalue;
    out.cov_condition_number = cov.condition_number;
    out.cov_psd = cov.psd();

    double rf = rate_factor(out.rate, n);
    if (log_form) {
        if (v20 <= 0.0 || v11 <= 0.0)
            fail(ErrorCode::NonPositiveEstimate, "jump_test: log form needs positive estimates");
        Eigen::Vector2d g = jump_log_gradient(v20, v11);
        double var = g.dot(cov.matrix * g);
        if (var <= 0.0)
            fail(ErrorCode::NonPositiveVariance, "jump_test: non-positive contrast variance");
        out.statistic = jump_log_statistic(v20, v11);
        out.std_error = std::sqrt(var) / rf;
    } else {
        Eigen::Vector2d w(1.0, -1.0 / (mu1 * mu1));
        double var = w.dot(cov.matrix * w);
        if (var <= 0.0)
            fail(ErrorCode::NonPositiveVariance, "jump_test: non-positive contrast variance");
        out.statistic = w(0) * v20 + w(1) * v11;
        out.std_error = std::sqrt(var) / rf;
    }
    out.t = out.statistic / out.std_error;
    out.p_right = 1.0 - normal_cdf(out.t);
    out.p_two_sided = 2.0 * (1.0 - normal_cdf(std::abs(out.t)));
    return out;
}

double const_vol_statistic(double v20, double v40, const WeightConstants& c, double theta,
                           double omega2) {
    double d = theta * c.psi2_n;
    double iv = v20 / d - c.psi1_n * omega2 / d;
    double mu4 = gaussian_abs_moment(4.0);
    double iq = v40 / (mu4 * d * d) - 2.0 * c.psi2_n * c.psi1_n * omega2 * iv / (d * d) -
                (c.psi1_n * omega2) * (c.psi1_n * omega2) /
                    ((theta * theta * c.psi2_n) * (theta * theta * c.psi2_n));
    if (iv <= 0.0 || iq <= 0.0)
        fail(ErrorCode::NonPositiveEstimate, "const_vol_statistic: IV or IQ not positive");
    return 0.5 * std::log(iq) - std::log(iv);
}

Eigen::Vector2d const_vol_gradient(double v20, double v40, const WeightConstants& c, double theta,
                                   double omega2) {
    double d = theta * c.psi2_n;
    double iv = v20 / d - c.psi1_n * omega2 / d;
    double mu4 = gaussian_abs_moment(4.0);
    double a = 2.0 * c.psi2_n * c.psi1_n * omega2 / (d * d);
    double iq = v40 / (mu4 * d * d) - a * iv -
                (c.psi1_n * omega2) * (c.psi1_n * omega2) /
                    ((theta * theta * c.psi2_n) * (theta * theta * c.psi2_n));
    double div_dy2 = 1.0 / d;
    double diq_dy2 = -a * div_dy2;
    double diq_dy4 = 1.0 / (mu4 * d * d);
    // f = 0.5 log(IQ) - log(IV), components ordered (V*(2,0), V*(4,0))
    return {0.5 * diq_dy2 / iq - div_dy2 / iv, 0.5 * diq_dy4 / iq};
}

TestResult const_vol_test(const TickSeries& prices, const WeightScheme& scheme,
                          const CovEstimate& cov4) {
    std::size_t n = prices.size() - 1;
    WeightConstants c = weight_constants(scheme);
    PowerSpec spec({2.0, 4.0}, {0.0, 0.0});
    EstimateVector v = preavg_bipower(prices, spec, scheme);
    NoiseVariance nv = noise_variance_hat(log_returns(prices));
    double omega2 = std::max(nv.value, 0.0);

    TestResult out;
    out.rate = ConvergenceRate::FourthRootN;
    out.cov_min_eigenvalue = cov4.min_eigenvalue;
    out.cov_condition_number = cov4.condition_number;
    out.cov_psd = cov4.psd();

    out.statistic = const_vol_statistic(v.values[0], v.values[1], c, scheme.theta(), omega2);
    Eigen::Vector2d g = const_vol_gradient(v.values[0], v.values[1], c, scheme.theta(), omega2);
    double var = g.dot(cov4.matrix * g);
    if (var <= 0.0)
        fail(ErrorCode::NonPositiveVariance, "const_vol_test: non-positive contrast variance");
    out.std_error = std::sqrt(var) / rate_factor(out.rate, n);
    out.t = out.statistic / out.std_error;
    out.p_right = 1.0 - normal_cdf(out.t);
    out.p_two_sided = 2.0 * (1.0 - normal_cdf(std::abs(out.t)));
    return out;
}

MatrixDiagnostics matrix_diagnostics(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols())
        fail(ErrorCode::NotSquare, "matrix_diagnostics: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    const auto& ev = es.eigenvalues();
    MatrixDiagnostics d;
    d.min_eigenvalue = ev.minCoeff();
    double smax = ev.cwiseAbs().maxCoeff();
    double smin = ev.cwiseAbs().minCoeff();
    d.condition_number = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    d.psd = d.min_eigenvalue >= -1e-10;
    d.ill_conditioned = d.condition_number >= 10.0 * static_cast<double>(cov.rows());
    return d;
}

std::pair<double, double> confidence_interval(double statistic, double std_error, double level,
                                              Sidedness sidedness) {
    if (!(level > 0.0 && level < 1.0))
        fail(ErrorCode::InvalidLevel, "confidence_interval: level must be in (0,1)");
    if (std_error <= 0.0)
        fail(ErrorCode::NonPositiveVariance, "confidence_interval: std_error must be > 0");
    double inf = std::numeric_limits<double>::infinity();
    switch (sidedness) {
        case Sidedness::TwoSided: {
            double z = normal_quantile(0.5 + 0.5 * level);
            return {statistic - z * std_error, statistic + z * std_error};
        }
        case Sidedness::LeftSided: {
            double z = normal_quantile(level);
            return {statistic - z * std_error, inf};
        }
        case Sidedness::RightSided: {
            double z = normal_quantile(level);
            return {-inf, statistic + z * std_error};
        }
    }
    fail(ErrorCode::InvalidLevel, "confidence_interval: unknown sidedness");
}

} // namespace hfsub
