#include "hfsub/cov_estimate.hpp"

#include <cmath>
#include <limits>

namespace hfsub {

CovEstimate make_cov_estimate(const Eigen::MatrixXd& raw, std::string estimator_id,
                              double effective_window) {
    CovEstimate out;
    out.estimator_id = std::move(estimator_id);
    out.effective_window = effective_window;
    out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    out.matrix = 0.5 * (raw + raw.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
    const auto& ev = es.eigenvalues();
    out.min_eigenvalue = ev.minCoeff();
    double smax = ev.cwiseAbs().maxCoeff();
    double smin = ev.cwiseAbs().minCoeff();
    out.condition_number =
        (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace hfsub
