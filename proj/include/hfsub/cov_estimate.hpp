#pragma once

#include <Eigen/Dense>
#include <string>

namespace hfsub {

/// Symmetric covariance matrix estimate with spectral diagnostics.
struct CovEstimate {
    Eigen::MatrixXd matrix;
    double min_eigenvalue = 0.0;
    double condition_number = 0.0;   // max|lambda| / min|lambda|, inf if singular
    std::string estimator_id;
    double effective_window = 1.0;   // fraction of [0,1] the estimate actually used
    double asymmetry = 0.0;          // max |A - A'| before symmetrisation

    bool psd(double tol = 1e-10) const { return min_eigenvalue >= -tol; }
};

/// Symmetrises the input, fills diagnostics, and tags the estimator id.
CovEstimate make_cov_estimate(const Eigen::MatrixXd& raw, std::string estimator_id,
                              double effective_window = 1.0);

} // namespace hfsub
