#pragma once

#include "cmssa/ssa.hpp"

#include <Eigen/Core>

namespace contract {

struct EigenCheck {
    double orthonormality = 0.0; // max |E^T E - I|
    double residual = 0.0;       // max_k ||C e_k - l_k e_k|| / (||C||_F + 1)
    bool sorted = true;
    bool sign_canonical = true;

    bool ok() const { return orthonormality <= 1e-10 && residual <= 1e-8 && sorted && sign_canonical; }
};

inline EigenCheck check_basis(const cmssa::ssa::EigenBasis& basis, const Eigen::MatrixXd& c)
{
    EigenCheck out;
    const auto k = basis.components();
    out.orthonormality
        = (basis.vectors.transpose() * basis.vectors - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    const double scale = c.norm() + 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::VectorXd r = c * basis.vectors.col(i) - basis.eigenvalues(i) * basis.vectors.col(i);
        out.residual = std::max(out.residual, r.norm() / scale);
        if (i > 0 && basis.eigenvalues(i) > basis.eigenvalues(i - 1))
            out.sorted = false;
        Eigen::Index arg = 0;
        basis.vectors.col(i).cwiseAbs().maxCoeff(&arg);
        if (basis.vectors(arg, i) <= 0.0)
            out.sign_canonical = false;
    }
    return out;
}

} // namespace contract
