#include "spinbath/spin_ops.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinbath {

using std::complex;

SpinMatrices spin_matrices(int two_spin) {
    if (two_spin < 0) throw std::invalid_argument("two_spin must be >= 0");
    const int dim = two_spin + 1;
    const double i_val = two_spin / 2.0;
    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        double m = i_val - k;  // row k holds |I, m>
        z(k, k) = m;
        if (k >= 1) {
            // <I,m+1| I+ |I,m>
            plus(k - 1, k) = std::sqrt(i_val * (i_val + 1) - m * (m + 1));
        }
    }
    SpinMatrices s;
    s.two_spin = two_spin;
    s.x = (plus + plus.adjoint()) / 2.0;
    s.y = (plus - plus.adjoint()) / complex<double>(0, 2);
    s.z = z;
    return s;
}

Eigen::MatrixXcd rank2_tensor_op(const SpinMatrices& s, int m, int n) {
    if (m < 0 || m > 2 || n < 0 || n > 2)
        throw std::invalid_argument("cartesian index out of range");
    const Eigen::MatrixXcd* comp[3] = {&s.x, &s.y, &s.z};
    const double i_val = s.two_spin / 2.0;
    Eigen::MatrixXcd q = ((*comp[m]) * (*comp[n]) + (*comp[n]) * (*comp[m])) / 2.0;
    if (m == n) {
        q -= (i_val * (i_val + 1) / 3.0) *
             Eigen::MatrixXcd::Identity(s.dim(), s.dim());
    }
    return q;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd qubit_sector_coupling(int two_spin) {
    SpinMatrices s = spin_matrices(two_spin);
    SpinMatrices q = spin_matrices(1);
    return kron(q.x, s.x) + kron(q.y, s.y) + kron(q.z, s.z);
}

Eigen::Matrix3d rotation_from_z(const Eigen::Vector3d& unit_axis) {
    Eigen::Quaterniond rot =
        Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), unit_axis);
    return rot.toRotationMatrix();
}

}  // namespace spinbath
