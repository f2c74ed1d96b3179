#pragma once

#include <Eigen/Dense>

namespace spinbath {

/// cartesian spin-I matrices in the standard |I,m> basis, m = I..-I
struct SpinMatrices {
    Eigen::MatrixXcd x, y, z;
    int two_spin;

    int dim() const { return two_spin + 1; }
};

SpinMatrices spin_matrices(int two_spin);

/// second-rank tensor operator Q^{mn} = (I^m I^n + I^n I^m)/2 - I^2 delta_mn / 3
Eigen::MatrixXcd rank2_tensor_op(const SpinMatrices& s, int m, int n);

/// kron(A, B)
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// heisenberg coupling S.I on a qubit (x) spin-I product space, dim 2(2I+1)
Eigen::MatrixXcd qubit_sector_coupling(int two_spin);

/// proper rotation taking z-hat to the given unit axis
Eigen::Matrix3d rotation_from_z(const Eigen::Vector3d& unit_axis);

}  // namespace spinbath
