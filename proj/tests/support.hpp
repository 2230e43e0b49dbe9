#pragma once

#include "oracle.hpp"
#include "sgeuler/grid.hpp"

namespace support {

inline oracle::Grid to_oracle(const sgeuler::GridSpec& g) {
    return {g.dims(), g.origin(), g.spacing()};
}

inline Eigen::VectorXd to_eigen(const sgeuler::ScalarField& s) {
    Eigen::VectorXd v(static_cast<long>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) v(static_cast<long>(i)) = s[i];
    return v;
}

inline std::vector<Eigen::Vector3d> to_eigen(const sgeuler::VectorField& f) {
    std::vector<Eigen::Vector3d> out;
    for (const auto& x : f) out.emplace_back(x[0], x[1], x[2]);
    return out;
}

inline std::vector<Eigen::Matrix3d> to_eigen(const sgeuler::TensorField& t) {
    std::vector<Eigen::Matrix3d> out;
    for (const auto& m : t) {
        Eigen::Matrix3d e;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) e(a, b) = m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        out.push_back(e);
    }
    return out;
}

}  // namespace support
