#pragma once

// Subdivision operator [S a](alpha) = sum_k c_{alpha - M k} a(k) and its
// iteration, used to sample refinable limit functions on M-adic grids
// (S^j applied to the delta sequence).

#include <Eigen/Dense>
#include <unordered_map>

#include "tilereg/transition.hpp"

namespace tilereg {

struct GridData {
    int n = 0;
    int level = 0;
    std::unordered_map<IVec, double, IVecHash> values;

    static GridData delta(int n) {
        GridData g;
        g.n = n;
        g.values[IVec(n, 0)] = 1.0;
        return g;
    }
};

inline GridData subdivision_step(const Mask& mask, const DilationMatrix& M,
                                 const GridData& data) {
    GridData out;
    out.n = data.n;
    out.level = data.level + 1;
    for (const auto& [k, a] : data.values) {
        if (a == 0.0) continue;
        IVec Mk = mat_vec(M.entries, k);
        for (const auto& [q, c] : mask.coeffs) {
            if (c.is_zero()) continue;
            out.values[vec_add(Mk, q)] += c.to_double() * a;
        }
    }
    return out;
}

inline GridData iterate(const Mask& mask, const DilationMatrix& M, const GridData& data0,
                        int j, long long support_cap = 10000000) {
    if (j < 1) throw ValidationError("iterate: level must be >= 1");
    std::size_t stencil = mask.nonzero_count();
    GridData g = data0;
    for (int step = 0; step < j; ++step) {
        if (double(g.values.size()) * double(stencil) > double(support_cap))
            throw SupportCap("projected subdivision support exceeds the cap");
        g = subdivision_step(mask, M, g);
    }
    return g;
}

inline GridData sample_refinable(const Mask& mask, const DilationMatrix& M, int j,
                                 long long support_cap = 10000000) {
    return iterate(mask, M, GridData::delta(mask.n), j, support_cap);
}

// Level-j coordinates M^{-j} k for export.
inline std::vector<double> grid_coordinates(const DilationMatrix& M, int level, const IVec& k) {
    Eigen::MatrixXd Minv = M.as_double().inverse();
    Eigen::VectorXd x(M.n);
    for (int i = 0; i < M.n; ++i) x(i) = double(k[i]);
    for (int s = 0; s < level; ++s) x = Minv * x;
    return std::vector<double>(x.data(), x.data() + M.n);
}

}  // namespace tilereg
