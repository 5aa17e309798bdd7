#pragma once

// Real even trigonometric polynomials with spectrum on a symmetric support
// set Omega:
//
//     p(xi) = x_0 + sum_{k in Omega+} 2 x_k cos(2 pi (k, xi)),
//
// stored in folded coordinates (one entry per {k,-k} pair).  Faces of the
// nonnegative cone are cut out by zero constraints of even order at rational
// points or on rational affine subspaces; the face plane is the null space of
// the stacked constraint rows.
//
// Point constraint of order t at z: all derivatives D^beta p(z), |beta| < t,
// vanish.  In folded coordinates the beta-row reads k^beta cos(2 pi (k,z))
// for even |beta| and k^beta sin(2 pi (k,z)) for odd |beta|; odd rows at
// z = 0 vanish identically and are dropped.
//
// Affine subspace constraint (base z0, directions u_1..u_d, order t):
// substitute xi = z0 + sum tau_i u_i, group support points by the exact
// rational frequency tuple ((k,u_1),...,(k,u_d)), and require, per group and
// per transverse multi-index |gamma| < t, the grouped sum of
// p_k * prod_j (k,v_j)^{gamma_j} * e^{2 pi i (k,z0)} to vanish, where v_j is
// an exact basis of the orthogonal complement of span(u_i).

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include "tilereg/attractor.hpp"
#include "tilereg/rational.hpp"

namespace tilereg {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FoldedBasis {
    SupportSet omega;
    std::vector<IVec> reps;  // reps[0] = 0, then the lex-positive half, sorted
    std::unordered_map<IVec, int, IVecHash> index;  // both k and -k map here

    FoldedBasis() = default;
    explicit FoldedBasis(const SupportSet& O) : omega(O) {
        reps.push_back(IVec(O.n, 0));
        for (const auto& k : O.points)
            if (lex_positive(k)) reps.push_back(k);
        std::sort(reps.begin() + 1, reps.end());
        for (int i = 0; i < int(reps.size()); ++i) {
            index[reps[i]] = i;
            index[vec_neg(reps[i])] = i;
        }
    }
    int dim() const { return int(reps.size()); }
    int n() const { return omega.n; }
};

inline double evaluate(const FoldedBasis& B, const Eigen::VectorXd& x,
                       const std::vector<double>& xi) {
    double v = x(0);
    for (int i = 1; i < B.dim(); ++i) {
        double ph = 0;
        for (int d = 0; d < B.n(); ++d) ph += double(B.reps[i][d]) * xi[d];
        v += 2.0 * x(i) * std::cos(kTwoPi * ph);
    }
    return v;
}

struct ZeroConstraint {
    enum Kind { Point, AffineSubspace } kind = Point;
    RVec base;        // z (Point) or z0 (AffineSubspace), exact rationals
    RMat directions;  // u_1..u_d for AffineSubspace, exact rationals
    int order = 2;    // positive even integer 2(k+1)

    static ZeroConstraint point(RVec z, int order) {
        ZeroConstraint c;
        c.kind = Point;
        c.base = std::move(z);
        c.order = order;
        return c;
    }
    static ZeroConstraint subspace(RVec z0, RMat dirs, int order) {
        ZeroConstraint c;
        c.kind = AffineSubspace;
        c.base = std::move(z0);
        c.directions = std::move(dirs);
        c.order = order;
        return c;
    }
};

namespace detail {

inline void enumerate_multi_indices(int nvars, int total,
                                    std::vector<std::vector<int>>& out) {
    std::vector<int> beta(nvars, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == nvars - 1) {
            beta[pos] = left;
            out.push_back(beta);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            beta[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    if (nvars == 0) {
        if (total == 0) out.push_back({});
        return;
    }
    rec(0, total);
}

inline double phase_cos(const Rational& f) { return std::cos(kTwoPi * f.mod1().to_double()); }
inline double phase_sin(const Rational& f) { return std::sin(kTwoPi * f.mod1().to_double()); }

// Per-dimension scale so powered coordinates stay O(1); pure row scaling,
// rank-neutral.
inline std::vector<double> coordinate_scales(const FoldedBasis& B) {
    std::vector<double> s(B.n(), 1.0);
    for (const auto& k : B.omega.points)
        for (int d = 0; d < B.n(); ++d) s[d] = std::max(s[d], double(std::abs(k[d])));
    return s;
}

inline void push_row_if_nonzero(std::vector<Eigen::RowVectorXd>& rows,
                                Eigen::RowVectorXd row) {
    double mx = row.cwiseAbs().maxCoeff();
    if (mx < 1e-14) return;
    rows.push_back(row / mx);
}

}  // namespace detail

inline std::vector<Eigen::RowVectorXd> constraint_rows(const FoldedBasis& B,
                                                       const ZeroConstraint& c) {
    const int n = B.n();
    const int dim = B.dim();
    if (c.order < 2 || c.order % 2 != 0)
        throw ValidationError("constraint order must be a positive even integer");
    if (int(c.base.size()) != n) throw ValidationError("constraint base has wrong dimension");
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> scale = detail::coordinate_scales(B);

    if (c.kind == ZeroConstraint::Point) {
        const RVec& z = c.base;
        bool z_zero = true;
        for (const auto& v : z)
            if (!v.is_zero()) z_zero = false;
        for (int total = 0; total <= c.order - 1; ++total) {
            std::vector<std::vector<int>> betas;
            detail::enumerate_multi_indices(n, total, betas);
            for (const auto& beta : betas) {
                bool odd = total % 2 != 0;
                if (odd && z_zero) continue;  // sin(0) rows vanish by symmetry
                Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
                for (int i = 0; i < dim; ++i) {
                    const IVec& k = B.reps[i];
                    double mono = 1.0;
                    for (int d = 0; d < n; ++d)
                        for (int e = 0; e < beta[d]; ++e) mono *= double(k[d]) / scale[d];
                    Rational f = rvec_dot(k, z);
                    double w = odd ? detail::phase_sin(f) : detail::phase_cos(f);
                    row(i) = (i == 0 ? 1.0 : 2.0) * mono * w;
                }
                detail::push_row_if_nonzero(rows, std::move(row));
            }
        }
        return rows;
    }

    // Affine subspace.
    const RVec& z0 = c.base;
    const int d = int(c.directions.size());
    if (d == 0) throw ValidationError("affine subspace constraint without directions");
    for (const auto& u : c.directions)
        if (int(u.size()) != n) throw ValidationError("direction has wrong dimension");
    {
        RMat dirs = c.directions;
        if (rational_rank(dirs) != d)
            throw ValidationError("subspace directions are linearly dependent");
    }
    // Exact transverse complement: kernel of the direction rows.
    RMat trans = rational_kernel(c.directions, n);
    const int nt = int(trans.size());

    // Group the full (unfolded) support by exact frequency tuples.
    std::map<std::vector<Rational>, std::vector<IVec>> groups;
    for (const auto& k : B.omega.points) {
        std::vector<Rational> f(d);
        for (int i = 0; i < d; ++i) f[i] = rvec_dot(k, c.directions[i]);
        groups[f].push_back(k);
    }

    double tscale = 1.0;
    for (const auto& k : B.omega.points)
        for (int j = 0; j < nt; ++j)
            tscale = std::max(tscale, std::abs(rvec_dot(k, trans[j]).to_double()));

    for (const auto& [freq, members] : groups) {
        (void)freq;
        for (int total = 0; total <= c.order - 1; ++total) {
            std::vector<std::vector<int>> gammas;
            detail::enumerate_multi_indices(nt, total, gammas);
            for (const auto& gamma : gammas) {
                Eigen::RowVectorXd re = Eigen::RowVectorXd::Zero(dim);
                Eigen::RowVectorXd im = Eigen::RowVectorXd::Zero(dim);
                for (const auto& k : members) {
                    double mono = 1.0;
                    for (int j = 0; j < nt; ++j) {
                        double t = rvec_dot(k, trans[j]).to_double() / tscale;
                        for (int e = 0; e < gamma[j]; ++e) mono *= t;
                    }
                    Rational f = rvec_dot(k, z0);
                    int idx = B.index.at(k);
                    re(idx) += mono * detail::phase_cos(f);
                    im(idx) += mono * detail::phase_sin(f);
                }
                detail::push_row_if_nonzero(rows, std::move(re));
                detail::push_row_if_nonzero(rows, std::move(im));
            }
        }
    }
    return rows;
}

struct FaceBasis {
    Eigen::MatrixXd basis;  // dim(P_Omega) x dim, orthonormal columns
    std::vector<ZeroConstraint> constraints;
    int dim = 0;
};

// Orthonormal null-space basis of the stacked constraint rows; singular
// values below svd_tol * sigma_max count as zero.
inline FaceBasis face_basis(const FoldedBasis& B, const std::vector<ZeroConstraint>& constraints,
                            double svd_tol = 1e-10) {
    FaceBasis F;
    F.constraints = constraints;
    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& c : constraints) {
        auto r = constraint_rows(B, c);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const int D = B.dim();
    if (rows.empty()) {
        F.basis = Eigen::MatrixXd::Identity(D, D);
        F.dim = D;
        return F;
    }
    Eigen::MatrixXd A(int(rows.size()), D);
    for (int i = 0; i < int(rows.size()); ++i) A.row(i) = rows[i];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > svd_tol * smax) ++rank;
    F.dim = D - rank;
    F.basis = svd.matrixV().rightCols(F.dim);
    return F;
}

// Minimum of p over a uniform grid with `per_dim` points per dimension.
inline double min_on_grid(const FoldedBasis& B, const Eigen::VectorXd& x, int per_dim = 64) {
    int n = B.n();
    std::vector<int> idx(n, 0);
    std::vector<double> xi(n);
    double mn = std::numeric_limits<double>::infinity();
    while (true) {
        for (int d = 0; d < n; ++d) xi[d] = double(idx[d]) / double(per_dim);
        mn = std::min(mn, evaluate(B, x, xi));
        int d = n - 1;
        while (d >= 0 && idx[d] == per_dim - 1) { idx[d] = 0; --d; }
        if (d < 0) break;
        ++idx[d];
    }
    return mn;
}

inline double max_abs_on_grid(const FoldedBasis& B, const Eigen::VectorXd& x, int per_dim = 64) {
    int n = B.n();
    std::vector<int> idx(n, 0);
    std::vector<double> xi(n);
    double mx = 0;
    while (true) {
        for (int d = 0; d < n; ++d) xi[d] = double(idx[d]) / double(per_dim);
        mx = std::max(mx, std::abs(evaluate(B, x, xi)));
        int d = n - 1;
        while (d >= 0 && idx[d] == per_dim - 1) { idx[d] = 0; --d; }
        if (d < 0) break;
        ++idx[d];
    }
    return mx;
}

}  // namespace tilereg
