#pragma once

// Support set of the transition operator.  For a mask supported on Q, the
// attractor Y = { sum_{j>=1} M^{-j} s_j : s_j in Q } carries supp(phi); the
// polynomial space is indexed by the symmetric integer set
//
//     Omega = (Y - Y) cap Z^n,
//
// computed here as the greatest fixed point of the pruning
//     keep k  iff  exists q' in Q-Q with  M k + q' in the current set
// inside a certified bounding ball.  All membership arithmetic is exact
// integer; the ball radius comes from the operator-norm series
// R = max|q'| * sum_j ||M^{-j}||.

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <unordered_set>

#include "tilereg/lattice.hpp"

namespace tilereg {

struct SupportSet {
    std::vector<IVec> points;  // sorted lexicographically
    int n = 0;

    bool contains(const IVec& k) const {
        return std::binary_search(points.begin(), points.end(), k);
    }
    std::size_t size() const { return points.size(); }
};

struct OmegaOptions {
    double tail_tolerance = 1e-12;  // truncation of the norm series
    long long point_cap = 1000000;  // BoundOverflow above this many candidates
};

inline double operator_norm(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()(0);
}

// sum_{j>=1} ||M^{-j}||_2, truncated once terms drop below tol * partial sum.
inline double inverse_norm_series(const DilationMatrix& M, double tol = 1e-12) {
    Eigen::MatrixXd Minv = M.as_double().inverse();
    Eigen::MatrixXd P = Minv;
    double sum = 0;
    for (int j = 0; j < 16384; ++j) {
        double term = operator_norm(P);
        sum += term;
        if (term < tol * sum) break;
        P = Minv * P;
    }
    return sum;
}

inline SupportSet omega(const DilationMatrix& M, const std::vector<IVec>& Q,
                        const OmegaOptions& opt = {}) {
    if (Q.empty()) throw ValidationError("omega: empty mask support");
    int n = M.n;
    // Q' = Q - Q, deduplicated.
    std::unordered_set<IVec, IVecHash> qdiff;
    for (const auto& s : Q)
        for (const auto& t : Q) qdiff.insert(vec_sub(s, t));
    std::vector<IVec> Qp(qdiff.begin(), qdiff.end());

    double qmax = 0;
    for (const auto& q : Qp) qmax = std::max(qmax, vec_norm2(q));
    double R = qmax * inverse_norm_series(M, opt.tail_tolerance);
    double radius = R + std::sqrt(double(n));
    long long box = (long long)std::ceil(radius);

    double volume = 1;
    for (int i = 0; i < n; ++i) volume *= double(2 * box + 1);
    if (volume > double(opt.point_cap))
        throw BoundOverflow("omega: bounding box of " + std::to_string((long long)volume) +
                            " lattice points exceeds the cap");

    std::unordered_set<IVec, IVecHash> alive;
    IVec k(n, -box);
    while (true) {
        if (vec_norm2(k) <= radius) alive.insert(k);
        int d = n - 1;
        while (d >= 0 && k[d] == box) { k[d] = -box; --d; }
        if (d < 0) break;
        ++k[d];
    }

    // Downward pruning with delete-after-full-scan semantics.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<IVec> dead;
        for (const auto& p : alive) {
            IVec Mp = mat_vec(M.entries, p);
            bool ok = false;
            for (const auto& q : Qp) {
                if (alive.count(vec_add(Mp, q))) { ok = true; break; }
            }
            if (!ok) dead.push_back(p);
        }
        if (!dead.empty()) {
            changed = true;
            for (const auto& p : dead) alive.erase(p);
        }
    }

    if (alive.empty() || !alive.count(IVec(n, 0)))
        throw EmptyResult("omega: fixed point lost the origin; inconsistent inputs");

    // Invariance of Proposition-style pruning: M^{-1}(Omega + Q') cap Z^n is
    // contained in Omega.  Exact integer assertion.
    for (const auto& p : alive)
        for (const auto& q : Qp) {
            IVec y = vec_add(p, q);
            RVec x = M.inverse_apply(y);
            bool integral = true;
            IVec z(n);
            for (int i = 0; i < n; ++i) {
                if (!x[i].is_integer()) { integral = false; break; }
                z[i] = x[i].num();
            }
            if (integral && !alive.count(z))
                throw EmptyResult("omega: pruning fixed point is not invariant");
        }

    SupportSet S;
    S.n = n;
    S.points.assign(alive.begin(), alive.end());
    std::sort(S.points.begin(), S.points.end());
    return S;
}

struct TileCloud {
    std::vector<std::vector<double>> points;
    int depth = 0;
};

// Finite-depth M-adic expansions sum_{j<=depth} M^{-j} d_{i_j}; full
// enumeration when m^depth fits the budget, else uniform digit strings from a
// seeded generator.
inline TileCloud tile_points(const DilationMatrix& M, const DigitSet& D, int depth,
                             std::optional<long long> sample = std::nullopt,
                             std::uint64_t seed = 0x5eed) {
    if (depth < 1) throw ValidationError("tile_points: depth must be >= 1");
    int n = M.n;
    Eigen::MatrixXd Minv = M.as_double().inverse();
    long long budget = sample.value_or(1000000);
    double full = std::pow(double(M.m), double(depth));

    auto expand = [&](const std::vector<int>& digits_idx) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int j = depth - 1; j >= 0; --j) {
            for (int i = 0; i < n; ++i) x(i) += double(D.digits[digits_idx[j]][i]);
            x = Minv * x;
        }
        return std::vector<double>(x.data(), x.data() + n);
    };

    TileCloud cloud;
    cloud.depth = depth;
    if (full <= double(budget)) {
        std::vector<int> idx(depth, 0);
        while (true) {
            cloud.points.push_back(expand(idx));
            int d = depth - 1;
            while (d >= 0 && idx[d] == int(M.m) - 1) { idx[d] = 0; --d; }
            if (d < 0) break;
            ++idx[d];
        }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, int(M.m) - 1);
        std::vector<int> idx(depth);
        for (long long s = 0; s < budget; ++s) {
            for (int j = 0; j < depth; ++j) idx[j] = pick(rng);
            cloud.points.push_back(expand(idx));
        }
    }
    return cloud;
}

}  // namespace tilereg
