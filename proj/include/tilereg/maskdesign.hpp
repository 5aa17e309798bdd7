#pragma once

// Minimal-support masks for two-digit dilations (|det M| = 2).  Writing
// v = M^{-T} d* for the nonzero digit of M^T, 2v is an integer vector and the
// order-ell sum rules project onto the signed moment system
//
//     sum_i (-1)^{s_i} q_{s_i} s_i^r = 0,   r = 0..ell,   sum_i q_{s_i} = 1,
//
// over nodes s_i = (2v, k_i).  Placing the support points collinearly,
// k_i = s_i * k_base with (2v, k_base) = 1, makes the mask univariate along
// k_base, so the moment solution carries the full multivariate zero of order
// ell+1 at v; the designed mask c_{k_i} = 2 q_{s_i} then has exactly ell+2
// nonzero coefficients and sum rules of order >= ell.
//
// The ell+2 lower bound itself is checked independently: for m = 2 the
// sum-rules system is exactly rational, since e^{-2 pi i (k, v)} = (-1)^{(2v,k)},
// so solvability over a candidate support is a rank test over Q.

#include <algorithm>

#include "tilereg/lattice.hpp"
#include "tilereg/transition.hpp"

namespace tilereg {

struct MomentSystem {
    RVec v;                       // M^{-T} d*
    IVec two_v;                   // 2v, integer
    std::vector<long long> nodes; // s_1..s_{ell+2}
    RVec q;                       // solved weights, sum = 1
    int order = 0;
};

struct MinimalMaskResult {
    Mask mask;
    MomentSystem system;
    std::vector<IVec> support;  // k_i, aligned with nodes
};

namespace detail {

// Smallest-norm integer solution of (w, k) = 1 within the given search box.
inline std::optional<IVec> unit_diophantine(const IVec& w, long long radius) {
    int n = int(w.size());
    std::optional<IVec> best;
    double best_norm = 0;
    IVec k(n, -radius);
    while (true) {
        if (vec_dot(w, k) == 1) {
            double nn = vec_norm2(k);
            if (!best || nn < best_norm ||
                (nn == best_norm && k < *best)) {
                best = k;
                best_norm = nn;
            }
        }
        int d = n - 1;
        while (d >= 0 && k[d] == radius) { k[d] = -radius; --d; }
        if (d < 0) break;
        ++k[d];
    }
    return best;
}

}  // namespace detail

inline MinimalMaskResult design_minimal_mask(const DilationMatrix& M, int ell,
                                             std::optional<std::vector<long long>> nodes_opt =
                                                 std::nullopt) {
    if (M.m != 2) throw ValidationError("minimal-mask design requires |det M| = 2");
    if (ell < 0) throw ValidationError("order must be >= 0");

    DigitSet Dstar = canonical_digits(M, true);
    const IVec& dstar = Dstar.digits[1];
    RVec v = M.inverse_apply(dstar, true);
    IVec two_v(M.n);
    for (int i = 0; i < M.n; ++i) {
        Rational t = v[i] * Rational(2);
        if (!t.is_integer()) throw Error("2 M^{-T} d* is not integer");  // cannot happen, m = 2
        two_v[i] = t.num();
    }

    std::vector<long long> nodes;
    if (nodes_opt) {
        nodes = *nodes_opt;
        if (int(nodes.size()) != ell + 2)
            throw ValidationError("need exactly order+2 nodes");
        std::vector<long long> s = nodes;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw ValidationError("nodes must be distinct");
    } else {
        for (long long s = 0; s <= ell + 1; ++s) nodes.push_back(s);
    }

    // Moment system with the normalization row; singular means the parity
    // pattern degenerates (e.g. all nodes of one parity).
    const int N = ell + 2;
    RMat A(N, RVec(N, Rational(0)));
    RVec b(N, Rational(0));
    for (int r = 0; r <= ell; ++r)
        for (int i = 0; i < N; ++i) {
            Rational p(1);
            for (int e = 0; e < r; ++e) p *= Rational(nodes[i]);
            if (nodes[i] % 2 != 0) p = -p;
            A[r][i] = p;
        }
    for (int i = 0; i < N; ++i) A[ell + 1][i] = Rational(1);
    b[ell + 1] = Rational(1);
    RMat Acheck = A;
    if (rational_rank(Acheck) < N)
        throw ParityDegenerate("moment system singular for these nodes; choose nodes of "
                               "mixed parity");
    auto q = rational_solve(A, b);
    if (!q) throw ParityDegenerate("moment system inconsistent for these nodes");

    // Collinear support: k_i = s_i * k_base keeps the designed mask univariate
    // along k_base, which upgrades the line zero to a full zero of order ell+1.
    long long radius = 3 * (ell + 2);
    auto base = detail::unit_diophantine(two_v, radius);
    if (!base)
        throw NoDiophantineSolution("no integer point with (2v, k) = 1 within radius " +
                                    std::to_string(radius));
    MinimalMaskResult out;
    out.system.v = v;
    out.system.two_v = two_v;
    out.system.nodes = nodes;
    out.system.q = *q;
    out.system.order = ell;
    out.mask.n = M.n;
    for (int i = 0; i < N; ++i) {
        IVec k(M.n);
        for (int d = 0; d < M.n; ++d) k[d] = nodes[i] * (*base)[d];
        out.support.push_back(k);
        out.mask.coeffs[k] += Rational(2) * (*q)[i];
    }
    return out;
}

// Sanity assertion of the lower bound on concrete data.
inline bool verify_lower_bound(const Mask& mask, const DilationMatrix& M, int ell) {
    if (M.m != 2) throw ValidationError("lower bound applies to |det M| = 2");
    if (sum_rules_order(mask, M) < ell)
        throw ValidationError("mask does not satisfy sum rules of order " +
                              std::to_string(ell));
    return mask.nonzero_count() >= std::size_t(ell + 2);
}

// Exhaustively refutes supports of size <= ell+1 inside the box: for m = 2
// the sum-rules rows sum_k c_k k^beta (-1)^{(2v,k)} = 0, |beta| <= ell,
// together with sum c_k = 2, form an exactly rational system; solvability is
// a rank comparison.
inline bool brute_force_minimality(const DilationMatrix& M, int ell, long long box) {
    if (M.m != 2) throw ValidationError("minimality search requires |det M| = 2");
    if (ell > 3) throw ValidationError("brute force limited to order <= 3");
    if (box > 6) throw BoxTooLarge("box side limited to 6");

    DigitSet Dstar = canonical_digits(M, true);
    RVec v = M.inverse_apply(Dstar.digits[1], true);
    IVec two_v(M.n);
    for (int i = 0; i < M.n; ++i) two_v[i] = (v[i] * Rational(2)).num();

    std::vector<IVec> points;
    IVec k(M.n, -box);
    while (true) {
        points.push_back(k);
        int d = M.n - 1;
        while (d >= 0 && k[d] == box) { k[d] = -box; --d; }
        if (d < 0) break;
        ++k[d];
    }
    std::vector<std::vector<int>> betas;
    for (int t = 0; t <= ell; ++t) detail::enumerate_multi_indices(M.n, t, betas);

    auto solvable_on = [&](const std::vector<int>& idx) {
        const int cols = int(idx.size());
        RMat A;
        RVec b;
        for (const auto& beta : betas) {
            RVec row(cols, Rational(0));
            for (int c = 0; c < cols; ++c) {
                const IVec& p = points[idx[c]];
                Rational mono(1);
                for (int d = 0; d < M.n; ++d)
                    for (int e = 0; e < beta[d]; ++e) mono *= Rational(p[d]);
                if (vec_dot(two_v, p) % 2 != 0) mono = -mono;
                row[c] = mono;
            }
            A.push_back(std::move(row));
            b.push_back(Rational(0));
        }
        A.push_back(RVec(cols, Rational(1)));
        b.push_back(Rational(2));
        return rational_solve(A, b).has_value();
    };

    const int P = int(points.size());
    std::vector<int> idx;
    std::function<bool(int, int)> rec = [&](int start, int remaining) -> bool {
        if (!idx.empty() && solvable_on(idx)) return true;  // counterexample found
        if (remaining == 0) return false;
        for (int i = start; i < P; ++i) {
            idx.push_back(i);
            if (rec(i + 1, remaining - 1)) return true;
            idx.pop_back();
        }
        return false;
    };
    return !rec(0, ell + 1);
}

}  // namespace tilereg
