#pragma once

// The transition operator on P_Omega and the regularity machinery built on
// it.  With the normalized mask chat = c/m and its autocorrelation
// a_t = sum_j chat_{j+t} chat_j (so a(xi) = |chat(xi)|^2), the operator
//
//     [T p](xi) = sum_{d* in D*} a(M^{-T}(xi + d*)) p(M^{-T}(xi + d*))
//
// acts on coefficients by (T p)_k = m * sum_j a_{Mk - j} p_j and maps P_Omega
// into itself.  Restricting T to the faces cut out by even-order zeros at the
// origin (and, per spectral level, on the orthogonal complement of the level
// subspace) gives the spectral radii rho_k and rho_{k,s}; the Hoelder
// exponent in L2 is alpha = min_s (1/2) log_{1/r_s} rho_{k,s}, in the generic
// case (1/2) log_{1/r} rho_k with k the largest order for which that value
// still exceeds k.
//
// Normalization: the operator is built from chat = c/m, so the operator of
// the two-digit indicator mask fixes constants and the reported spectral
// radii feed the half-log formulas directly.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <sstream>

#include "tilereg/trigpoly.hpp"

namespace tilereg {

struct Mask {
    int n = 0;
    std::map<IVec, Rational> coeffs;  // finitely supported, sum = m

    std::vector<IVec> support() const {
        std::vector<IVec> s;
        s.reserve(coeffs.size());
        for (const auto& [k, v] : coeffs)
            if (!v.is_zero()) s.push_back(k);
        return s;
    }
    Rational sum() const {
        Rational s(0);
        for (const auto& [k, v] : coeffs) s += v;
        return s;
    }
    std::size_t nonzero_count() const {
        std::size_t c = 0;
        for (const auto& [k, v] : coeffs)
            if (!v.is_zero()) ++c;
        return c;
    }
};

inline void check_mask_normalization(const Mask& mask, long long m) {
    double s = mask.sum().to_double();
    if (std::abs(s - double(m)) > 1e-9 * double(m))
        throw ValidationError("mask coefficients sum to " + std::to_string(s) +
                              ", expected " + std::to_string(m));
}

struct Autocorrelation {
    int n = 0;
    std::map<IVec, double> coeffs;  // on Q - Q, symmetric, sums to 1

    double evaluate(const std::vector<double>& xi) const {
        double v = 0;
        for (const auto& [t, a] : coeffs) {
            double ph = 0;
            for (int d = 0; d < n; ++d) ph += double(t[d]) * xi[d];
            v += a * std::cos(kTwoPi * ph);
        }
        return v;
    }
};

inline Autocorrelation autocorrelation(const Mask& mask, long long m) {
    check_mask_normalization(mask, m);
    Autocorrelation A;
    A.n = mask.n;
    std::map<IVec, double> chat;
    for (const auto& [k, v] : mask.coeffs)
        if (!v.is_zero()) chat[k] = v.to_double() / double(m);
    for (const auto& [j, cj] : chat)
        for (const auto& [i, ci] : chat) A.coeffs[vec_sub(i, j)] += ci * cj;
    return A;
}

struct TransitionMatrix {
    Eigen::MatrixXd mat;  // folded coordinates
    FoldedBasis basis;
    Autocorrelation acf;
    long long m = 0;
};

inline TransitionMatrix build_transition(const DilationMatrix& M, const Mask& mask,
                                         const SupportSet& Omega) {
    TransitionMatrix T;
    T.basis = FoldedBasis(Omega);
    T.acf = autocorrelation(mask, M.m);
    T.m = M.m;

    // Closure: every integer point of M^{-1}(Omega + supp a) must lie in
    // Omega, otherwise the image escapes P_Omega.
    for (const auto& j : Omega.points)
        for (const auto& [t, a] : T.acf.coeffs) {
            if (std::abs(a) == 0.0) continue;
            RVec x = M.inverse_apply(vec_add(j, t));
            bool integral = true;
            IVec z(M.n);
            for (int i = 0; i < M.n; ++i) {
                if (!x[i].is_integer()) { integral = false; break; }
                z[i] = x[i].num();
            }
            if (integral && !Omega.contains(z))
                throw SupportEscape("transition image leaves Omega; was Omega computed "
                                    "from this mask's support?");
        }

    const int D = T.basis.dim();
    T.mat = Eigen::MatrixXd::Zero(D, D);
    auto acf_at = [&](const IVec& t) -> double {
        auto it = T.acf.coeffs.find(t);
        return it == T.acf.coeffs.end() ? 0.0 : it->second;
    };
    for (int r = 0; r < D; ++r) {
        IVec Mk = mat_vec(M.entries, T.basis.reps[r]);
        T.mat(r, 0) = double(M.m) * acf_at(Mk);
        for (int c = 1; c < D; ++c) {
            const IVec& j = T.basis.reps[c];
            T.mat(r, c) = double(M.m) * (acf_at(vec_sub(Mk, j)) + acf_at(vec_add(Mk, j)));
        }
    }
    return T;
}

// Direct evaluation of the digit-sum formula; the definition oracle for the
// assembled matrix.
inline double transition_apply_pointwise(const DilationMatrix& M, const TransitionMatrix& T,
                                         const DigitSet& Dstar, const Eigen::VectorXd& p,
                                         const std::vector<double>& xi) {
    Eigen::MatrixXd MinvT = M.as_double().transpose().inverse();
    double v = 0;
    for (const auto& dstar : Dstar.digits) {
        Eigen::VectorXd w(M.n);
        for (int i = 0; i < M.n; ++i) w(i) = xi[i] + double(dstar[i]);
        Eigen::VectorXd y = MinvT * w;
        std::vector<double> yv(y.data(), y.data() + M.n);
        v += T.acf.evaluate(yv) * evaluate(T.basis, p, yv);
    }
    return v;
}

// Largest ell such that every nonzero digit point M^{-T} d* is a zero of the
// mask of order >= ell + 1; -1 when even order zero fails.  The order-zero
// test is cross-checked against the coefficient cosets sum_{j} c_{Mj-d} = 1.
inline int sum_rules_order(const Mask& mask, const DilationMatrix& M, int cap = 64) {
    check_mask_normalization(mask, M.m);
    DigitSet Dstar = canonical_digits(M, true);
    std::vector<std::pair<IVec, double>> chat;
    for (const auto& [k, v] : mask.coeffs)
        if (!v.is_zero()) chat.emplace_back(k, v.to_double() / double(M.m));

    auto derivative_zero = [&](const RVec& v, const std::vector<int>& beta) {
        double re = 0, im = 0, scale = 0;
        int total = 0;
        for (int b : beta) total += b;
        for (const auto& [k, c] : chat) {
            double mono = 1.0;
            for (std::size_t d = 0; d < beta.size(); ++d)
                for (int e = 0; e < beta[d]; ++e) mono *= kTwoPi * double(k[d]);
            Rational f = rvec_dot(k, v);
            double ph = kTwoPi * f.mod1().to_double();
            // (-2 pi i k)^beta e^{-2 pi i (k,v)}: track the i-power parity.
            double cr = std::cos(ph), si = std::sin(ph);
            switch (total % 4) {
                case 0: re += c * mono * cr; im -= c * mono * si; break;
                case 1: im -= c * mono * cr; re += -c * mono * si; break;
                case 2: re -= c * mono * cr; im += c * mono * si; break;
                case 3: im += c * mono * cr; re += c * mono * si; break;
            }
            double kn = vec_norm2(k);
            scale += std::abs(c) * std::pow(kTwoPi * kn, double(total));
        }
        if (scale == 0) scale = 1;
        return std::hypot(re, im) <= 1e-9 * scale;
    };

    // Coefficient form of the order-zero condition.
    DigitSet D = canonical_digits(M, false);
    bool coeff_ok = true;
    for (const auto& d : D.digits) {
        Rational s(0);
        for (const auto& [k, c] : mask.coeffs) {
            RVec x = M.inverse_apply(vec_add(k, d));
            bool integral = true;
            for (const auto& xc : x)
                if (!xc.is_integer()) { integral = false; break; }
            if (integral) s += c;
        }
        if (std::abs(s.to_double() - 1.0) > 1e-9) coeff_ok = false;
    }

    int order = -1;
    for (int ell = 0; ell <= cap; ++ell) {
        bool ok = true;
        for (std::size_t t = 1; t < Dstar.digits.size() && ok; ++t) {
            RVec v = M.inverse_apply(Dstar.digits[t], true);
            std::vector<std::vector<int>> betas;
            detail::enumerate_multi_indices(M.n, ell, betas);
            for (const auto& beta : betas)
                if (!derivative_zero(v, beta)) { ok = false; break; }
        }
        if (!ok) break;
        order = ell;
    }
    if ((order >= 0) != coeff_ok)
        throw Error("sum-rules order-zero checks disagree between the derivative and "
                    "coefficient forms");
    return order;
}

// Least-squares restriction R with T N ~= N R; the invariance residual must
// stay below 1e-8 * ||T N||.
inline Eigen::MatrixXd restrict_to_face(const TransitionMatrix& T, const FaceBasis& F) {
    if (F.dim < 1) throw ValidationError("restriction needs a face of dimension >= 1");
    Eigen::MatrixXd TN = T.mat * F.basis;
    Eigen::MatrixXd R = F.basis.transpose() * TN;  // orthonormal N
    double resid = (TN - F.basis * R).norm();
    double scale = TN.norm();
    if (resid > 1e-8 * std::max(scale, 1e-30))
        throw NotInvariant("face is not invariant under the transition operator "
                           "(residual " + std::to_string(resid / std::max(scale, 1e-30)) +
                           " relative); check the constraints and the sum-rules order");
    return R;
}

struct SpectralRadiusResult {
    double rho = 0;
    bool leading_real_simple = false;
    Eigen::VectorXd eigvec;  // set when leading eigenvalue is real and simple
};

namespace detail {

// Parlett-Reinsch style diagonal balancing (radix 2).
inline Eigen::MatrixXd balance(Eigen::MatrixXd A) {
    const int n = int(A.rows());
    bool converged = false;
    while (!converged) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            double c = 0, r = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(A(j, i));
                r += std::abs(A(i, j));
            }
            if (c == 0 || r == 0) continue;
            double f = 1, s = c + r;
            while (c < r / 2) { c *= 2; r /= 2; f *= 2; }
            while (c >= r * 2) { c /= 2; r *= 2; f /= 2; }
            if ((c + r) < 0.95 * s) {
                converged = false;
                A.col(i) *= f;
                A.row(i) /= f;
            }
        }
    }
    return A;
}

}  // namespace detail

inline SpectralRadiusResult spectral_radius(const Eigen::MatrixXd& R) {
    if (!R.allFinite()) throw ValidationError("matrix has non-finite entries");
    SpectralRadiusResult out;
    if (R.rows() == 0) return out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(detail::balance(R), false);
    if (es.info() != Eigen::Success) throw NoConvergence("eigenvalue iteration failed");
    const auto& ev = es.eigenvalues();
    int lead = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > std::abs(ev(lead))) lead = i;
    out.rho = std::abs(ev(lead));
    int near = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) >= out.rho * (1.0 - 1e-9)) ++near;
    if (near == 1 && std::abs(ev(lead).imag()) <= 1e-9 * std::max(out.rho, 1e-30)) {
        out.leading_real_simple = true;
        // Re-solve with vectors on the unbalanced matrix for the eigenvector.
        Eigen::EigenSolver<Eigen::MatrixXd> es2(R, true);
        if (es2.info() == Eigen::Success) {
            int l2 = 0;
            for (int i = 0; i < es2.eigenvalues().size(); ++i)
                if (std::abs(es2.eigenvalues()(i)) > std::abs(es2.eigenvalues()(l2))) l2 = i;
            out.eigvec = es2.eigenvectors().col(l2).real();
        }
    }
    return out;
}

struct RegularityRow {
    int k = 0;
    int dim = 0;
    double rho = 0;
    double alpha_candidate = 0;  // (1/2) log_{1/r} rho
};

struct SubspaceRow {
    std::string label;
    double r = 0;
    double rho = 0;
    double alpha = 0;
    std::string in_space;  // "yes" / "no" / "boundary"
    int dim = 0;
};

struct PerSubspaceReport {
    int k = 0;
    std::vector<SubspaceRow> rows;
    std::optional<double> alpha;
};

struct RegularityReport {
    int sum_rules_order = -1;
    std::vector<RegularityRow> table;
    int k_max = -1;
    std::optional<double> alpha;
    std::string certification;  // GenericGuaranteed | FaceSupplied | Unverified
    std::vector<std::string> notes;
    std::optional<PerSubspaceReport> per_subspace;
};

inline double half_log_ratio(double rho, double r) {
    // (1/2) log_{1/r} rho = -(1/2) ln rho / ln r.
    return -0.5 * std::log(rho) / std::log(r);
}

namespace detail {

inline void krein_rutman_note(const TransitionMatrix& T, const FaceBasis& F,
                              const SpectralRadiusResult& sr, const std::string& where,
                              std::vector<std::string>& notes) {
    if (!sr.leading_real_simple || sr.eigvec.size() == 0) return;
    Eigen::VectorXd p = F.basis * sr.eigvec;
    int grid = T.basis.n() <= 2 ? 64 : 16;
    double mx = max_abs_on_grid(T.basis, p, grid);
    double tol = -1e-8 * std::max(mx, 1e-30);
    // Either sign may be the cone representative; warn only when both fail.
    if (min_on_grid(T.basis, p, grid) < tol && min_on_grid(T.basis, -p, grid) < tol)
        notes.push_back("leading eigenvector of " + where +
                        " is not sign-definite on the sample grid");
}

}  // namespace detail

inline RegularityReport regularity(const DilationMatrix& M, const Mask& mask,
                                   std::optional<int> max_k = std::nullopt,
                                   double svd_tol = 1e-10) {
    RegularityReport rep;
    rep.sum_rules_order = sum_rules_order(mask, M);
    SpectralStructure ss = spectral_moduli(M);
    double r = ss.moduli.front();

    auto inv = rational_invariant_check(M);
    if (inv.verdict == InvariantVerdict::GenericGuaranteed) {
        rep.certification = "GenericGuaranteed";
    } else {
        rep.certification = "Unverified";
        rep.notes.push_back(
            "dilation admits (or may admit) a rational invariant subspace; the generic "
            "formula is not certified — supply faces and run the per-subspace analysis");
    }

    if (rep.sum_rules_order < 0) {
        rep.notes.push_back("order-zero sum rules fail; no L2 criterion applies");
        return rep;
    }
    SupportSet Om = omega(M, mask.support());
    TransitionMatrix T = build_transition(M, mask, Om);

    int K = std::min(rep.sum_rules_order, max_k.value_or(rep.sum_rules_order));
    for (int k = 0; k <= K; ++k) {
        std::vector<ZeroConstraint> cs = {
            ZeroConstraint::point(RVec(M.n, Rational(0)), 2 * (k + 1))};
        FaceBasis F = face_basis(T.basis, cs, svd_tol);
        RegularityRow row;
        row.k = k;
        row.dim = F.dim;
        if (F.dim == 0) {
            rep.notes.push_back("face at order " + std::to_string(k) + " is trivial");
            break;
        }
        SpectralRadiusResult sr = spectral_radius(restrict_to_face(T, F));
        detail::krein_rutman_note(T, F, sr, "P^(" + std::to_string(k) + ")", rep.notes);
        row.rho = sr.rho;
        row.alpha_candidate = half_log_ratio(sr.rho, r);
        rep.table.push_back(row);
    }
    for (const auto& row : rep.table) {
        double margin = row.alpha_candidate - double(row.k);
        if (margin > 1e-9) rep.k_max = std::max(rep.k_max, row.k);
        else if (std::abs(margin) <= 1e-9)
            rep.notes.push_back("order " + std::to_string(row.k) +
                                " sits on the criterion boundary (|alpha - k| <= 1e-9)");
    }
    if (rep.k_max >= 0) rep.alpha = rep.table[rep.k_max].alpha_candidate;
    else rep.notes.push_back("no order satisfies the strict criterion: not in L2 by "
                             "this test");
    return rep;
}

struct FaceSpec {
    std::string label;
    double r = 0;                           // spectral level r_s
    std::vector<ZeroConstraint> constraints;  // orders <= 0 mean: use 2(k+1)
};

inline PerSubspaceReport regularity_per_subspace(const DilationMatrix& M, const Mask& mask,
                                                 const std::vector<FaceSpec>& faces, int k,
                                                 double svd_tol = 1e-10,
                                                 std::vector<std::string>* notes = nullptr) {
    if (faces.empty()) throw ValidationError("per-subspace analysis needs at least one face");
    int ell = sum_rules_order(mask, M);
    if (ell < k)
        throw ValidationError("per-subspace analysis at order " + std::to_string(k) +
                              " needs sum rules of that order (mask has " +
                              std::to_string(ell) + ")");
    SupportSet Om = omega(M, mask.support());
    TransitionMatrix T = build_transition(M, mask, Om);

    PerSubspaceReport out;
    out.k = k;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& fs : faces) {
        // The zero set always contains the origin.
        std::vector<ZeroConstraint> cs = {
            ZeroConstraint::point(RVec(M.n, Rational(0)), 2 * (k + 1))};
        for (ZeroConstraint c : fs.constraints) {
            if (c.order <= 0) c.order = 2 * (k + 1);
            cs.push_back(std::move(c));
        }
        FaceBasis F = face_basis(T.basis, cs, svd_tol);
        SubspaceRow row;
        row.label = fs.label;
        row.r = fs.r;
        row.dim = F.dim;
        if (F.dim == 0)
            throw ValidationError("face " + fs.label + " is trivial at order " +
                                  std::to_string(k));
        SpectralRadiusResult sr = spectral_radius(restrict_to_face(T, F));
        if (notes) detail::krein_rutman_note(T, F, sr, "face " + fs.label, *notes);
        row.rho = sr.rho;
        row.alpha = half_log_ratio(sr.rho, fs.r);
        double margin = row.alpha - double(k);
        row.in_space = margin > 1e-9 ? "yes" : (margin < -1e-9 ? "no" : "boundary");
        best = std::min(best, row.alpha);
        out.rows.push_back(std::move(row));
    }
    out.alpha = best;
    return out;
}

// For dilations that are block-diagonal in the coordinates (connected
// components of the symmetrized nonzero pattern), emits per-level faces:
// the level-s face constrains polynomials to vanish on the span of the
// coordinates of the complementary levels.
inline std::vector<FaceSpec> block_diagonal_faces(const DilationMatrix& M, int k) {
    int n = M.n;
    // Connected components of the symmetrized pattern.
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        std::vector<int> stack = {i};
        comp[i] = ncomp;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j)
                if (comp[j] < 0 && (M.entries[v][j] != 0 || M.entries[j][v] != 0)) {
                    comp[j] = ncomp;
                    stack.push_back(j);
                }
        }
        ++ncomp;
    }
    // Moduli per component; each block must be single-modulus.
    std::vector<double> comp_r(ncomp);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (comp[i] == c) idx.push_back(i);
        IMat sub(idx.size(), IVec(idx.size()));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b) sub[a][b] = M.entries[idx[a]][idx[b]];
        auto roots = poly_roots(char_poly(sub));
        double r0 = std::abs(roots.front());
        for (const auto& l : roots)
            if (std::abs(std::abs(l) - r0) > 1e-6 * r0)
                throw ValidationError(
                    "coordinate block mixes spectral levels; supply faces explicitly");
        comp_r[c] = r0;
    }
    // Group components into levels with the spectral clustering tolerance.
    SpectralStructure ss = spectral_moduli(M);
    std::vector<FaceSpec> faces;
    for (std::size_t s = 0; s < ss.moduli.size(); ++s) {
        double rs = ss.moduli[s];
        std::vector<int> inside;  // coordinates of level s
        for (int i = 0; i < n; ++i)
            if (std::abs(comp_r[comp[i]] - rs) <= 1e-6 * rs) inside.push_back(i);
        if (inside.empty())
            throw ValidationError("no coordinate block matches spectral level " +
                                  std::to_string(rs));
        FaceSpec fs;
        fs.label = "J" + std::to_string(s + 1);
        fs.r = rs;
        RMat dirs;  // complementary coordinate axes span J_s^perp
        for (int i = 0; i < n; ++i) {
            if (std::find(inside.begin(), inside.end(), i) != inside.end()) continue;
            RVec e(n, Rational(0));
            e[i] = Rational(1);
            dirs.push_back(std::move(e));
        }
        if (!dirs.empty())
            fs.constraints.push_back(
                ZeroConstraint::subspace(RVec(n, Rational(0)), dirs, 2 * (k + 1)));
        faces.push_back(std::move(fs));
    }
    return faces;
}

}  // namespace tilereg
