#pragma once

// Dilation matrices and their lattice structure: expansion validation with
// eigenvalues taken from the exact integer characteristic polynomial, digit
// sets (coset representatives of Z^n / M Z^n enumerated exactly inside the
// fundamental parallelepiped M[0,1)^n), clustering of eigenvalue moduli into
// spectral levels r_1 > ... > r_q, and detection of rational M-invariant
// subspaces through factorization of the characteristic polynomial over Q.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <optional>

#include "tilereg/common.hpp"
#include "tilereg/intmat.hpp"
#include "tilereg/rational.hpp"

namespace tilereg {

struct DilationMatrix {
    IMat entries;
    int n = 0;
    long long det = 0;  // signed
    long long m = 0;    // |det|
    IMat adjugate;      // entries * adjugate = det * I
    std::vector<long long> charpoly;  // monic, ascending
    std::vector<std::complex<double>> eigenvalues;

    // Exact rational image of M^{-1} x (or M^{-T} x when transpose).
    RVec inverse_apply(const IVec& x, bool transpose = false) const {
        const IMat& adj = transpose ? adjT_ : adjugate;
        RVec r(n);
        for (int i = 0; i < n; ++i) {
            __int128 s = 0;
            for (int j = 0; j < n; ++j) s += (__int128)adj[i][j] * x[j];
            r[i] = Rational::from_i128(s, det);
        }
        return r;
    }

    Eigen::MatrixXd as_double() const {
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = double(entries[i][j]);
        return A;
    }

    IMat adjT_;  // adjugate of M^T
};

// Roots of a monic integer polynomial via the companion matrix.  Keeps the
// eigenvalue computation anchored to exact integer data.
inline std::vector<std::complex<double>> poly_roots(const std::vector<long long>& c) {
    int n = int(c.size()) - 1;
    if (n == 0) return {};
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) C(i, n - 1) = -double(c[i]);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) throw NoConvergence("companion eigensolve failed");
    std::vector<std::complex<double>> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

inline DilationMatrix validate_dilation(const IMat& entries) {
    std::size_t n = entries.size();
    if (n == 0) throw ValidationError("empty matrix");
    for (const auto& row : entries)
        if (row.size() != n) throw ValidationError("matrix is not square");
    DilationMatrix M;
    M.entries = entries;
    M.n = int(n);
    M.det = mat_det(entries);
    if (M.det == 0) throw SingularMatrix("dilation matrix is singular");
    M.m = M.det < 0 ? -M.det : M.det;
    M.adjugate = mat_adjugate(entries);
    M.adjT_ = mat_transpose(M.adjugate);
    M.charpoly = char_poly(entries);
    M.eigenvalues = poly_roots(M.charpoly);
    for (const auto& l : M.eigenvalues)
        if (std::abs(l) <= 1.0 + 1e-9)
            throw NotExpanding("eigenvalue modulus " + std::to_string(std::abs(l)) +
                               " not above 1");
    return M;
}

struct DigitSet {
    std::vector<IVec> digits;  // m vectors, first one is 0
    bool transpose = false;    // digits for M^T rather than M
};

// Integer points of the fundamental parallelepiped M[0,1)^n, exact membership
// via the adjugate: M^{-1}k = adj(M) k / det.
inline DigitSet canonical_digits(const DilationMatrix& M, bool transpose = false) {
    int n = M.n;
    const IMat A = transpose ? mat_transpose(M.entries) : M.entries;
    IVec lo(n, 0), hi(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (A[i][j] < 0) lo[i] += A[i][j];
            else hi[i] += A[i][j];
        }
    std::vector<IVec> found;
    IVec k(lo);
    while (true) {
        RVec x = M.inverse_apply(k, transpose);
        bool inside = true;
        for (int i = 0; i < n && inside; ++i)
            inside = x[i] >= Rational(0) && x[i] < Rational(1);
        if (inside) found.push_back(k);
        int d = n - 1;
        while (d >= 0 && k[d] == hi[d]) { k[d] = lo[d]; --d; }
        if (d < 0) break;
        ++k[d];
    }
    if ((long long)found.size() != M.m)
        throw InternalCountMismatch("found " + std::to_string(found.size()) +
                                    " digits, expected " + std::to_string(M.m));
    std::sort(found.begin(), found.end());
    auto it = std::find_if(found.begin(), found.end(), [](const IVec& v) { return is_zero(v); });
    std::rotate(found.begin(), it, it + 1);
    DigitSet D;
    D.digits = std::move(found);
    D.transpose = transpose;
    return D;
}

// True iff the differences d_i - d_j avoid M Z^n (resp. M^T Z^n before
// calling, pass the matching matrix).
inline bool digits_valid(const DilationMatrix& M, const std::vector<IVec>& digits,
                         bool transpose = false) {
    for (std::size_t i = 0; i < digits.size(); ++i)
        for (std::size_t j = i + 1; j < digits.size(); ++j) {
            RVec x = M.inverse_apply(vec_sub(digits[i], digits[j]), transpose);
            bool integral = true;
            for (const auto& c : x)
                if (!c.is_integer()) { integral = false; break; }
            if (integral) return false;
        }
    return true;
}

struct SpectralStructure {
    std::vector<double> moduli;        // r_1 > ... > r_q
    std::vector<int> multiplicities;   // algebraic, sums to n
    double clustering_tolerance = 1e-6;
};

inline SpectralStructure spectral_moduli(const DilationMatrix& M, double tol = 1e-6) {
    std::vector<double> mods;
    for (const auto& l : M.eigenvalues) mods.push_back(std::abs(l));
    std::sort(mods.begin(), mods.end(), std::greater<double>());
    SpectralStructure S;
    S.clustering_tolerance = tol;
    std::vector<std::vector<double>> clusters;
    for (double v : mods) {
        if (!clusters.empty()) {
            double rep = clusters.back().front();
            double gap = (rep - v) / rep;
            if (gap <= 1e-9) {
                clusters.back().push_back(v);
                continue;
            }
            if (gap < tol)
                throw AmbiguousClustering(
                    "eigenvalue moduli separated by relative gap " + std::to_string(gap) +
                    ", between 1e-9 and the clustering tolerance; set the tolerance explicitly");
        }
        clusters.push_back({v});
    }
    for (const auto& c : clusters) {
        double mean = 0;
        for (double v : c) mean += v;
        S.moduli.push_back(mean / double(c.size()));
        S.multiplicities.push_back(int(c.size()));
    }
    return S;
}

enum class InvariantVerdict { GenericGuaranteed, BlockTriangularizable, Unknown };

struct RationalInvariantResult {
    InvariantVerdict verdict = InvariantVerdict::Unknown;
    std::optional<IMat> basis;  // columns: unimodular change of basis, invariant block first
    int block_dim = 0;
    std::string note;
};

namespace detail {

inline std::vector<long long> divisors_signed(long long v) {
    if (v < 0) v = -v;
    std::vector<long long> d;
    for (long long i = 1; i * i <= v; ++i)
        if (v % i == 0) {
            d.push_back(i);
            d.push_back(-i);
            if (i != v / i) {
                d.push_back(v / i);
                d.push_back(-v / i);
            }
        }
    return d;
}

inline long long poly_eval_int(const std::vector<long long>& c, long long x) {
    __int128 v = 0;
    for (int i = int(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
    if (v > (__int128)0x7fffffffffffffffLL || v < -(__int128)0x7fffffffffffffffLL - 1)
        throw ArithmeticOverflow("polynomial evaluation overflow");
    return (long long)v;
}

// Proper monic integer factor of a monic integer polynomial of degree <= 4,
// when one exists.  Over Q reducibility of a monic integer polynomial equals
// reducibility over Z (Gauss).
inline std::optional<std::vector<long long>> monic_proper_factor(const std::vector<long long>& c) {
    int deg = int(c.size()) - 1;
    if (deg <= 1) return std::nullopt;
    for (long long r : divisors_signed(c[0]))
        if (poly_eval_int(c, r) == 0) return std::vector<long long>{-r, 1};
    if (deg == 2 || deg == 3) return std::nullopt;  // no linear factor -> irreducible
    if (deg == 4) {
        // (x^2 + a x + b)(x^2 + p x + q) with b q = c0, a + p = c3,
        // b + q + a p = c2, a q + b p = c1.
        for (long long b : divisors_signed(c[0])) {
            if (c[0] % b != 0) continue;
            long long q = c[0] / b;
            // a + p = c3, a p = c2 - b - q  ->  roots of t^2 - c3 t + (c2-b-q).
            long long s = c[3], prod = c[2] - b - q;
            long long disc = s * s - 4 * prod;
            if (disc < 0) continue;
            long long sq = (long long)std::llround(std::sqrt(double(disc)));
            while (sq * sq > disc) --sq;
            while ((sq + 1) * (sq + 1) <= disc) ++sq;
            if (sq * sq != disc) continue;
            if ((s + sq) % 2 != 0) continue;  // a, p both integer or neither
            for (long long a : {(s + sq) / 2, (s - sq) / 2}) {
                long long p = s - a;
                if (a * p != prod) continue;
                if (a * q + b * p == c[1]) return std::vector<long long>{b, a, 1};
            }
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

// Factors the characteristic polynomial over Q (n <= 4).  Irreducible means
// no proper rational M-invariant subspace can exist, which certifies the
// generic regularity formula for tile B-splines.  Reducible: exhibits an
// integer change of basis putting M in block upper-triangular form.
inline RationalInvariantResult rational_invariant_check(const DilationMatrix& M) {
    RationalInvariantResult R;
    if (M.n == 1) {
        R.verdict = InvariantVerdict::GenericGuaranteed;
        R.note = "dimension one: no proper subspaces";
        return R;
    }
    if (M.n > 4) {
        R.verdict = InvariantVerdict::Unknown;
        R.note = "DimensionTooLarge: characteristic-polynomial factorization limited to n <= 4";
        return R;
    }
    auto factor = detail::monic_proper_factor(M.charpoly);
    if (!factor) {
        R.verdict = InvariantVerdict::GenericGuaranteed;
        R.note = "characteristic polynomial irreducible over Q";
        return R;
    }
    // Invariant subspace from ker g(M); when g(M) = 0 fall back to the Krylov
    // span of e1, which g annihilates as well.
    IMat C = poly_at_matrix(*factor, M.entries);
    bool zero = true;
    for (const auto& row : C)
        for (long long v : row)
            if (v != 0) zero = false;
    IMat subspace_rows;  // spanning vectors of the invariant subspace
    if (!zero) {
        ColumnReduction red = column_hermite_kernel(C);
        if (red.kernel_dim == 0 || red.kernel_dim == M.n) {
            R.verdict = InvariantVerdict::Unknown;
            R.note = "reducible characteristic polynomial, kernel extraction degenerate";
            return R;
        }
        for (int c = M.n - red.kernel_dim; c < M.n; ++c) {
            IVec v(M.n);
            for (int i = 0; i < M.n; ++i) v[i] = red.U[i][c];
            subspace_rows.push_back(std::move(v));
        }
    } else {
        IVec v(M.n, 0);
        v[0] = 1;
        for (int d = 0; d + 1 < int(factor->size() - 1); ++d) {
            subspace_rows.push_back(v);
            v = mat_vec(M.entries, v);
        }
        subspace_rows.push_back(v);
    }
    // Saturate span(subspace_rows) inside Z^n: relations A with ker A = span,
    // then the saturated kernel of A via column Hermite reduction.
    RMat span;
    for (const auto& v : subspace_rows) {
        RVec r(M.n);
        for (int i = 0; i < M.n; ++i) r[i] = Rational(v[i]);
        span.push_back(std::move(r));
    }
    // Rows of `span` act as equations, so the kernel is the relation space
    // whose own integer kernel recovers the saturated lattice.
    RMat relations = rational_kernel(span, M.n);
    IMat A;
    for (const auto& w : relations) {
        long long lcm = 1;
        for (const auto& c : w) lcm = std::lcm(lcm, c.den());
        IVec row(M.n);
        for (int i = 0; i < M.n; ++i) row[i] = w[i].num() * (lcm / w[i].den());
        A.push_back(std::move(row));
    }
    ColumnReduction red = column_hermite_kernel(A);
    int k = red.kernel_dim;
    if (k == 0 || k == M.n) {
        R.verdict = InvariantVerdict::Unknown;
        R.note = "saturation failed";
        return R;
    }
    // Basis: kernel columns of U first, remaining columns complete it.
    IMat U(M.n, IVec(M.n));
    for (int i = 0; i < M.n; ++i) {
        for (int c = 0; c < k; ++c) U[i][c] = red.U[i][M.n - k + c];
        for (int c = k; c < M.n; ++c) U[i][c] = red.U[i][c - k];
    }
    // Verify: U^{-1} M U integer block upper-triangular with zero lower-left block.
    long long du = mat_det(U);
    if (du != 1 && du != -1) {
        R.verdict = InvariantVerdict::Unknown;
        R.note = "completion not unimodular";
        return R;
    }
    IMat Uinv = mat_adjugate(U);
    if (du == -1)
        for (auto& row : Uinv)
            for (auto& v : row) v = -v;
    IMat MU(M.n, IVec(M.n, 0));
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j)
            for (int t = 0; t < M.n; ++t) MU[i][j] += M.entries[i][t] * U[t][j];
    IMat B(M.n, IVec(M.n, 0));
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j)
            for (int t = 0; t < M.n; ++t) B[i][j] += Uinv[i][t] * MU[t][j];
    for (int i = k; i < M.n; ++i)
        for (int j = 0; j < k; ++j)
            if (B[i][j] != 0) {
                R.verdict = InvariantVerdict::Unknown;
                R.note = "candidate subspace not invariant";
                return R;
            }
    R.verdict = InvariantVerdict::BlockTriangularizable;
    R.basis = U;
    R.block_dim = k;
    R.note = "characteristic polynomial reducible over Q";
    return R;
}

}  // namespace tilereg
