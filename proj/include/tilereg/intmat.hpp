#pragma once

// Exact integer matrix kernels: determinant, adjugate, characteristic
// polynomial, saturated integer kernels via column Hermite reduction, and
// unimodular completion.  Sizes here are tiny (n <= 6), so simple exact
// algorithms are used throughout.

#include <array>
#include <optional>

#include "tilereg/common.hpp"
#include "tilereg/rational.hpp"

namespace tilereg {

namespace detail {

inline __int128 det128(std::vector<std::vector<__int128>> a) {
    // Fraction-free Bareiss elimination.
    std::size_t n = a.size();
    __int128 sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return n ? sign * a[n - 1][n - 1] : 1;
}

}  // namespace detail

inline long long mat_det(const IMat& M) {
    std::size_t n = M.size();
    std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = M[i][j];
    __int128 d = detail::det128(std::move(a));
    if (d > (__int128)0x7fffffffffffffffLL || d < -(__int128)0x7fffffffffffffffLL - 1)
        throw ArithmeticOverflow("determinant overflow");
    return (long long)d;
}

// adj(M) with M * adj(M) = det(M) * I.
inline IMat mat_adjugate(const IMat& M) {
    std::size_t n = M.size();
    IMat adj(n, IVec(n));
    if (n == 1) {
        adj[0][0] = 1;
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            IMat minor;
            minor.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                IVec row;
                row.reserve(n - 1);
                for (std::size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(M[r][c]);
                minor.push_back(std::move(row));
            }
            long long cof = mat_det(minor);
            adj[j][i] = ((i + j) % 2 == 0) ? cof : -cof;
        }
    }
    return adj;
}

// Monic characteristic polynomial, ascending coefficients c[0..n], c[n] = 1.
// Faddeev-LeVerrier with exact integer arithmetic.
inline std::vector<long long> char_poly(const IMat& M) {
    std::size_t n = M.size();
    std::vector<std::vector<__int128>> A(n, std::vector<__int128>(n, 0));
    std::vector<std::vector<__int128>> B(n, std::vector<__int128>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = M[i][j];
    std::vector<__int128> c(n + 1, 0);
    c[n] = 1;
    // B_0 = I
    for (std::size_t i = 0; i < n; ++i) B[i][i] = 1;
    std::vector<std::vector<__int128>> AB(n, std::vector<__int128>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                __int128 s = 0;
                for (std::size_t t = 0; t < n; ++t) s += A[i][t] * B[t][j];
                AB[i][j] = s;
            }
        __int128 tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += AB[i][i];
        __int128 ck = -tr / (__int128)k;  // exact division
        c[n - k] = ck;
        B = AB;
        for (std::size_t i = 0; i < n; ++i) B[i][i] += ck;
    }
    std::vector<long long> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        if (c[i] > (__int128)0x7fffffffffffffffLL || c[i] < -(__int128)0x7fffffffffffffffLL - 1)
            throw ArithmeticOverflow("characteristic polynomial overflow");
        out[i] = (long long)c[i];
    }
    return out;
}

// Evaluates a monic integer polynomial at an integer matrix.
inline IMat poly_at_matrix(const std::vector<long long>& coeffs, const IMat& M) {
    std::size_t n = M.size();
    std::vector<std::vector<__int128>> R(n, std::vector<__int128>(n, 0));
    // Horner: R = c_d I; R = M R + c_k I.
    for (std::size_t i = 0; i < n; ++i) R[i][i] = coeffs.back();
    for (int k = int(coeffs.size()) - 2; k >= 0; --k) {
        std::vector<std::vector<__int128>> T(n, std::vector<__int128>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                __int128 s = 0;
                for (std::size_t t = 0; t < n; ++t) s += (__int128)M[i][t] * R[t][j];
                T[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) T[i][i] += coeffs[k];
        R = std::move(T);
    }
    IMat out(n, IVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (R[i][j] > (__int128)0x7fffffffffffffffLL ||
                R[i][j] < -(__int128)0x7fffffffffffffffLL - 1)
                throw ArithmeticOverflow("polynomial-at-matrix overflow");
            out[i][j] = (long long)R[i][j];
        }
    return out;
}

// Column Hermite reduction: returns unimodular U with A*U in column echelon
// form, zero columns last.  kernel_dim reports how many trailing columns of U
// span {x : A x = 0}; because U is unimodular that basis is saturated.
struct ColumnReduction {
    IMat U;          // n x n unimodular (columns are the new basis)
    int kernel_dim;  // trailing columns of U spanning the integer kernel
};

inline ColumnReduction column_hermite_kernel(const IMat& A_in) {
    std::size_t rows = A_in.size();
    std::size_t n = rows ? A_in[0].size() : 0;
    std::vector<std::vector<__int128>> A(rows, std::vector<__int128>(n));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = A_in[i][j];
    std::vector<std::vector<__int128>> U(n, std::vector<__int128>(n, 0));
    for (std::size_t i = 0; i < n; ++i) U[i][i] = 1;

    auto col_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < rows; ++i) std::swap(A[i][a], A[i][b]);
        for (std::size_t i = 0; i < n; ++i) std::swap(U[i][a], U[i][b]);
    };
    auto col_axpy = [&](std::size_t dst, std::size_t src, __int128 f) {
        for (std::size_t i = 0; i < rows; ++i) A[i][dst] -= f * A[i][src];
        for (std::size_t i = 0; i < n; ++i) U[i][dst] -= f * U[i][src];
    };

    std::size_t lead = 0;
    for (std::size_t r = 0; r < rows && lead < n; ++r) {
        // Euclidean reduction across columns lead..n-1 on row r.
        while (true) {
            std::size_t p = lead;
            for (std::size_t c = lead; c < n; ++c) {
                __int128 av = A[r][c] < 0 ? -A[r][c] : A[r][c];
                __int128 ap = A[r][p] < 0 ? -A[r][p] : A[r][p];
                if (av != 0 && (ap == 0 || av < ap)) p = c;
            }
            if (A[r][p] == 0) break;  // row r is zero on the active columns
            if (p != lead) col_swap(p, lead);
            bool clean = true;
            for (std::size_t c = lead + 1; c < n; ++c) {
                if (A[r][c] == 0) continue;
                __int128 q = A[r][c] / A[r][lead];
                col_axpy(c, lead, q);
                if (A[r][c] != 0) clean = false;
            }
            if (clean) {
                ++lead;
                break;
            }
        }
    }
    ColumnReduction out;
    out.kernel_dim = int(n - lead);
    out.U.assign(n, IVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (U[i][j] > (__int128)0x7fffffffffffffffLL ||
                U[i][j] < -(__int128)0x7fffffffffffffffLL - 1)
                throw ArithmeticOverflow("unimodular transform overflow");
            out.U[i][j] = (long long)U[i][j];
        }
    return out;
}

}  // namespace tilereg
