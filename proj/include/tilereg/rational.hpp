#pragma once

// Exact rational arithmetic on 64-bit numerator/denominator with overflow
// detection through 128-bit intermediates.  Everything lattice-exact in this
// library (coset tests, digit enumeration, mask coefficients, moment solves,
// constraint frequencies) runs on these.

#include <numeric>
#include <optional>
#include <string>

#include "tilereg/common.hpp"

namespace tilereg {

class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) { assign(n, d); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    static Rational from_i128(__int128 n, __int128 d) {
        if (d == 0) throw ArithmeticOverflow("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (!fits(n) || !fits(d)) throw ArithmeticOverflow("rational overflow");
        Rational r;
        r.num_ = (long long)n;
        r.den_ = (long long)d;
        return r;
    }

    Rational operator+(const Rational& o) const {
        return from_i128((__int128)num_ * o.den_ + (__int128)o.num_ * den_,
                         (__int128)den_ * o.den_);
    }
    Rational operator-(const Rational& o) const {
        return from_i128((__int128)num_ * o.den_ - (__int128)o.num_ * den_,
                         (__int128)den_ * o.den_);
    }
    Rational operator*(const Rational& o) const {
        return from_i128((__int128)num_ * o.num_, (__int128)den_ * o.den_);
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw ArithmeticOverflow("rational division by zero");
        return from_i128((__int128)num_ * o.den_, (__int128)den_ * o.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return (__int128)num_ * o.den_ < (__int128)o.num_ * den_;
    }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    double to_double() const { return double(num_) / double(den_); }

    // Representative in [0,1): used for periodic phase evaluation.
    Rational mod1() const {
        long long r = num_ % den_;
        if (r < 0) r += den_;
        Rational q;
        q.num_ = r;
        q.den_ = den_;
        // r and den_ need not be coprime after reduction of the shift; fix up.
        long long g = std::gcd(r, den_);
        if (g > 1) { q.num_ /= g; q.den_ /= g; }
        return q;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    void assign(long long n, long long d) {
        if (d == 0) throw ArithmeticOverflow("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num_ = n;
        den_ = d;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }
    static bool fits(__int128 v) {
        return v >= -(__int128)0x7fffffffffffffffLL - 1 && v <= (__int128)0x7fffffffffffffffLL;
    }

    long long num_;
    long long den_;
};

using RVec = std::vector<Rational>;
using RMat = std::vector<RVec>;

inline Rational rvec_dot(const RVec& a, const RVec& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rational rvec_dot(const IVec& a, const RVec& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
    return s;
}

// Reduced row echelon form in place; returns pivot column per row rank order.
inline std::vector<int> rref(RMat& A) {
    std::vector<int> pivots;
    if (A.empty()) return pivots;
    std::size_t rows = A.size(), cols = A[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && A[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(A[p], A[r]);
        Rational inv = Rational(1) / A[r][c];
        for (std::size_t j = c; j < cols; ++j) A[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c].is_zero()) continue;
            Rational f = A[i][c];
            for (std::size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivots.push_back(int(c));
        ++r;
    }
    return pivots;
}

inline int rational_rank(RMat A) { return int(rref(A).size()); }

// Kernel basis of A (rows = equations) over the rationals.
inline RMat rational_kernel(RMat A, std::size_t cols) {
    std::vector<int> pivots = rref(A);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    RMat basis;
    for (std::size_t c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        RVec v(cols, Rational(0));
        v[c] = Rational(1);
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -A[r][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solves A x = b exactly; empty optional when inconsistent.  A is rows x cols.
inline std::optional<RVec> rational_solve(RMat A, RVec b) {
    std::size_t rows = A.size();
    std::size_t cols = rows ? A[0].size() : 0;
    for (std::size_t i = 0; i < rows; ++i) A[i].push_back(b[i]);
    std::vector<int> pivots = rref(A);
    for (std::size_t r = 0; r < rows; ++r) {
        bool all0 = true;
        for (std::size_t c = 0; c < cols; ++c)
            if (!A[r][c].is_zero()) { all0 = false; break; }
        if (all0 && !A[r][cols].is_zero()) return std::nullopt;
    }
    RVec x(cols, Rational(0));
    for (std::size_t r = 0; r < pivots.size(); ++r)
        if (pivots[r] < int(cols)) x[pivots[r]] = A[r][cols];
    return x;
}

}  // namespace tilereg
