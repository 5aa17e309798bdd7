#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilereg {

// Integer lattice vectors and square integer matrices (row-major rows).
using IVec = std::vector<long long>;
using IMat = std::vector<IVec>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// lattice
struct NotExpanding : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct InternalCountMismatch : Error { using Error::Error; };
struct AmbiguousClustering : Error { using Error::Error; };
// attractor
struct EmptyResult : Error { using Error::Error; };
struct BoundOverflow : Error { using Error::Error; };
// trigpoly
struct IrrationalConstraint : Error { using Error::Error; };
// transition
struct SupportEscape : Error { using Error::Error; };
struct NotInvariant : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
// subdivision
struct SupportCap : Error { using Error::Error; };
// maskdesign
struct ParityDegenerate : Error { using Error::Error; };
struct NoDiophantineSolution : Error { using Error::Error; };
struct BoxTooLarge : Error { using Error::Error; };
// arithmetic / io
struct ArithmeticOverflow : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

inline IVec vec_add(const IVec& a, const IVec& b) {
    IVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline IVec vec_sub(const IVec& a, const IVec& b) {
    IVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline IVec vec_neg(const IVec& a) {
    IVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline long long vec_dot(const IVec& a, const IVec& b) {
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double vec_norm2(const IVec& a) {
    double s = 0;
    for (long long v : a) s += double(v) * double(v);
    return std::sqrt(s);
}

inline bool is_zero(const IVec& a) {
    for (long long v : a)
        if (v != 0) return false;
    return true;
}

// First nonzero component positive: picks one representative of each {k, -k} pair.
inline bool lex_positive(const IVec& a) {
    for (long long v : a) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return false;
}

inline IVec mat_vec(const IMat& M, const IVec& x) {
    IVec r(M.size(), 0);
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) r[i] += M[i][j] * x[j];
    return r;
}

inline IMat mat_transpose(const IMat& M) {
    std::size_t n = M.size();
    IMat T(n, IVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) T[j][i] = M[i][j];
    return T;
}

struct IVecHash {
    std::size_t operator()(const IVec& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (long long x : v) {
            h ^= std::size_t(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace tilereg
