#pragma once

// Tile B-spline masks.  The indicator of the attractor of (M, D) has mask
// coefficients 1 on the digits; the order-ell B-spline is the (ell+1)-fold
// autoconvolution, whose mask is the normalized (ell+1)-st power
// m (c0/m)^{ell+1}.  Coefficients stay exact rationals until a transition
// matrix is assembled.

#include "tilereg/lattice.hpp"
#include "tilereg/transition.hpp"

namespace tilereg {

inline Mask tile_mask(const DigitSet& D) {
    Mask m;
    m.n = int(D.digits.front().size());
    for (const auto& d : D.digits) m.coeffs[d] = Rational(1);
    return m;
}

// Coefficient convolution scaled by 1/m, so the result sums to m again.
inline Mask convolve_masks(const Mask& a, const Mask& b, long long m) {
    Mask r;
    r.n = a.n;
    for (const auto& [i, ci] : a.coeffs) {
        if (ci.is_zero()) continue;
        for (const auto& [j, cj] : b.coeffs) {
            if (cj.is_zero()) continue;
            r.coeffs[vec_add(i, j)] += ci * cj / Rational(m);
        }
    }
    return r;
}

inline Mask bspline_mask(const DigitSet& D, int ell, long long m) {
    if (ell < 0) throw ValidationError("bspline order must be >= 0");
    Mask base = tile_mask(D);
    Mask r = base;
    for (int i = 0; i < ell; ++i) r = convolve_masks(r, base, m);
    return r;
}

}  // namespace tilereg
