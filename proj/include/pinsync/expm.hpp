#pragma once

#include <cmath>

#include "pinsync/matrix.hpp"

namespace pinsync {

namespace detail {

/// Degree-13 diagonal Padé approximant to exp(X), valid for small ‖X‖.
inline DenseMatrix expm_pade13(const DenseMatrix& x) {
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const std::size_t n = x.rows();
    const DenseMatrix eye = DenseMatrix::identity(n);
    const DenseMatrix x2 = x * x;
    const DenseMatrix x4 = x2 * x2;
    const DenseMatrix x6 = x4 * x2;
    const DenseMatrix u =
        x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 +
             b[1] * eye);
    const DenseMatrix v =
        x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 +
        b[0] * eye;
    return lu_solve(v - u, v + u);
}

} // namespace detail

/**
 * @brief Matrix exponential exp(t*M) by scaling and squaring with a
 *        degree-13 Padé approximant. The argument is scaled by powers of
 *        two until its 1-norm is at most 0.5.
 */
inline DenseMatrix mat_exp(const DenseMatrix& m, double t = 1.0) {
    if (!m.square())
        throw dimension_error("mat_exp requires a square matrix");
    if (!std::isfinite(t))
        throw validation_error("mat_exp requires a finite time argument");
    const std::size_t n = m.rows();
    if (t == 0.0) return DenseMatrix::identity(n);

    DenseMatrix x = t * m;
    const double nrm = x.one_norm();
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
        x *= std::ldexp(1.0, -squarings);
    }
    DenseMatrix f = detail::expm_pade13(x);
    for (int s = 0; s < squarings; ++s) {
        f = f * f;
        if (!f.all_finite())
            throw numeric_overflow("mat_exp result exceeds representable range");
    }
    if (!f.all_finite())
        throw numeric_overflow("mat_exp result exceeds representable range");
    return f;
}

} // namespace pinsync
