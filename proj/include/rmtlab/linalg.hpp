#pragma once

#include <vector>

#include "rmtlab/types.hpp"

namespace rmtlab::linalg {

/// Singular value decomposition a = U diag(s) V^*, with s ascending.
struct Svd {
    std::vector<double> values;  // ascending
    CMatrix left;                // columns u_i, empty when vectors were not requested
    CMatrix right;               // columns v_i, a v_i = s_i u_i
};

/// Dense SVD through LAPACK (zgesdd, falling back to zgesvd).
/// Throws NumericalBackendError on failure.
Svd svd(const CMatrix& a, bool with_vectors);

/// Eigenvalues of a general complex matrix (zgeev).
std::vector<Complex> eigenvalues(const CMatrix& a);

/// Pin the BLAS backend to a single thread; parallelism lives at the replica level.
void use_single_threaded_blas();

} // namespace rmtlab::linalg
