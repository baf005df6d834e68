#include "rmtlab/linalg.hpp"

#include <algorithm>
#include <mutex>
#include <string>

#include <lapacke.h>

#include "rmtlab/errors.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace rmtlab::linalg {

namespace {

lapack_complex_double* as_lapack(Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); }

void ensure_blas_configured() {
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
}

} // namespace

void use_single_threaded_blas() { ensure_blas_configured(); }

Svd svd(const CMatrix& a, bool with_vectors) {
    ensure_blas_configured();
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    if (m != n) throw PreconditionError("svd: matrix must be square");
    Svd out;
    std::vector<double> s(static_cast<std::size_t>(n));
    CMatrix work = a;
    CMatrix u, vt;
    lapack_int info = 0;
    if (with_vectors) {
        u.resize(n, n);
        vt.resize(n, n);
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, as_lapack(work.data()), m, s.data(),
                              as_lapack(u.data()), m, as_lapack(vt.data()), n);
        if (info > 0) {
            work = a;
            std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, n - 1)));
            info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, as_lapack(work.data()), m, s.data(),
                                  as_lapack(u.data()), m, as_lapack(vt.data()), n, superb.data());
        }
    } else {
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, as_lapack(work.data()), m, s.data(), nullptr, 1,
                              nullptr, 1);
        if (info > 0) {
            work = a;
            std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, n - 1)));
            info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, as_lapack(work.data()), m, s.data(), nullptr,
                                  1, nullptr, 1, superb.data());
        }
    }
    if (info != 0)
        throw NumericalBackendError("svd: LAPACK returned info=" + std::to_string(info) + " for " +
                                    std::to_string(n) + "x" + std::to_string(n) + " matrix");

    out.values.assign(s.rbegin(), s.rend());
    if (with_vectors) {
        out.left.resize(n, n);
        out.right.resize(n, n);
        for (lapack_int i = 0; i < n; ++i) {
            out.left.col(i) = u.col(n - 1 - i);
            out.right.col(i) = vt.row(n - 1 - i).adjoint();
        }
    }
    return out;
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
    ensure_blas_configured();
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != n) throw PreconditionError("eigenvalues: matrix must be square");
    CMatrix work = a;
    std::vector<Complex> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, as_lapack(work.data()), n,
                                          as_lapack(w.data()), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw NumericalBackendError("eigenvalues: zgeev did not converge (info=" + std::to_string(info) + ", n=" +
                                    std::to_string(n) + ")");
    return w;
}

} // namespace rmtlab::linalg
