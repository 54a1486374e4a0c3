#include "eccw/tensor.hpp"

#ifdef ECCW_USE_CBLAS
#include <cblas.h>
#endif

namespace eccw::detail {

#ifdef ECCW_USE_CBLAS

bool gemm_blas_available() { return true; }

void gemm_blas(bool ta, bool tb, int m, int n, int k, const float* a, int lda, const float* b,
               int ldb, float* c, int ldc, bool accumulate) {
    // one BLAS thread: runs are bit reproducible and we never oversubscribe
    static const bool threads_pinned = [] {
        openblas_set_num_threads(1);
        return true;
    }();
    (void)threads_pinned;
    cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m, n,
                k, 1.0f, a, lda, b, ldb, accumulate ? 1.0f : 0.0f, c, ldc);
}

#else

bool gemm_blas_available() { return false; }

void gemm_blas(bool, bool, int, int, int, const float*, int, const float*, int, float*, int, bool) {
    throw std::logic_error("BLAS backend not compiled in");
}

#endif

} // namespace eccw::detail
