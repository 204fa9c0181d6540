#pragma once

// Thin wrappers over LAPACKE/CBLAS symmetric eigensolvers. Dense matrices
// are stored full and symmetric, so row/column major never matters on
// input; eigenvector outputs are documented per call.

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qmc {

struct SymEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major d x d; column k pairs with values[k]
};

/// Full symmetric eigendecomposition (divide and conquer).
inline SymEigen sym_eigen(std::vector<double> a, int d) {
    if (int64_t(a.size()) != int64_t(d) * d)
        throw std::invalid_argument("sym_eigen: size mismatch");
    SymEigen out;
    out.values.assign(d, 0.0);
    lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'U', d, a.data(), d,
                                     out.values.data());
    if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    out.vectors = std::move(a);
    return out;
}

struct TopEigen {
    double value;
    std::vector<double> vector;
};

/// Largest eigenvalue and its eigenvector (MRRR, index range).
inline TopEigen sym_eigen_largest(std::vector<double> a, int d) {
    if (int64_t(a.size()) != int64_t(d) * d)
        throw std::invalid_argument("sym_eigen_largest: size mismatch");
    std::vector<double> w(d), z(d);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', d, a.data(), d,
                                     0.0, 0.0, d, d, 0.0, &found, w.data(), z.data(), 1,
                                     isuppz.data());
    if (info != 0 || found != 1)
        throw std::runtime_error("dsyevr failed, info=" + std::to_string(info));
    return {w[0], std::move(z)};
}

/// Reusable buffers for the solver's inner loop: one eigendecomposition per
/// iteration with no per-call allocation.
class SymEigenWorkspace {
  public:
    explicit SymEigenWorkspace(int d) : d_(d), values_(d), vectors_(std::size_t(d) * d) {
        double wq = 0.0;
        lapack_int iwq = 0;
        lapack_int info = LAPACKE_dsyevd_work(LAPACK_COL_MAJOR, 'V', 'L', d,
                                              vectors_.data(), d, values_.data(), &wq,
                                              -1, &iwq, -1);
        if (info != 0) throw std::runtime_error("dsyevd workspace query failed");
        work_.assign(std::size_t(wq) + 1, 0.0);
        iwork_.assign(std::size_t(iwq) + 1, 0);
    }

    /// Eigenvalues of a (ascending); vectors_ holds eigenvectors contiguously
    /// per column k at [k*d, (k+1)*d).
    void decompose(const std::vector<double>& a) {
        vectors_ = a;
        lapack_int info = LAPACKE_dsyevd_work(
            LAPACK_COL_MAJOR, 'V', 'L', d_, vectors_.data(), d_, values_.data(),
            work_.data(), lapack_int(work_.size()), iwork_.data(),
            lapack_int(iwork_.size()));
        if (info != 0)
            throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    }

    /// Values only (no vectors); returns the smallest eigenvalue.
    double min_eigenvalue(const std::vector<double>& a) {
        vectors_ = a;
        lapack_int info = LAPACKE_dsyevd_work(
            LAPACK_COL_MAJOR, 'N', 'L', d_, vectors_.data(), d_, values_.data(),
            work_.data(), lapack_int(work_.size()), iwork_.data(),
            lapack_int(iwork_.size()));
        if (info != 0)
            throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
        return values_.front();
    }

    /// Projects the symmetric matrix onto the PSD cone; returns the most
    /// negative eigenvalue seen (0 if already PSD).
    double psd_project(std::vector<double>& a) {
        decompose(a);
        const double min_eig = std::min(values_.front(), 0.0);
        int first_pos = 0;
        while (first_pos < d_ && values_[first_pos] <= 0.0) ++first_pos;
        const int npos = d_ - first_pos;
        std::fill(a.begin(), a.end(), 0.0);
        if (npos > 0) {
            for (int k = first_pos; k < d_; ++k) {
                const double s = std::sqrt(values_[k]);
                double* col = vectors_.data() + std::size_t(k) * d_;
                for (int p = 0; p < d_; ++p) col[p] *= s;
            }
            // column-major lower = row-major upper; mirror into the lower half
            cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, d_, npos, 1.0,
                        vectors_.data() + std::size_t(first_pos) * d_, d_, 0.0, a.data(),
                        d_);
            for (int r = 0; r < d_; ++r)
                for (int c = r + 1; c < d_; ++c)
                    a[std::size_t(c) * d_ + r] = a[std::size_t(r) * d_ + c];
        }
        return min_eig;
    }

    const std::vector<double>& values() const { return values_; }
    /// column k = eigenvector k, contiguous
    const std::vector<double>& vectors() const { return vectors_; }

  private:
    int d_;
    std::vector<double> values_;
    std::vector<double> vectors_;
    std::vector<double> work_;
    std::vector<lapack_int> iwork_;
};

/// One-shot PSD projection (testing convenience; the solver uses the
/// workspace form).
inline double psd_project(std::vector<double>& a, int d) {
    SymEigenWorkspace ws(d);
    return ws.psd_project(a);
}

/// Most negative eigenvalue of a symmetric matrix (values only).
inline double min_eigenvalue(std::vector<double> a, int d) {
    std::vector<double> w(d);
    lapack_int info =
        LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', d, a.data(), d, w.data());
    if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    return w.empty() ? 0.0 : w[0];
}

}  // namespace qmc
