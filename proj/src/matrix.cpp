#include "amil/matrix.hpp"

#include <cassert>

namespace amil {

namespace raw {

void add_matmul(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void add_matmul_at(const double* a, std::size_t k, std::size_t m, const double* b, std::size_t n,
                   double* c) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* ap = a + p * m;
        const double* bp = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double api = ap[i];
            double* ci = c + i * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
}

void add_matmul_bt(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                   double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

} // namespace raw

void add_matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols() == b.rows() && a.rows() == c.rows() && b.cols() == c.cols());
    raw::add_matmul(a.data(), a.rows(), a.cols(), b.data(), b.cols(), c.data());
}

void add_matmul_at(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows() == b.rows() && a.cols() == c.rows() && b.cols() == c.cols());
    raw::add_matmul_at(a.data(), a.rows(), a.cols(), b.data(), b.cols(), c.data());
}

void add_matmul_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols() == b.cols() && a.rows() == c.rows() && b.rows() == c.cols());
    raw::add_matmul_bt(a.data(), a.rows(), a.cols(), b.data(), b.rows(), c.data());
}

} // namespace amil
