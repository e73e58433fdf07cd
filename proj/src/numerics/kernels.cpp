#include <stdexcept>

#include "drifting/numerics.hpp"
#include "drifting/parallel.hpp"
#include "kernel_detail.hpp"

namespace drifting {

Matrix pairwise_l2(const Matrix& a, const Matrix& b) {
    detail::check_pairwise(a, b);
    const std::size_t n = a.rows(), m = b.rows(), d = a.cols();
    Matrix out(n, m);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* po = out.values().data();
    const long long rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n * m > 4096)
    for (long long r = 0; r < rows; ++r) {
        const std::size_t i = static_cast<std::size_t>(r);
        for (std::size_t j = 0; j < m; ++j) po[i * m + j] = detail::l2_row(pa + i * d, pb + j * d, d);
    }
    return out;
}

Matrix masked_softmax(const Matrix& logits, SoftmaxAxis axis, const Mask* mask) {
    detail::check_softmax(logits, mask);
    const std::size_t rows = logits.rows(), cols = logits.cols();
    Matrix out(rows, cols);
    const double* in = logits.values().data();
    double* po = out.values().data();
    const unsigned char* mk = mask ? mask->bits.data() : nullptr;

    const bool over_cols = axis == SoftmaxAxis::OverColumns;
    const long long slices = static_cast<long long>(over_cols ? rows : cols);
    const std::size_t len = over_cols ? cols : rows;
    const std::size_t stride = over_cols ? 1 : cols;
    bool degenerate = false;
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (slices * static_cast<long long>(len) > 4096) reduction(|| : degenerate)
    for (long long s = 0; s < slices; ++s) {
        const std::size_t off = over_cols ? static_cast<std::size_t>(s) * cols : static_cast<std::size_t>(s);
        if (!detail::softmax_slice(in + off, po + off, mk ? mk + off : nullptr, len, stride)) degenerate = true;
    }
    if (degenerate) throw std::invalid_argument("masked_softmax: fully masked slice");
    return out;
}

}  // namespace drifting
