#include <stdexcept>

#include "drifting/numerics.hpp"
#include "kernel_detail.hpp"

namespace drifting::serial {

Matrix pairwise_l2(const Matrix& a, const Matrix& b) {
    detail::check_pairwise(a, b);
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out(i, j) = detail::l2_row(a.row(i).data(), b.row(j).data(), a.cols());
    return out;
}

Matrix masked_softmax(const Matrix& logits, SoftmaxAxis axis, const Mask* mask) {
    detail::check_softmax(logits, mask);
    const std::size_t rows = logits.rows(), cols = logits.cols();
    Matrix out(rows, cols);
    const unsigned char* mk = mask ? mask->bits.data() : nullptr;
    if (axis == SoftmaxAxis::OverColumns) {
        for (std::size_t i = 0; i < rows; ++i) {
            const std::size_t off = i * cols;
            if (!detail::softmax_slice(logits.values().data() + off, out.values().data() + off,
                                       mk ? mk + off : nullptr, cols, 1)) {
                throw std::invalid_argument("masked_softmax: fully masked slice");
            }
        }
    } else {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!detail::softmax_slice(logits.values().data() + j, out.values().data() + j,
                                       mk ? mk + j : nullptr, rows, cols)) {
                throw std::invalid_argument("masked_softmax: fully masked slice");
            }
        }
    }
    return out;
}

}  // namespace drifting::serial
