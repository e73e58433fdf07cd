#pragma once

#include <optional>

#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace drifting {

enum class SoftmaxAxis {
    OverColumns,  // each row sums to 1
    OverRows,     // each column sums to 1
};

// Entry (i,j) = ||a_i - b_j||, computed from differences directly.
Matrix pairwise_l2(const Matrix& a, const Matrix& b);

// Max-subtracted softmax along the given axis. Masked entries come out as
// exactly 0; a slice with no unmasked entry is an error.
Matrix masked_softmax(const Matrix& logits, SoftmaxAxis axis, const Mask* mask = nullptr);

// Single-threaded reference versions of the parallel kernels above. Kept
// for tests and benchmarks; the results must agree bit for bit.
namespace serial {
Matrix pairwise_l2(const Matrix& a, const Matrix& b);
Matrix masked_softmax(const Matrix& logits, SoftmaxAxis axis, const Mask* mask = nullptr);
}  // namespace serial

}  // namespace drifting
