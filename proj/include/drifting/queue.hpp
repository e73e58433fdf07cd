#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "drifting/matrix.hpp"
#include "drifting/rng.hpp"

namespace drifting {

// Bounded FIFO of real samples; pushing past capacity evicts the oldest.
class SampleQueue {
public:
    SampleQueue(std::size_t capacity, std::size_t dim);

    void push(const Matrix& items);
    // k distinct stored items, uniformly without replacement.
    Matrix sample(std::size_t k, Rng& rng) const;
    Matrix contents() const;

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t dim() const { return dim_; }

private:
    std::size_t capacity_;
    std::size_t dim_;
    std::deque<std::vector<double>> items_;
};

inline constexpr std::size_t kUnconditional = std::numeric_limits<std::size_t>::max();

struct QueueBank {
    std::vector<SampleQueue> per_class;
    SampleQueue unconditional;

    QueueBank(std::size_t n_classes, std::size_t dim, std::size_t class_capacity, std::size_t unc_capacity);

    SampleQueue& at(std::size_t class_id);
    const SampleQueue& at(std::size_t class_id) const;
};

void queue_push(QueueBank& bank, std::size_t class_id, const Matrix& items);
Matrix queue_sample(const QueueBank& bank, std::size_t class_id, std::size_t k, Rng& rng);

}  // namespace drifting
