#include "drifting/queue.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace drifting {

SampleQueue::SampleQueue(std::size_t capacity, std::size_t dim) : capacity_(capacity), dim_(dim) {
    if (capacity == 0 || dim == 0) throw std::invalid_argument("SampleQueue: capacity and dim must be positive");
}

void SampleQueue::push(const Matrix& items) {
    if (items.empty()) return;
    if (items.cols() != dim_) throw std::invalid_argument("SampleQueue::push: dimension mismatch");
    for (std::size_t i = 0; i < items.rows(); ++i) {
        if (items_.size() == capacity_) items_.pop_front();
        items_.emplace_back(items.row(i).begin(), items.row(i).end());
    }
}

Matrix SampleQueue::sample(std::size_t k, Rng& rng) const {
    if (k == 0) throw std::invalid_argument("SampleQueue::sample: k must be positive");
    if (k > items_.size()) {
        throw std::invalid_argument("SampleQueue::sample: requested " + std::to_string(k) + " items from a queue of " +
                                    std::to_string(items_.size()));
    }
    // Partial Fisher-Yates over indices.
    std::vector<std::size_t> idx(items_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Matrix out(k, dim_);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t r = t + static_cast<std::size_t>(rng.below(idx.size() - t));
        std::swap(idx[t], idx[r]);
        std::copy(items_[idx[t]].begin(), items_[idx[t]].end(), out.row(t).begin());
    }
    return out;
}

Matrix SampleQueue::contents() const {
    if (items_.empty()) return {};
    Matrix out(items_.size(), dim_);
    for (std::size_t i = 0; i < items_.size(); ++i) std::copy(items_[i].begin(), items_[i].end(), out.row(i).begin());
    return out;
}

QueueBank::QueueBank(std::size_t n_classes, std::size_t dim, std::size_t class_capacity, std::size_t unc_capacity)
    : per_class(n_classes, SampleQueue(class_capacity, dim)), unconditional(unc_capacity, dim) {}

SampleQueue& QueueBank::at(std::size_t class_id) {
    if (class_id == kUnconditional) return unconditional;
    if (class_id >= per_class.size()) throw std::out_of_range("QueueBank: class id out of range");
    return per_class[class_id];
}

const SampleQueue& QueueBank::at(std::size_t class_id) const {
    if (class_id == kUnconditional) return unconditional;
    if (class_id >= per_class.size()) throw std::out_of_range("QueueBank: class id out of range");
    return per_class[class_id];
}

void queue_push(QueueBank& bank, std::size_t class_id, const Matrix& items) { bank.at(class_id).push(items); }

Matrix queue_sample(const QueueBank& bank, std::size_t class_id, std::size_t k, Rng& rng) {
    return bank.at(class_id).sample(k, rng);
}

}  // namespace drifting
