#include "markmle/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace markmle {

double ExtendedReal::value() const {
    if (infinite_) throw std::logic_error("ExtendedReal::value() on +infinity");
    return value_;
}

Observation::Observation(std::vector<double> times, int delta_index, std::optional<double> mark)
    : times_(std::move(times)), delta_index_(delta_index), mark_(mark) {
    using K = DataError::Kind;
    if (times_.empty()) throw DataError(K::InvalidObservation, "observation has no inspection times");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || times_[i] <= 0.0)
            throw DataError(K::InvalidObservation, "inspection times must be finite and strictly positive");
        if (i > 0 && !(times_[i - 1] < times_[i]))
            throw DataError(K::InvalidObservation, "inspection times must be strictly increasing");
    }
    const auto k = static_cast<int>(times_.size());
    if (delta_index_ < 1 || delta_index_ > k + 1)
        throw DataError(K::InvalidObservation, "interval index must lie in 1..k+1");
    if (event_observed() != mark_.has_value())
        throw DataError(K::InvalidObservation, "mark must be present iff the event was observed");
    if (mark_ && !std::isfinite(*mark_)) throw DataError(K::InvalidObservation, "mark must be finite");
}

DerivedEndpoints derive_endpoints(const Observation& obs) {
    const auto t = obs.times();
    const auto j = static_cast<std::size_t>(obs.delta_index());
    const double left = j == 1 ? 0.0 : t[j - 2];
    if (obs.event_observed()) {
        const double r = t[j - 1];
        return {left, ExtendedReal::finite(r), r, 1};
    }
    return {left, ExtendedReal::infinity(), left, 0};
}

std::vector<std::size_t> OrderedDataset::permutation() const {
    std::vector<std::size_t> out(records_.size());
    std::transform(records_.begin(), records_.end(), out.begin(),
                   [](const OrderedRecord& r) { return r.original_index; });
    return out;
}

OrderedDataset order_dataset(std::span<const Observation> data) {
    if (data.empty()) throw DataError(DataError::Kind::Empty, "dataset is empty");
    const std::size_t k = data.front().k();
    std::vector<OrderedRecord> records;
    records.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].k() != k)
            throw DataError(DataError::Kind::MixedK, "record " + std::to_string(i) + " has " +
                                                         std::to_string(data[i].k()) + " inspection times, expected " +
                                                         std::to_string(k));
        records.push_back({data[i], derive_endpoints(data[i]), i});
    }
    std::sort(records.begin(), records.end(), [](const OrderedRecord& a, const OrderedRecord& b) {
        if (a.endpoints.u != b.endpoints.u) return a.endpoints.u < b.endpoints.u;
        if (a.endpoints.delta_plus != b.endpoints.delta_plus) return a.endpoints.delta_plus > b.endpoints.delta_plus;
        return a.original_index < b.original_index;
    });
    return OrderedDataset(std::move(records), k);
}

}  // namespace markmle
