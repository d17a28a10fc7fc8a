#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace markmle {

class DataError : public std::runtime_error {
public:
    enum class Kind { InvalidObservation, MixedK, Empty };

    DataError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// A real number or +infinity. Right endpoints of x-intervals are +infinity
// exactly when the event was not observed by the last inspection time.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
    static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

    bool is_infinite() const noexcept { return infinite_; }
    // Precondition: !is_infinite().
    double value() const;

    bool greater_equal(double x) const noexcept { return infinite_ || value_ >= x; }
    bool operator==(const ExtendedReal& o) const noexcept {
        return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
    }

private:
    ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

/// One subject: k strictly increasing positive inspection times, the index j
/// (1-based, in 1..k+1) of the interval (T_{j-1}, T_j] containing the failure
/// time, and the mark, which is present iff j <= k.
class Observation {
public:
    Observation(std::vector<double> times, int delta_index, std::optional<double> mark);

    std::span<const double> times() const noexcept { return times_; }
    std::size_t k() const noexcept { return times_.size(); }
    int delta_index() const noexcept { return delta_index_; }
    const std::optional<double>& mark() const noexcept { return mark_; }
    bool event_observed() const noexcept { return static_cast<std::size_t>(delta_index_) <= times_.size(); }

    bool operator==(const Observation&) const = default;

private:
    std::vector<double> times_;
    int delta_index_;
    std::optional<double> mark_;
};

struct DerivedEndpoints {
    double left;         // L = T_{j-1}, T_0 = 0
    ExtendedReal right;  // R = T_j, T_{k+1} = +inf
    double u;            // R if the event was observed, else T_k
    int delta_plus;      // 1 iff the event was observed
};

DerivedEndpoints derive_endpoints(const Observation& obs);

struct OrderedRecord {
    Observation observation;
    DerivedEndpoints endpoints;
    std::size_t original_index;
};

/// Records sorted by U; within ties observed events precede censored records,
/// and remaining ties keep the original dataset order.
class OrderedDataset {
public:
    explicit OrderedDataset(std::vector<OrderedRecord> records, std::size_t k)
        : records_(std::move(records)), k_(k) {}

    std::size_t size() const noexcept { return records_.size(); }
    std::size_t k() const noexcept { return k_; }
    const OrderedRecord& operator[](std::size_t rank) const { return records_[rank]; }
    std::span<const OrderedRecord> records() const noexcept { return records_; }
    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

    // permutation()[rank] is the original index of the record at that rank.
    std::vector<std::size_t> permutation() const;

private:
    std::vector<OrderedRecord> records_;
    std::size_t k_;
};

OrderedDataset order_dataset(std::span<const Observation> data);

}  // namespace markmle
