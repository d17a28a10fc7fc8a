#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "markmle/observation.hpp"

namespace markmle {

/// Observed set of one record: the segment (left, right] x {mark} when the
/// event was observed, the half-plane (left, inf) x R otherwise.
struct ObservedSet {
    enum class Kind { Segment, HalfPlane };
    Kind kind;
    double left;
    double right;  // segment only
    double mark;   // segment only

    static ObservedSet segment(double l, double r, double z) { return {Kind::Segment, l, r, z}; }
    static ObservedSet halfplane(double t) { return {Kind::HalfPlane, t, 0.0, 0.0}; }
};

std::vector<ObservedSet> observed_sets(const OrderedDataset& ordered);

struct MaximalIntersection {
    enum class Kind { Segment, HalfPlane };
    Kind kind;
    double d;       // segment: exclusive left endpoint
    double r;       // segment: inclusive right endpoint
    double mark;    // segment only
    double u_last;  // half-plane only: (u_last, inf) x R
    std::size_t source_rank;

    static MaximalIntersection segment(double d, double r, double mark, std::size_t rank) {
        return {Kind::Segment, d, r, mark, 0.0, rank};
    }
    static MaximalIntersection halfplane(double u_last, std::size_t rank) {
        return {Kind::HalfPlane, 0.0, 0.0, 0.0, u_last, rank};
    }
    bool is_segment() const noexcept { return kind == Kind::Segment; }
};

// Equality of the regions, ignoring which record generated them.
bool same_region(const MaximalIntersection& a, const MaximalIntersection& b);

// Sorts half-planes after segments, segments by (r, d, mark).
void sort_regions(std::vector<MaximalIntersection>& regions);

struct SupportSet {
    // Segments in rank order of their generating record, then the half-plane if any.
    std::vector<MaximalIntersection> regions;
    // For each rank with an observed event, the index of its segment in `regions`.
    std::vector<std::optional<std::size_t>> region_of_rank;

    bool has_halfplane() const noexcept { return !regions.empty() && !regions.back().is_segment(); }
    std::size_t segment_count() const noexcept { return regions.size() - (has_halfplane() ? 1 : 0); }
};

/// Maximal intersections in one pass over the U-ordered records. The left
/// endpoint of each segment is the larger of its own L and the running
/// maximum of L over censored records ranked before it. Records with identical
/// (L, R, mark) share one segment.
SupportSet maximal_intersections(const OrderedDataset& ordered);

std::size_t height_at(std::span<const ObservedSet> sets, double x, double y);

/// Test oracle: local maximum regions of the height map, found by sweeping the
/// endpoint-induced cells of every horizontal line that carries a segment.
/// Assumes observed sets are not tied at endpoints on a common line.
std::vector<MaximalIntersection> brute_force_maximal_intersections(std::span<const ObservedSet> sets);

}  // namespace markmle
