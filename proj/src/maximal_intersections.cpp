#include "markmle/maximal_intersections.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

namespace markmle {

std::vector<ObservedSet> observed_sets(const OrderedDataset& ordered) {
    std::vector<ObservedSet> sets;
    sets.reserve(ordered.size());
    for (const auto& rec : ordered) {
        const auto& ep = rec.endpoints;
        if (ep.delta_plus == 1)
            sets.push_back(ObservedSet::segment(ep.left, ep.right.value(), *rec.observation.mark()));
        else
            sets.push_back(ObservedSet::halfplane(ep.left));
    }
    return sets;
}

bool same_region(const MaximalIntersection& a, const MaximalIntersection& b) {
    if (a.kind != b.kind) return false;
    if (a.is_segment()) return a.d == b.d && a.r == b.r && a.mark == b.mark;
    return a.u_last == b.u_last;
}

void sort_regions(std::vector<MaximalIntersection>& regions) {
    std::sort(regions.begin(), regions.end(), [](const MaximalIntersection& a, const MaximalIntersection& b) {
        if (a.kind != b.kind) return a.is_segment();
        if (!a.is_segment()) return a.u_last < b.u_last;
        return std::tie(a.r, a.d, a.mark) < std::tie(b.r, b.d, b.mark);
    });
}

SupportSet maximal_intersections(const OrderedDataset& ordered) {
    SupportSet out;
    out.region_of_rank.assign(ordered.size(), std::nullopt);
    std::map<std::tuple<double, double, double>, std::size_t> seen;
    double censored_left_max = -std::numeric_limits<double>::infinity();
    for (std::size_t rank = 0; rank < ordered.size(); ++rank) {
        const auto& ep = ordered[rank].endpoints;
        if (ep.delta_plus == 0) {
            censored_left_max = std::max(censored_left_max, ep.left);
            continue;
        }
        const double r = ep.right.value();
        const double z = *ordered[rank].observation.mark();
        auto [it, inserted] = seen.try_emplace({ep.left, r, z}, out.regions.size());
        if (inserted) out.regions.push_back(MaximalIntersection::segment(std::max(censored_left_max, ep.left), r, z, rank));
        out.region_of_rank[rank] = it->second;
    }
    const std::size_t last = ordered.size() - 1;
    if (ordered[last].endpoints.delta_plus == 0)
        out.regions.push_back(MaximalIntersection::halfplane(ordered[last].endpoints.u, last));
    return out;
}

std::size_t height_at(std::span<const ObservedSet> sets, double x, double y) {
    return static_cast<std::size_t>(std::count_if(sets.begin(), sets.end(), [&](const ObservedSet& s) {
        if (s.kind == ObservedSet::Kind::HalfPlane) return s.left < x;
        return s.mark == y && s.left < x && x <= s.right;
    }));
}

std::vector<MaximalIntersection> brute_force_maximal_intersections(std::span<const ObservedSet> sets) {
    std::vector<double> halfplane_left;
    std::map<double, std::vector<std::size_t>> lines;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].kind == ObservedSet::Kind::HalfPlane)
            halfplane_left.push_back(sets[i].left);
        else
            lines[sets[i].mark].push_back(i);
    }
    std::sort(halfplane_left.begin(), halfplane_left.end());

    std::vector<MaximalIntersection> out;
    double segment_right_max = -std::numeric_limits<double>::infinity();

    struct Boundary {
        double value;
        int delta_height;
        int delta_cover;
    };
    for (const auto& [mark, members] : lines) {
        std::vector<Boundary> bounds;
        bounds.reserve(2 * members.size() + halfplane_left.size());
        for (double t : halfplane_left) bounds.push_back({t, +1, 0});
        for (std::size_t i : members) {
            bounds.push_back({sets[i].left, +1, +1});
            bounds.push_back({sets[i].right, -1, -1});
            segment_right_max = std::max(segment_right_max, sets[i].right);
        }
        std::sort(bounds.begin(), bounds.end(), [](const Boundary& a, const Boundary& b) { return a.value < b.value; });

        // Cells (v_p, v_{p+1}] between distinct boundary values, plus the
        // unbounded cells on either side.
        struct Cell {
            double lo, hi;
            long height, cover;
        };
        std::vector<Cell> cells;
        long height = 0, cover = 0;
        for (std::size_t p = 0; p < bounds.size();) {
            const double v = bounds[p].value;
            for (; p < bounds.size() && bounds[p].value == v; ++p) {
                height += bounds[p].delta_height;
                cover += bounds[p].delta_cover;
            }
            const double next = p < bounds.size() ? bounds[p].value : std::numeric_limits<double>::infinity();
            cells.push_back({v, next, height, cover});
        }
        for (std::size_t a = 0; a < cells.size();) {
            std::size_t b = a;
            bool covered = true;
            while (b < cells.size() && cells[b].height == cells[a].height) {
                covered = covered && cells[b].cover > 0;
                ++b;
            }
            const long before = a == 0 ? 0 : cells[a - 1].height;
            const long after = b == cells.size() ? -1 : cells[b].height;
            if (covered && cells[a].height > before && cells[a].height > after) {
                const double lo = cells[a].lo, hi = cells[b - 1].hi;
                std::size_t source = members.front();
                for (std::size_t i : members)
                    if (sets[i].right == hi) {
                        source = i;
                        break;
                    }
                out.push_back(MaximalIntersection::segment(lo, hi, mark, source));
            }
            a = b;
        }
    }
    if (!halfplane_left.empty() && !(segment_right_max > halfplane_left.back())) {
        std::size_t source = 0;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (sets[i].kind == ObservedSet::Kind::HalfPlane && sets[i].left == halfplane_left.back()) source = i;
        out.push_back(MaximalIntersection::halfplane(halfplane_left.back(), source));
    }
    return out;
}

}  // namespace markmle
