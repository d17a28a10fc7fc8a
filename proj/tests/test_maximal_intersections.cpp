#include <catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "markmle/maximal_intersections.hpp"
#include "test_support.hpp"

using namespace markmle;

namespace {

SupportSet support_of(const std::vector<Observation>& d) { return maximal_intersections(order_dataset(d)); }

bool same_sets(std::vector<MaximalIntersection> a, std::vector<MaximalIntersection> b) {
    if (a.size() != b.size()) return false;
    sort_regions(a);
    sort_regions(b);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_region(a[i], b[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("censored record before an event clips its segment") {
    const auto t = support_of({Observation({1.0, 2.0}, 3, std::nullopt), Observation({1.0, 3.0}, 2, 0.7)});
    REQUIRE(t.regions.size() == 1);
    CHECK(t.regions[0].is_segment());
    CHECK(t.regions[0].d == 2.0);
    CHECK(t.regions[0].r == 3.0);
    CHECK(t.regions[0].mark == 0.7);
}

TEST_CASE("single observed event") {
    const auto s = support_of({Observation({1.0}, 1, 0.5)});
    REQUIRE(s.regions.size() == 1);
    CHECK(s.regions[0].d == 0.0);
    CHECK(s.regions[0].r == 1.0);
    CHECK_FALSE(s.has_halfplane());
}

TEST_CASE("half-plane exists iff the last record is censored") {
    const auto s = support_of({Observation({1.0}, 1, 0.4), Observation({2.0}, 2, std::nullopt)});
    REQUIRE(s.regions.size() == 2);
    CHECK(s.regions[0].d == 0.0);
    CHECK(s.regions[0].r == 1.0);
    CHECK(s.has_halfplane());
    CHECK(s.regions[1].u_last == 2.0);

    const auto all_censored = support_of({Observation({1.0}, 2, std::nullopt), Observation({3.0}, 2, std::nullopt)});
    REQUIRE(all_censored.regions.size() == 1);
    CHECK(all_censored.has_halfplane());
    CHECK(all_censored.regions[0].u_last == 3.0);
}

TEST_CASE("height map counts containing sets") {
    const std::vector<ObservedSet> sets{ObservedSet::segment(1.0, 3.0, 0.7), ObservedSet::halfplane(2.0)};
    CHECK(height_at(sets, 2.5, 0.7) == 2);
    CHECK(height_at(sets, 1.5, 0.7) == 1);
    CHECK(height_at(sets, 1.0, 0.7) == 0);
    CHECK(height_at(sets, 2.5, 0.8) == 1);
}

TEST_CASE("identical records share one segment") {
    const auto s = support_of({Observation({1.0}, 1, 0.5), Observation({1.0}, 1, 0.5), Observation({2.0}, 1, 0.5)});
    CHECK(s.segment_count() == 2);
    CHECK(s.region_of_rank[0] == s.region_of_rank[1]);
}

TEST_CASE("fast path matches the brute-force oracle on small hand instances") {
    for (const auto& d : std::vector<std::vector<Observation>>{
             {Observation({1.0, 2.0}, 3, std::nullopt), Observation({1.0, 3.0}, 2, 0.7)},
             {Observation({1.0}, 1, 0.5)},
             {Observation({1.0}, 1, 0.4), Observation({2.0}, 2, std::nullopt)},
             {Observation({1.0}, 2, std::nullopt), Observation({3.0}, 2, std::nullopt)}}) {
        const auto o = order_dataset(d);
        CHECK(same_sets(maximal_intersections(o).regions, brute_force_maximal_intersections(observed_sets(o))));
    }
}

TEST_CASE("current-status data matches the brute-force oracle") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        const auto o = order_dataset(testing::continuous_dataset(rng, 100, 1, 0, 0.5));
        REQUIRE(same_sets(maximal_intersections(o).regions, brute_force_maximal_intersections(observed_sets(o))));
    }
}

TEST_CASE("every region is a local maximum of the height map") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 200; ++rep) {
        const auto o = order_dataset(testing::continuous_dataset(rng, 1 + int(rng() % 40), 1 + int(rng() % 3), 0, 0.5));
        const auto sets = observed_sets(o);
        const auto s = maximal_intersections(o);
        for (const auto& r : s.regions) {
            if (!r.is_segment()) continue;
            REQUIRE(r.d < r.r);
            const double mid = 0.5 * (r.d + r.r);
            const auto h = height_at(sets, mid, r.mark);
            REQUIRE(h > height_at(sets, std::nextafter(r.d, 0.0), r.mark));
            REQUIRE(h > height_at(sets, std::nextafter(r.r, 1e300), r.mark));
        }
    }
}

TEST_CASE("support size stays linear and the fast path scales") {
    std::mt19937_64 rng(21);
    auto time_for = [&](int n) {
        const auto o = order_dataset(testing::continuous_dataset(rng, n, 2, 50, 0.5));
        const auto start = std::chrono::steady_clock::now();
        const auto s = maximal_intersections(o);
        const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        REQUIRE(s.regions.size() <= static_cast<std::size_t>(n) + 1);
        return secs;
    };
    time_for(1000);
    const double small = time_for(20000) + 1e-4;
    const double large = time_for(200000);
    // n log n growth allows roughly a 12x increase for 10x the records.
    CHECK(large < 40.0 * small);
}
