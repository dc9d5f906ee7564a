#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cclab/event_queue.hpp"
#include "cclab/rng.hpp"
#include "cclab/segments.hpp"
#include "cclab/sim_time.hpp"

using namespace cclab;
using namespace cclab::literals;

TEST_CASE("SimTime arithmetic is checked") {
    CHECK((1_ms + 500_us).us() == 1500);
    CHECK((2_s - 1_s).us() == 1'000'000);
    CHECK(SimTime::from_seconds(180).us() == 180'000'000);
    CHECK((10_ms * 3).us() == 30'000);
    CHECK_THROWS_AS(1_ms - 2_ms, std::overflow_error);
    CHECK_THROWS_AS(SimTime::max() + 1_us, std::overflow_error);
    CHECK_THROWS_AS(SimTime::max() * 2, std::overflow_error);
    CHECK(1_ms < 2_ms);
}

TEST_CASE("schedule at the current time fires first") {
    EventQueue q;
    std::vector<int> order;
    q.schedule(5_ms, [&] { order.push_back(2); });
    q.schedule(SimTime{}, [&] { order.push_back(1); });
    q.run();
    CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("equal timestamps fire in insertion order") {
    EventQueue q;
    std::vector<int> order;
    for (int i = 0; i < 10; ++i) q.schedule(3_ms, [&, i] { order.push_back(i); });
    q.run();
    CHECK(order == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("scheduling in the past is rejected") {
    EventQueue q;
    q.schedule(10_ms, [] {});
    q.run();
    CHECK(q.now() == 10_ms);
    CHECK_THROWS_AS(q.schedule(5_ms, [] {}), std::logic_error);
}

TEST_CASE("run_until") {
    SUBCASE("empty queue advances the clock") {
        EventQueue q;
        CHECK(q.run_until(180_s) == 0);
        CHECK(q.now() == 180_s);
    }
    SUBCASE("boundary is inclusive") {
        EventQueue q;
        q.schedule(1_ms, [] {});
        q.schedule(1_ms, [] {});
        q.schedule(2_ms, [] {});
        CHECK(q.run_until(1_ms) == 2);
        CHECK(q.size() == 1);
    }
    SUBCASE("cancelled events are not processed") {
        EventQueue q;
        bool fired = false;
        auto h = q.schedule(1_ms, [&] { fired = true; });
        q.schedule(1_ms, [] {});
        CHECK(q.cancel(h));
        CHECK_FALSE(q.cancel(h));
        CHECK(q.run_until(1_ms) == 1);
        CHECK_FALSE(fired);
    }
}

TEST_CASE("handlers may schedule and cancel") {
    EventQueue q;
    int hits = 0;
    EventHandle later;
    q.schedule(1_ms, [&] {
        ++hits;
        later = q.schedule_in(1_ms, [&] { hits += 100; });
        q.schedule_in(SimTime{}, [&] { q.cancel(later); });
    });
    q.run();
    CHECK(hits == 1);
}

namespace {

std::uint64_t trace_of(std::uint64_t seed, std::vector<SimTime>* seen = nullptr) {
    EventQueue q;
    std::uint64_t h = 1469598103934665603ULL;
    q.set_observer([&](SimTime t, std::uint64_t seq) {
        h = (h ^ static_cast<std::uint64_t>(t.us())) * 1099511628211ULL;
        h = (h ^ seq) * 1099511628211ULL;
        if (seen) seen->push_back(q.now());
    });
    Rng rng(seed);
    std::vector<EventHandle> handles;
    for (int i = 0; i < 2000; ++i) {
        const auto at = SimTime::from_us(static_cast<SimTime::rep>(rng.next_u64() % 100'000));
        handles.push_back(q.schedule(at, [&q, &rng] {
            if (rng.uniform01() < 0.3) q.schedule_in(SimTime::from_us(rng.next_u64() % 50), [] {});
        }));
    }
    for (std::size_t i = 0; i < handles.size(); i += 7) q.cancel(handles[i]);
    q.run();
    return h;
}

}  // namespace

TEST_CASE("identical insertions replay an identical trace") {
    CHECK(trace_of(42) == trace_of(42));
    CHECK(trace_of(42) != trace_of(43));
}

TEST_CASE("the clock never runs backwards") {
    std::vector<SimTime> seen;
    trace_of(7, &seen);
    REQUIRE(!seen.empty());
    CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("Segments fixed point") {
    CHECK(Segments{10}.to_string() == "10");
    CHECK((Segments{10} + Segments{10}.reciprocal()).to_string() == "10.1");
    CHECK(Segments::ratio(1, 3).raw() == 333'333'333'333);
    CHECK(Segments::ratio(2, 3).raw() == 666'666'666'667);
    CHECK(Segments{20}.scaled(Segments::from_double(0.5)) == Segments{10});
    CHECK(Segments{100}.scaled(Segments::from_double(0.8)) == Segments{80});
    CHECK(Segments::from_double(2.75).floor() == 2);
    CHECK(Segments::infinity().is_infinite());
    CHECK(Segments::infinity().to_string() == "inf");
    CHECK(Segments{5} < Segments::infinity());

    SUBCASE("telescoping 1/cwnd increments are reproducible") {
        Segments a{10}, b{10};
        for (int i = 0; i < 1000; ++i) a += a.reciprocal();
        for (int i = 0; i < 1000; ++i) b += b.reciprocal();
        CHECK(a == b);
        CHECK(a.to_double() == doctest::Approx(std::sqrt(100.0 + 2000.0)).epsilon(0.01));
    }
}

TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    Rng a(derive_seed(9, 3)), b(derive_seed(9, 3));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform01();
        CHECK((u >= 0.0 && u < 1.0));
    }
}
