#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cclab/cc/factory.hpp"
#include "cclab/rng.hpp"

using namespace cclab;
using namespace cclab::literals;

TEST_CASE("NewReno growth") {
    CHECK(newreno_growth(Segments{7}, true) == Segments{1});
    CHECK(newreno_growth(Segments{50}, false).to_string() == "0.02");
    CHECK(newreno_growth(Segments{1}, false) == Segments{1});
    CHECK(slow_start_step(Segments{2}, Segments::infinity()) == Segments{3});
    CHECK(slow_start_step(Segments::from_double(9.5), Segments{10}) == Segments{10});
}

TEST_CASE("NewReno: a window of ACKs adds the exact sum of increments") {
    NewRenoController cc;
    Segments w{10};
    Segments sum;
    for (int i = 0; i < 10; ++i) {
        sum += w.reciprocal();
        w = cc.on_ack_growth(w, Segments{10}, SimTime{});
    }
    CHECK(w == Segments{10} + sum);
    CHECK(sum.to_double() > 0.9);
    CHECK(sum.to_double() < 1.0);
}

TEST_CASE("multiplicative decrease is exact to one ulp") {
    Rng rng(11);
    for (const double b : {0.5, 0.8}) {
        const Segments bf = Segments::from_double(b);
        for (int i = 0; i < 2000; ++i) {
            const auto pre = Segments::from_raw(static_cast<Segments::raw_type>(
                2 * Segments::kScale + rng.next_u64() % (998 * Segments::kScale)));
            const WindowUpdate u = b == 0.5 ? NewRenoController{}.on_3dupack(pre, SimTime{})
                                            : BicController{}.on_3dupack(pre, SimTime{});
            const __int128 exact = static_cast<__int128>(pre.raw()) * bf.raw();
            const __int128 diff = static_cast<__int128>(u.cwnd.raw()) * Segments::kScale - exact;
            CHECK((diff <= Segments::kScale && diff >= -Segments::kScale));
            CHECK(u.ssthresh == u.cwnd);
        }
    }
    CHECK(multiplicative_decrease(Segments{20}, Segments::from_double(0.5)).cwnd == Segments{10});
}

TEST_CASE("every variant leaves cwnd at one segment after a timeout") {
    for (const Variant v : {Variant::NewReno, Variant::WestwoodPlus, Variant::Bic, Variant::Cubic}) {
        CAPTURE(to_string(v));
        auto cc = make_controller(v, CcParams{});
        CHECK(cc->variant() == v);
        const WindowUpdate u = cc->on_timeout(Segments{16}, 1_s);
        CHECK(u.cwnd == Segments{1});
        CHECK(u.ssthresh >= Segments{2});
    }
    CHECK(NewRenoController{}.on_timeout(Segments{16}, SimTime{}).ssthresh == Segments{8});
}

TEST_CASE("variant names") {
    CHECK(parse_variant("westwood+") == Variant::WestwoodPlus);
    CHECK(parse_variant("cubic") == Variant::Cubic);
    CHECK(to_string(Variant::Bic) == "bic");
    CHECK_THROWS_AS(parse_variant("vegas"), std::invalid_argument);
}

// --- Westwood+ -------------------------------------------------------------

TEST_CASE("Westwood+ bandwidth filter") {
    WestwoodParams p;
    SUBCASE("constant ACK rate converges to that rate") {
        WestwoodState s;
        // 1460 bytes every 11.68 ms is exactly 125000 B/s.
        for (int i = 0; i < 20000; ++i) westwood_update_bwe(s, p, 1460, SimTime::from_us(11'680LL * i));
        CHECK(s.bwe_bytes_per_s == doctest::Approx(125000.0).epsilon(1e-9));
    }
    SUBCASE("an empty interval decays the estimate by the gain") {
        WestwoodState s;
        s.bwe_bytes_per_s = 1000.0;
        westwood_update_bwe(s, p, 0, 1_s);
        CHECK(westwood_update_bwe(s, p, 0, 1_s + 60_ms) == doctest::Approx(900.0));
    }
    SUBCASE("first filter step from zero") {
        WestwoodState s;
        westwood_update_bwe(s, p, 0, 1_s);
        // 5000 bytes over 0.1 s is a sample of 50000 B/s.
        CHECK(westwood_update_bwe(s, p, 5000, 1100_ms) == doctest::Approx(5000.0));
        CHECK(s.bwe_samples == 1);
    }
    SUBCASE("the interval is at least the minimum RTT") {
        WestwoodState s;
        s.rtt_min = 200_ms;
        westwood_update_bwe(s, p, 0, SimTime{});
        westwood_update_bwe(s, p, 1000, 150_ms);
        CHECK(s.bwe_samples == 0);
        westwood_update_bwe(s, p, 1000, 200_ms);
        CHECK(s.bwe_samples == 1);
        CHECK(s.bwe_bytes_per_s == doctest::Approx(0.1 * 2000 / 0.2));
    }
}

TEST_CASE("Westwood+ window setting") {
    WestwoodParams p;
    WestwoodState s;
    s.bwe_bytes_per_s = 100.0 * 1460;  // 100 segments/s
    s.rtt_min = 100_ms;
    SUBCASE("BDP of ten segments") {
        const WindowUpdate u = westwood_on_3dupack(s, Segments{40}, 1460, p);
        CHECK(u.cwnd.to_double() == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(u.ssthresh == u.cwnd);
    }
    SUBCASE("tiny estimate clamps to one segment") {
        s.bwe_bytes_per_s = 1000.0;
        CHECK(westwood_on_3dupack(s, Segments{40}, 1460, p).cwnd == Segments{1});
    }
    SUBCASE("no estimate falls back to halving") {
        WestwoodState empty;
        CHECK(westwood_on_3dupack(empty, Segments{40}, 1460, p).cwnd == Segments{20});
    }
}

TEST_CASE("Westwood+ controller tracks the minimum RTT and sets ssthresh on timeout") {
    WestwoodController cc;
    SimTime t = 1_s;
    for (int i = 0; i < 2000; ++i) {
        t = t + 10_ms;
        // One 1460-byte segment every 10 ms with RTT 100 ms: 146000 B/s.
        const SimTime rtt = SimTime::from_ms(100 + (i % 7) * 10);
        cc.on_ack_observed({t, 1460, false, rtt, 1460});
    }
    REQUIRE(cc.state().rtt_min);
    CHECK(*cc.state().rtt_min == 100_ms);
    const WindowUpdate u = cc.on_timeout(Segments{30}, t);
    CHECK(u.cwnd == Segments{1});
    CHECK(u.ssthresh.to_double() == doctest::Approx(10.0).epsilon(1e-6));
}

// --- BIC ---------------------------------------------------------------------

namespace {

// Plain-double iteration of the binary search; independent of the fixed-point code.
std::vector<double> bic_oracle(double lo, double hi, double s_max, double s_min) {
    std::vector<double> out;
    double w = lo;
    for (int guard = 0; guard < 10000; ++guard) {
        const double mid = (lo + hi) / 2;
        if (mid - w > s_max) {
            w += s_max;
        } else if (mid - w < s_min) {
            out.push_back(hi);
            return out;
        } else {
            w = mid;
        }
        lo = w;
        out.push_back(w);
    }
    return out;
}

}  // namespace

TEST_CASE("BIC targets") {
    BicParams p;
    BicState s;
    SUBCASE("binary search step") {
        bic_on_loss(s, Segments{100}, p);
        const BicStep st = bic_target(s, Segments{80}, p);
        CHECK(st.target == Segments{90});
        CHECK(st.phase == BicPhase::BinarySearch);
    }
    SUBCASE("linear increase step") {
        bic_on_loss(s, Segments{400}, p);
        const BicStep st = bic_target(s, Segments{320}, p);
        CHECK(st.target == Segments{352});
        CHECK(st.phase == BicPhase::LinearIncrease);
    }
    SUBCASE("small step snaps to the maximum") {
        s.initialized = true;
        s.cwnd_max = Segments{100};
        s.cwnd_min = Segments::from_double(99.995);
        const BicStep st = bic_target(s, s.cwnd_min, p);
        CHECK(st.target == Segments{100});
        CHECK(st.phase == BicPhase::MaxProbing);
    }
    SUBCASE("max probing accelerates away from the old maximum") {
        s.initialized = true;
        s.cwnd_max = Segments{100};
        s.cwnd_min = Segments{80};
        s.phase = BicPhase::MaxProbing;
        Segments w{100};
        std::vector<double> incs;
        for (int i = 0; i < 20; ++i) {
            const Segments next = bic_target(s, w, p).target;
            incs.push_back((next - w).to_double());
            w = next;
        }
        CHECK(incs[0] == doctest::Approx(0.01));
        CHECK(incs[1] == doctest::Approx(0.01));
        CHECK(incs[2] == doctest::Approx(0.02));
        CHECK(incs[3] == doctest::Approx(0.04));
        for (std::size_t i = 1; i < incs.size(); ++i) CHECK(incs[i] >= incs[i - 1]);
        CHECK(incs.back() == doctest::Approx(32.0));
    }
}

TEST_CASE("BIC loss response") {
    BicParams p;
    BicState s;
    WindowUpdate u = bic_on_loss(s, Segments{100}, p);
    CHECK(u.cwnd == Segments{80});
    CHECK(s.cwnd_max == Segments{100});
    CHECK(s.cwnd_min == Segments{80});
    u = bic_on_loss(s, u.cwnd, p);
    CHECK(s.cwnd_max == Segments{80});
    CHECK(u.cwnd == Segments{64});

    BicParams half;
    half.b = 0.5;
    BicState h;
    CHECK(bic_on_loss(h, Segments{20}, half).cwnd ==
          multiplicative_decrease(Segments{20}, Segments::from_double(0.5)).cwnd);
}

TEST_CASE("BIC binary search matches the brute-force oracle") {
    BicParams p;
    const std::vector<double> expect = bic_oracle(80, 100, p.s_max, p.s_min);
    REQUIRE(expect.size() == 11);
    CHECK(expect.front() == 90.0);
    CHECK(expect[9] == 99.98046875);
    CHECK(expect.back() == 100.0);

    SUBCASE("target by target") {
        BicState s;
        bic_on_loss(s, Segments{100}, p);
        Segments w = s.cwnd_min;
        for (const double e : expect) {
            const BicStep st = bic_target(s, w, p);
            CHECK(st.target == Segments::from_double(e));
            w = st.target;
            if (st.phase != BicPhase::MaxProbing) s.cwnd_min = w;
        }
    }
    SUBCASE("per-ACK growth lands on each target at the end of its round") {
        BicController cc;
        WindowUpdate u = cc.on_3dupack(Segments{100}, SimTime{});
        Segments w = u.cwnd;
        for (const double e : expect) {
            const auto acks = w.floor();
            for (std::int64_t i = 0; i < acks; ++i) w = cc.on_ack_growth(w, u.ssthresh, SimTime{});
            CHECK(w == Segments::from_double(e));
        }
        CHECK(cc.state().phase == BicPhase::MaxProbing);
    }
    SUBCASE("wider gap starts linear") {
        const auto wide = bic_oracle(320, 400, p.s_max, p.s_min);
        CHECK(wide[0] == 352.0);
        CHECK(wide[1] == 376.0);
        CHECK(wide.back() == 400.0);
    }
}

TEST_CASE("BIC grows like NewReno before its first loss and in small windows") {
    BicController cc;
    CHECK(cc.on_ack_growth(Segments{20}, Segments{10}, SimTime{}) == Segments{20} + Segments{20}.reciprocal());
    cc.on_3dupack(Segments{12}, SimTime{});
    const Segments w = cc.state().cwnd_min;
    CHECK(cc.on_ack_growth(w, w, SimTime{}) == w + w.reciprocal());
}

// --- Cubic -------------------------------------------------------------------

TEST_CASE("Cubic epoch after a loss") {
    CubicParams p;
    CubicState s;
    const WindowUpdate u = cubic_on_loss(s, Segments{100}, 10_s, p);
    CHECK(u.cwnd == Segments{80});
    CHECK(s.max_win == Segments{100});
    CHECK(s.k_seconds == doctest::Approx(std::cbrt(50.0)));
    CHECK(s.k_seconds == doctest::Approx(3.684).epsilon(1e-3));
    CHECK(cubic_window_at(s, 0.0, p).to_double() == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(cubic_window_at(s, s.k_seconds, p) == Segments{100});

    SUBCASE("concave before K, convex after") {
        std::vector<double> inc;
        const double dt = 0.05;
        for (double t = 0; t < 2 * s.k_seconds; t += dt)
            inc.push_back(cubic_window_at(s, t + dt, p).to_double() - cubic_window_at(s, t, p).to_double());
        const std::size_t k = static_cast<std::size_t>(s.k_seconds / dt);
        for (std::size_t i = 1; i + 1 < k; ++i) CHECK(inc[i] < inc[i - 1]);
        for (std::size_t i = k + 2; i < inc.size(); ++i) CHECK(inc[i] > inc[i - 1]);
        for (const double d : inc) CHECK(d >= 0.0);
    }
    SUBCASE("vanishing reduction leaves the window flat") {
        CubicParams tiny = p;
        tiny.b = 1e-9;
        CubicState t;
        const WindowUpdate v = cubic_on_loss(t, Segments{100}, SimTime{}, tiny);
        CHECK(v.cwnd.to_double() == doctest::Approx(100.0));
        CHECK(t.k_seconds < 0.01);
    }
}

TEST_CASE("Cubic controller follows the curve with the TCP-friendly region off") {
    CubicParams p;
    p.tcp_friendly = false;
    CubicController cc(p);
    const WindowUpdate u = cc.on_3dupack(Segments{100}, 5_s);
    Segments w = u.cwnd;
    for (SimTime t = 5_s + 10_ms; t < 12_s; t = t + 10_ms) {
        w = cc.on_ack_growth(w, u.ssthresh, t);
        const double e = (t - 5_s).seconds() - std::cbrt(50.0);
        CHECK(w.to_double() == doctest::Approx(0.4 * e * e * e + 100.0).epsilon(1e-12));
    }
}
