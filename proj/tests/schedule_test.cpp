#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/schedule.hpp"

using namespace bcfw;

namespace {

std::vector<BlockIndexSet> generate(Schedule& s, std::size_t horizon) {
    std::vector<BlockIndexSet> sets;
    sets.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) sets.push_back(s.next(t));
    return sets;
}

std::size_t count_containing(const std::vector<BlockIndexSet>& sets, std::size_t i) {
    std::size_t count = 0;
    for (const auto& set : sets)
        if (set.contains(i)) ++count;
    return count;
}

}  // namespace

TEST_CASE("full schedule activates every block each iteration", "[blocks]") {
    Schedule s = Schedule::full(3);
    CHECK(s.num_blocks() == 3);
    CHECK(s.coverage_window() == 1);
    for (std::size_t t : {0, 1, 7, 100}) CHECK(s.next(t) == BlockIndexSet::all(3));
}

TEST_CASE("cyclic schedule walks the blocks in order", "[blocks]") {
    Schedule s = Schedule::cyclic(3);
    CHECK(s.coverage_window() == 3);
    const std::vector<std::size_t> expect{0, 1, 2, 0, 1, 2, 0};
    for (std::size_t t = 0; t < expect.size(); ++t)
        CHECK(s.next(t) == BlockIndexSet({expect[t]}));
}

TEST_CASE("lazy schedule touches the expensive block every q-th iteration", "[blocks]") {
    SECTION("m = 2, q = 5 produces the documented pattern") {
        Schedule s = Schedule::qlazy(2, 5, BlockIndexSet({1}));
        CHECK(s.coverage_window() == 5);
        auto sets = generate(s, 11);
        CHECK(sets[0] == BlockIndexSet::all(2));
        for (std::size_t t : {1, 2, 3, 4}) CHECK(sets[t] == BlockIndexSet({0}));
        CHECK(sets[5] == BlockIndexSet::all(2));
        CHECK(sets[10] == BlockIndexSet::all(2));
    }
    SECTION("q = 1 degenerates to the full schedule") {
        Schedule s = Schedule::qlazy(4, 1, BlockIndexSet({3}));
        for (std::size_t t = 0; t < 6; ++t) CHECK(s.next(t) == BlockIndexSet::all(4));
    }
    SECTION("expensive block appears in exactly ceil(T/q) of T sets") {
        const std::size_t q = 7, T = 100;
        Schedule s = Schedule::qlazy(3, q, BlockIndexSet({2}));
        auto sets = generate(s, T);
        CHECK(count_containing(sets, 2) == (T + q - 1) / q);
        CHECK(count_containing(sets, 0) == T);
        CHECK(count_containing(sets, 1) == T);
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(Schedule::qlazy(2, 0, BlockIndexSet({1})), std::invalid_argument);
        CHECK_THROWS_AS(Schedule::qlazy(2, 3, BlockIndexSet({5})), std::invalid_argument);
        // All blocks expensive leaves nothing to do between refreshes.
        CHECK_THROWS_AS(Schedule::qlazy(2, 3, BlockIndexSet({0, 1})), std::invalid_argument);
    }
}

TEST_CASE("permuted cyclic schedule is a fresh permutation each cycle", "[blocks]") {
    const std::size_t m = 6;
    Schedule s = Schedule::pcyclic(m, 99);
    CHECK(s.coverage_window() == 2 * m - 1);
    auto sets = generate(s, 10 * m);
    for (std::size_t cycle = 0; cycle < 10; ++cycle) {
        std::vector<std::size_t> seen;
        for (std::size_t pos = 0; pos < m; ++pos) {
            const auto& set = sets[cycle * m + pos];
            REQUIRE(set.size() == 1);
            seen.push_back(*set.begin());
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < m; ++i) CHECK(seen[i] == i);  // a permutation
    }
}

TEST_CASE("stochastic schedules replay exactly under the same seed", "[blocks]") {
    SECTION("permuted cyclic") {
        Schedule a = Schedule::pcyclic(5, 1234);
        Schedule b = Schedule::pcyclic(5, 1234);
        Schedule c = Schedule::pcyclic(5, 1235);
        auto sa = generate(a, 50), sb = generate(b, 50), sc = generate(c, 50);
        CHECK(sa == sb);
        CHECK(sa != sc);
    }
    SECTION("random lazy subsets") {
        Schedule a = Schedule::pqlazy(7, 2, 4, 6, 42);
        Schedule b = Schedule::pqlazy(7, 2, 4, 6, 42);
        CHECK(generate(a, 64) == generate(b, 64));
    }
}

TEST_CASE("random lazy schedule draws p cheap blocks between refreshes", "[blocks]") {
    const std::size_t m = 7, p = 2, q = 4, expensive = 6;
    Schedule s = Schedule::pqlazy(m, p, q, expensive, 7);
    auto sets = generate(s, 200);
    for (std::size_t t = 0; t < sets.size(); ++t) {
        if (t % q == 0) {
            CHECK(sets[t] == BlockIndexSet::all(m));
        } else {
            CHECK(sets[t].size() == p);
            CHECK_FALSE(sets[t].contains(expensive));
        }
    }
    CHECK(count_containing(sets, expensive) == (sets.size() + q - 1) / q);

    CHECK_THROWS_AS(Schedule::pqlazy(3, 0, 2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::pqlazy(3, 3, 2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::pqlazy(3, 1, 0, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::pqlazy(3, 1, 2, 3, 0), std::invalid_argument);
}

TEST_CASE("every built-in schedule meets its declared coverage window", "[blocks]") {
    const std::size_t horizon = 10000;
    const std::size_t m = 5;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<Schedule> schedules;
        schedules.push_back(Schedule::full(m));
        schedules.push_back(Schedule::cyclic(m));
        schedules.push_back(Schedule::pcyclic(m, seed));
        schedules.push_back(Schedule::qlazy(m, 6, BlockIndexSet({m - 1})));
        schedules.push_back(Schedule::pqlazy(m, 2, 6, m - 1, seed));
        for (auto& s : schedules) {
            auto sets = generate(s, horizon);
            const auto report = verify_coverage(sets, s.coverage_window(), m);
            INFO("window " << s.coverage_window());
            CHECK(report.ok);
        }
    }
}

TEST_CASE("coverage verification finds the tightest window", "[blocks]") {
    const std::size_t m = 3;
    Schedule s = Schedule::cyclic(m);
    auto sets = generate(s, 30);

    CHECK(verify_coverage(sets, m, m).ok);

    const auto report = verify_coverage(sets, m - 1, m);
    CHECK_FALSE(report.ok);
    CHECK(report.first_violation_t == 0);  // window [0, 2) already misses a block
    CHECK(report.missing_block == 2);

    SECTION("short histories are vacuously fine") {
        CHECK(verify_coverage({BlockIndexSet({0})}, 5, m).ok);
    }
    SECTION("bad arguments throw") {
        CHECK_THROWS_AS(verify_coverage(sets, 0, m), std::invalid_argument);
        CHECK_THROWS_AS(verify_coverage({BlockIndexSet({7})}, 1, m), std::invalid_argument);
    }
}

TEST_CASE("spec strings parse into the right schedule kinds", "[blocks]") {
    CHECK(parse_schedule_spec("full").kind == ScheduleSpec::Kind::full);
    CHECK(parse_schedule_spec("cyclic").kind == ScheduleSpec::Kind::cyclic);
    CHECK(parse_schedule_spec("pcyclic").kind == ScheduleSpec::Kind::pcyclic);

    const ScheduleSpec ql = parse_schedule_spec("qlazy:12");
    CHECK(ql.kind == ScheduleSpec::Kind::qlazy);
    CHECK(ql.q == 12);

    const ScheduleSpec pql = parse_schedule_spec("pqlazy:3,9");
    CHECK(pql.kind == ScheduleSpec::Kind::pqlazy);
    CHECK(pql.p == 3);
    CHECK(pql.q == 9);

    for (const char* bad : {"", "Full", "qlazy", "qlazy:", "qlazy:0", "qlazy:x",
                            "qlazy:-3", "pqlazy:5", "pqlazy:,5", "pqlazy:0,5",
                            "pqlazy:2,0", "qlazy:99999999999", "cyclic "})
        CHECK_THROWS_AS(parse_schedule_spec(bad), std::invalid_argument);
}

TEST_CASE("spec instantiation treats the last block as expensive", "[blocks]") {
    const std::size_t m = 4;
    Schedule s = make_schedule(parse_schedule_spec("qlazy:3"), m, 0);
    auto sets = generate(s, 9);
    for (std::size_t t = 0; t < 9; ++t) {
        CHECK(sets[t].contains(m - 1) == (t % 3 == 0));
        for (std::size_t i = 0; i + 1 < m; ++i) CHECK(sets[t].contains(i));
    }

    Schedule pq = make_schedule(parse_schedule_spec("pqlazy:1,3"), m, 11);
    auto pq_sets = generate(pq, 12);
    for (std::size_t t = 0; t < 12; ++t)
        CHECK(pq_sets[t].contains(m - 1) == (t % 3 == 0));

    for (const char* spec : {"full", "cyclic", "pcyclic", "qlazy:4", "pqlazy:2,4"}) {
        const ScheduleSpec parsed = parse_schedule_spec(spec);
        Schedule built = make_schedule(parsed, m, 1);
        CHECK(built.coverage_window() == spec_coverage_window(parsed, m));
    }

    CHECK_THROWS_AS(make_schedule(parse_schedule_spec("pqlazy:1,2"), 1, 0),
                    std::invalid_argument);
}

TEST_CASE("custom schedules flag violated coverage claims without aborting", "[blocks]") {
    SECTION("an honest rule never trips the flag") {
        Schedule s = Schedule::custom(2, [](std::size_t t) {
            return BlockIndexSet({t % 2});
        }, 2);
        auto sets = generate(s, 100);
        CHECK_FALSE(s.claim_violated());
        CHECK(verify_coverage(sets, 2, 2).ok);
    }
    SECTION("a starving rule trips the flag but keeps running") {
        Schedule s = Schedule::custom(2, [](std::size_t) {
            return BlockIndexSet({0});  // block 1 never activated
        }, 3);
        auto sets = generate(s, 10);
        CHECK(sets.size() == 10);
        CHECK(s.claim_violated());
    }
    SECTION("malformed rules and parameters throw") {
        CHECK_THROWS_AS(Schedule::custom(2, nullptr, 1), std::invalid_argument);
        CHECK_THROWS_AS(Schedule::custom(2, [](std::size_t) { return BlockIndexSet{}; }, 0),
                        std::invalid_argument);
        Schedule empty_rule =
            Schedule::custom(2, [](std::size_t) { return BlockIndexSet{}; }, 1);
        CHECK_THROWS_AS(empty_rule.next(0), std::invalid_argument);
        Schedule oob_rule =
            Schedule::custom(2, [](std::size_t) { return BlockIndexSet({9}); }, 1);
        CHECK_THROWS_AS(oob_rule.next(0), std::invalid_argument);
    }
    SECTION("stateful schedules demand sequential iteration counters") {
        Schedule s = Schedule::pcyclic(3, 0);
        s.next(0);
        CHECK_THROWS_AS(s.next(5), std::logic_error);
    }
}
