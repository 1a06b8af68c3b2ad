#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bcfw/block_vector.hpp"
#include "bcfw/rng.hpp"

// Block-activation schedules. A schedule maps the iteration counter t to the
// set of blocks updated at t, and declares a coverage window K: every block
// index must appear in every window of K consecutive activation sets. A
// schedule instance is owned by a single solver run; the stochastic kinds
// consume their embedded RNG in iteration order, so next(t) must be called
// with t = 0, 1, 2, ...

namespace bcfw {

class Schedule {
  public:
    // All m blocks every iteration. K = 1.
    static Schedule full(std::size_t m) {
        Schedule s(m, 1);
        s.next_fn_ = [m](Schedule&, std::size_t) { return BlockIndexSet::all(m); };
        return s;
    }

    // Singleton {t mod m}. K = m.
    static Schedule cyclic(std::size_t m) {
        Schedule s(m, m);
        s.next_fn_ = [m](Schedule&, std::size_t t) { return BlockIndexSet({t % m}); };
        return s;
    }

    // Singletons from a fresh uniform permutation every m iterations.
    // K = 2m - 1: an index can sit at the head of one permutation and the
    // tail of the next.
    static Schedule pcyclic(std::size_t m, std::uint64_t seed) {
        Schedule s(m, 2 * m - 1);
        s.rng_.emplace(seed);
        s.perm_.resize(m);
        for (std::size_t i = 0; i < m; ++i) s.perm_[i] = i;
        s.next_fn_ = [m](Schedule& self, std::size_t t) {
            const std::size_t pos = t % m;
            if (pos == 0) self.shuffle_perm(m);
            return BlockIndexSet({self.perm_[pos]});
        };
        return s;
    }

    // Everything at t == 0 mod q, otherwise only the cheap blocks (the
    // complement of `expensive`). K = q.
    static Schedule qlazy(std::size_t m, std::size_t q, BlockIndexSet expensive) {
        if (q == 0) throw std::invalid_argument("Schedule::qlazy: q must be positive");
        for (std::size_t i : expensive)
            if (i >= m) throw std::invalid_argument("Schedule::qlazy: index out of range");
        std::vector<std::size_t> cheap;
        for (std::size_t i = 0; i < m; ++i)
            if (!expensive.contains(i)) cheap.push_back(i);
        if (cheap.empty() && q > 1)
            throw std::invalid_argument(
                "Schedule::qlazy: every block expensive leaves lazy iterations empty");
        Schedule s(m, q);
        BlockIndexSet cheap_set(std::move(cheap));
        s.next_fn_ = [m, q, cheap_set](Schedule&, std::size_t t) {
            if (t % q == 0) return BlockIndexSet::all(m);
            return cheap_set;
        };
        return s;
    }

    // Everything at t == 0 mod q, otherwise a uniformly random p-subset of
    // the cheap blocks. K = q. Sampling is a partial Fisher-Yates shuffle
    // consuming exactly p draws per lazy iteration.
    static Schedule pqlazy(std::size_t m, std::size_t p, std::size_t q,
                           std::size_t expensive, std::uint64_t seed) {
        if (q == 0) throw std::invalid_argument("Schedule::pqlazy: q must be positive");
        if (expensive >= m)
            throw std::invalid_argument("Schedule::pqlazy: expensive index out of range");
        if (p < 1 || p > m - 1)
            throw std::invalid_argument("Schedule::pqlazy: p must lie in [1, m-1]");
        Schedule s(m, q);
        s.rng_.emplace(seed);
        s.pool_.reserve(m - 1);
        for (std::size_t i = 0; i < m; ++i)
            if (i != expensive) s.pool_.push_back(i);
        s.next_fn_ = [m, p, q](Schedule& self, std::size_t t) {
            if (t % q == 0) return BlockIndexSet::all(m);
            std::vector<std::size_t> pool = self.pool_;
            for (std::size_t j = 0; j < p; ++j) {
                const std::size_t r =
                    j + static_cast<std::size_t>(
                            self.rng_->bounded(static_cast<std::uint64_t>(pool.size() - j)));
                std::swap(pool[j], pool[r]);
            }
            pool.resize(p);
            std::sort(pool.begin(), pool.end());
            return BlockIndexSet(std::move(pool));
        };
        return s;
    }

    // User-supplied activation rule with a claimed coverage window. The claim
    // is validated over the executed prefix; a violation warns once on stderr
    // instead of aborting.
    static Schedule custom(std::size_t m, std::function<BlockIndexSet(std::size_t)> fn,
                           std::size_t claimed_window) {
        if (!fn) throw std::invalid_argument("Schedule::custom: empty rule");
        if (claimed_window == 0)
            throw std::invalid_argument("Schedule::custom: window must be positive");
        Schedule s(m, claimed_window);
        s.validate_claim_ = true;
        s.last_seen_.assign(m, std::size_t(-1));
        s.next_fn_ = [m, fn = std::move(fn)](Schedule& self, std::size_t t) {
            BlockIndexSet set = fn(t);
            if (set.empty())
                throw std::invalid_argument("Schedule::custom: rule produced empty set");
            for (std::size_t i : set)
                if (i >= m)
                    throw std::invalid_argument(
                        "Schedule::custom: rule produced out-of-range index");
            self.check_claim(t, set);
            return set;
        };
        return s;
    }

    std::size_t num_blocks() const { return m_; }

    // Declared coverage window K.
    std::size_t coverage_window() const { return window_; }

    // Activation set for iteration t. Stochastic kinds require sequential t.
    BlockIndexSet next(std::size_t t) {
        if (rng_.has_value() || validate_claim_) {
            if (t != expected_t_)
                throw std::logic_error(
                    "Schedule::next: stateful schedules must be called with t = 0, 1, ...");
            ++expected_t_;
        }
        return next_fn_(*this, t);
    }

    // True once a custom schedule's claimed window has been observed violated.
    bool claim_violated() const { return claim_violated_; }

  private:
    Schedule(std::size_t m, std::size_t window) : m_(m), window_(window) {
        if (m == 0) throw std::invalid_argument("Schedule: m must be positive");
    }

    void shuffle_perm(std::size_t m) {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const std::size_t r = j + static_cast<std::size_t>(
                                          rng_->bounded(static_cast<std::uint64_t>(m - j)));
            std::swap(perm_[j], perm_[r]);
        }
    }

    void check_claim(std::size_t t, const BlockIndexSet& set) {
        for (std::size_t i : set) last_seen_[i] = t;
        if (claim_violated_) return;
        for (std::size_t i = 0; i < m_; ++i) {
            // last_seen == -1 counts as "not seen since before t = 0".
            const std::size_t age =
                (last_seen_[i] == std::size_t(-1)) ? t + 1 : t - last_seen_[i];
            if (age >= window_) {
                claim_violated_ = true;
                std::cerr << "bcfw: custom schedule violates its claimed coverage window "
                          << window_ << ": block " << i << " missing from iterations ["
                          << (t + 1 - window_) << ", " << t << "]\n";
                return;
            }
        }
    }

    std::size_t m_;
    std::size_t window_;
    std::function<BlockIndexSet(Schedule&, std::size_t)> next_fn_;
    std::optional<Rng> rng_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> pool_;
    bool validate_claim_ = false;
    bool claim_violated_ = false;
    std::vector<std::size_t> last_seen_;
    std::size_t expected_t_ = 0;
};

struct CoverageReport {
    bool ok = true;
    std::size_t first_violation_t = 0;  // start of the first violating window
    std::size_t missing_block = 0;
};

// Exhaustively checks that every block appears in every window of `window`
// consecutive sets. Reports the first violating window start.
inline CoverageReport verify_coverage(const std::vector<BlockIndexSet>& sets,
                                      std::size_t window, std::size_t m) {
    if (window == 0) throw std::invalid_argument("verify_coverage: window must be positive");
    CoverageReport report;
    if (sets.size() < window) return report;
    // last_seen[i] = latest t' <= t with i in sets[t'], else -1.
    std::vector<std::size_t> last_seen(m, std::size_t(-1));
    for (std::size_t t = 0; t < sets.size(); ++t) {
        for (std::size_t i : sets[t]) {
            if (i >= m) throw std::invalid_argument("verify_coverage: index out of range");
            last_seen[i] = t;
        }
        if (t + 1 < window) continue;
        const std::size_t window_start = t + 1 - window;
        for (std::size_t i = 0; i < m; ++i) {
            if (last_seen[i] == std::size_t(-1) || last_seen[i] < window_start) {
                report.ok = false;
                report.first_violation_t = window_start;
                report.missing_block = i;
                return report;
            }
        }
    }
    return report;
}

// Parsed form of a schedule spec string:
//   full | cyclic | pcyclic | qlazy:<q> | pqlazy:<p>,<q>
struct ScheduleSpec {
    enum class Kind { full, cyclic, pcyclic, qlazy, pqlazy } kind;
    std::size_t p = 0;
    std::size_t q = 0;
    std::string text;
};

inline ScheduleSpec parse_schedule_spec(const std::string& text) {
    auto parse_positive = [&](const std::string& s) -> std::size_t {
        if (s.empty()) throw std::invalid_argument("schedule spec: missing number in '" + text + "'");
        std::size_t value = 0;
        for (char ch : s) {
            if (ch < '0' || ch > '9')
                throw std::invalid_argument("schedule spec: bad number in '" + text + "'");
            value = value * 10 + static_cast<std::size_t>(ch - '0');
            if (value > 1000000000) throw std::invalid_argument("schedule spec: number too large");
        }
        if (value == 0) throw std::invalid_argument("schedule spec: parameters must be positive");
        return value;
    };
    ScheduleSpec spec;
    spec.text = text;
    if (text == "full") { spec.kind = ScheduleSpec::Kind::full; return spec; }
    if (text == "cyclic") { spec.kind = ScheduleSpec::Kind::cyclic; return spec; }
    if (text == "pcyclic") { spec.kind = ScheduleSpec::Kind::pcyclic; return spec; }
    if (text.rfind("qlazy:", 0) == 0) {
        spec.kind = ScheduleSpec::Kind::qlazy;
        spec.q = parse_positive(text.substr(6));
        return spec;
    }
    if (text.rfind("pqlazy:", 0) == 0) {
        const std::string rest = text.substr(7);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("schedule spec: pqlazy needs '<p>,<q>' in '" + text + "'");
        spec.kind = ScheduleSpec::Kind::pqlazy;
        spec.p = parse_positive(rest.substr(0, comma));
        spec.q = parse_positive(rest.substr(comma + 1));
        return spec;
    }
    throw std::invalid_argument("schedule spec: unknown strategy '" + text + "'");
}

// Instantiates a spec for m blocks. The lazy kinds treat the last block as
// the expensive one, matching domains built with the costly oracle last.
inline Schedule make_schedule(const ScheduleSpec& spec, std::size_t m, std::uint64_t seed) {
    switch (spec.kind) {
        case ScheduleSpec::Kind::full: return Schedule::full(m);
        case ScheduleSpec::Kind::cyclic: return Schedule::cyclic(m);
        case ScheduleSpec::Kind::pcyclic: return Schedule::pcyclic(m, seed);
        case ScheduleSpec::Kind::qlazy:
            if (m < 2 && spec.q > 1)
                throw std::invalid_argument("qlazy needs at least two blocks");
            return Schedule::qlazy(m, spec.q, m >= 2 ? BlockIndexSet({m - 1}) : BlockIndexSet{});
        case ScheduleSpec::Kind::pqlazy:
            if (m < 2) throw std::invalid_argument("pqlazy needs at least two blocks");
            return Schedule::pqlazy(m, spec.p, spec.q, m - 1, seed);
    }
    throw std::logic_error("make_schedule: unreachable");
}

// Declared coverage window of a spec for m blocks.
inline std::size_t spec_coverage_window(const ScheduleSpec& spec, std::size_t m) {
    switch (spec.kind) {
        case ScheduleSpec::Kind::full: return 1;
        case ScheduleSpec::Kind::cyclic: return m;
        case ScheduleSpec::Kind::pcyclic: return 2 * m - 1;
        case ScheduleSpec::Kind::qlazy: return spec.q;
        case ScheduleSpec::Kind::pqlazy: return spec.q;
    }
    throw std::logic_error("spec_coverage_window: unreachable");
}

}  // namespace bcfw
