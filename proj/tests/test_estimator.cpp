#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "odtomo/estimator.hpp"
#include "odtomo/simulator.hpp"

using odtomo::BitVector;
using odtomo::CumulantSource;
using odtomo::DpConfig;
using odtomo::ExactModel;

namespace {

BitVector bv(const char* s) { return BitVector::from_string(s); }

ExactModel paper_model() {
    ExactModel m;
    m.columns = {bv("100"), bv("010"), bv("001"), bv("110")};
    m.means = {1, 3, 2, 1};
    return m;
}

ExactModel random_model(odtomo::Rng& rng, std::size_t len, std::size_t max_columns) {
    ExactModel m;
    m.link_count = len;
    std::set<std::string> keys;
    const std::size_t lattice = (std::size_t{1} << len) - 1;
    const std::size_t want = std::min<std::size_t>(rng.below(max_columns + 1), lattice);
    while (m.columns.size() < want) {
        BitVector v(len);
        for (std::size_t i = 0; i < len; ++i) {
            if (rng.below(2) == 0) {
                v.set(i);
            }
        }
        if (v.none() || !keys.insert(v.to_string()).second) {
            continue;
        }
        m.columns.push_back(v);
        m.means.push_back(rng.uniform(0.5, 10.0));
    }
    return m;
}

odtomo::SampleMatrix draw(const ExactModel& model, std::size_t n, std::uint64_t seed) {
    odtomo::Rng rng(seed);
    odtomo::SampleMatrix y = odtomo::SampleMatrix::Zero(static_cast<Eigen::Index>(n),
                                                        static_cast<Eigen::Index>(model.length()));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < model.columns.size(); ++j) {
            const auto x = static_cast<double>(odtomo::poisson_sample(model.means[j], rng));
            for (std::size_t i : model.columns[j].indices()) {
                y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) += x;
            }
        }
    }
    return y;
}

} // namespace

TEST_CASE("worked example trace") {
    const auto src = CumulantSource::exact(paper_model());
    const auto trace = odtomo::run_dp(src, 3, DpConfig{});
    REQUIRE(trace.visited.size() == 4);
    const std::vector<std::string> order{"100", "010", "001", "110"};
    const std::vector<double> phi{2, 4, 2, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(trace.visited[i].vector.to_string() == order[i]);
        CHECK(trace.visited[i].phi == phi[i]);
    }
    CHECK(trace.queue_pops == 5);
    CHECK(trace.evaluations == 7); // 3 singletons, then 110, 101, 011, 111
    CHECK_FALSE(trace.truncated());

    const auto res = odtomo::estimate(src, DpConfig{});
    REQUIRE(res.support.size() == 4);
    CHECK(res.means(0) == 1.0);
    CHECK(res.means(1) == 3.0);
    CHECK(res.means(2) == 2.0);
    CHECK(res.means(3) == 1.0);
    CHECK(res.total() == 7.0);
}

TEST_CASE("zero traffic gives an empty visited set") {
    ExactModel empty;
    empty.link_count = 4;
    const auto res = odtomo::estimate(CumulantSource::exact(empty), DpConfig{});
    CHECK(res.support.empty());
    CHECK(res.visited.empty());
    CHECK(res.diagnostics.evaluations == 4);
}

TEST_CASE("single column: every vector below it is visited") {
    ExactModel m;
    m.columns = {bv("01101")};
    m.means = {5};
    const auto trace = odtomo::run_dp(CumulantSource::exact(m), 5, DpConfig{});
    CHECK(trace.visited.size() == 7);
    for (const auto& v : trace.visited) {
        CHECK(v.phi == 5.0);
        CHECK(v.vector.subset_of(m.columns[0]));
    }
    const auto res = odtomo::estimate(CumulantSource::exact(m), DpConfig{});
    REQUIRE(res.support.size() == 1);
    CHECK(res.support[0] == m.columns[0]);
    CHECK(res.means(0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("recover on hand inputs") {
    const odtomo::OrderedSupport s({bv("100"), bv("010"), bv("001"), bv("110")});
    Eigen::VectorXd phi(4);
    phi << 2, 4, 2, 1;
    const auto res = odtomo::recover(s, phi);
    CHECK(res.means == Eigen::Vector4d(1, 3, 2, 1));

    const odtomo::OrderedSupport one({bv("01")});
    const auto single = odtomo::recover(one, Eigen::VectorXd::Constant(1, 7.0));
    REQUIRE(single.support.size() == 1);
    CHECK(single.means(0) == 7.0);

    // ψ(10) = 1 − 3 < 0 is dropped, not clamped.
    const odtomo::OrderedSupport neg({bv("10"), bv("11")});
    const auto dropped = odtomo::recover(neg, Eigen::Vector2d(1.0, 3.0));
    CHECK(dropped.support.size() == 1);
    CHECK(dropped.diagnostics.negative_dropped == 1);
    CHECK_THROWS_AS(odtomo::recover(neg, Eigen::VectorXd::Ones(3)), odtomo::InvalidInput);
}

TEST_CASE("exact completeness against the full lattice for short vectors") {
    odtomo::Rng rng(61);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = 1 + rng.below(4);
        const ExactModel m = random_model(rng, len, 5);
        const auto trace = odtomo::run_dp(CumulantSource::exact(m), len, DpConfig{});
        std::set<std::string> visited;
        for (const auto& v : trace.visited) {
            CHECK(visited.insert(v.vector.to_string()).second);
        }
        std::set<std::string> positive;
        for (const auto& v : odtomo::nonzero_lattice(len)) {
            if (odtomo::exact_phi(m, v) > 0.0) {
                positive.insert(v.to_string());
            }
        }
        CHECK(visited == positive);
    }
}

TEST_CASE("exact completeness against upper-set unions for longer vectors") {
    odtomo::Rng rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = 5 + rng.below(6);
        const ExactModel m = random_model(rng, len, 6);
        const auto trace = odtomo::run_dp(CumulantSource::exact(m), len, DpConfig{});
        std::set<std::string> expected;
        std::size_t bound = 0;
        for (const auto& w : m.columns) {
            bound += std::size_t{1} << w.count();
            const auto idx = w.indices();
            for (std::uint32_t mask = 1; mask < (1U << idx.size()); ++mask) {
                BitVector v(len);
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    if ((mask >> k) & 1U) {
                        v.set(idx[k]);
                    }
                }
                expected.insert(v.to_string());
            }
        }
        std::set<std::string> visited;
        for (const auto& v : trace.visited) {
            visited.insert(v.vector.to_string());
        }
        CHECK(visited == expected);
        CHECK(trace.visited.size() <= bound);
    }
}

TEST_CASE("exact correctness on random models") {
    odtomo::Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.below(10);
        const ExactModel m = random_model(rng, len, 6);
        const auto res = odtomo::estimate(CumulantSource::exact(m), DpConfig{});
        REQUIRE(res.support.size() == m.columns.size());
        for (std::size_t j = 0; j < m.columns.size(); ++j) {
            bool found = false;
            for (std::size_t i = 0; i < res.support.size(); ++i) {
                if (res.support[i] == m.columns[j]) {
                    found = true;
                    CHECK(res.means(static_cast<Eigen::Index>(i)) == doctest::Approx(m.means[j]).epsilon(1e-9));
                }
            }
            CHECK(found);
        }
        const auto metrics = odtomo::error_metrics(m, res);
        CHECK(metrics.relative_total_error < 1e-9);
        CHECK(metrics.precision == 1.0);
        CHECK(metrics.recall == 1.0);
    }
}

TEST_CASE("no vector above a zero-phi vector is evaluated") {
    odtomo::Rng rng(73);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = 3 + rng.below(5);
        const ExactModel m = random_model(rng, len, 4);
        const auto trace = odtomo::run_dp(CumulantSource::exact(m), len, DpConfig{});
        for (const auto& v : trace.visited) {
            // Every proper predecessor of a visited vector must itself have positive φ.
            for (std::size_t i : v.vector.indices()) {
                BitVector below = v.vector;
                below.set(i, false);
                if (!below.none()) {
                    CHECK(odtomo::exact_phi(m, below) > 0.0);
                }
            }
        }
    }
}

TEST_CASE("estimates are deterministic") {
    const auto y = draw(paper_model(), 20000, 5);
    const auto a = odtomo::estimate(CumulantSource::empirical(y), DpConfig{});
    const auto b = odtomo::estimate(CumulantSource::empirical(y), DpConfig{});
    REQUIRE(a.visited.size() == b.visited.size());
    for (std::size_t i = 0; i < a.visited.size(); ++i) {
        CHECK(a.visited[i] == b.visited[i]);
    }
    CHECK(a.phi == b.phi);
    CHECK(a.means == b.means);
    const auto ta = odtomo::run_dp(CumulantSource::empirical(y), 3, DpConfig{});
    const auto tb = odtomo::run_dp(CumulantSource::empirical(y), 3, DpConfig{});
    REQUIRE(ta.visited.size() == tb.visited.size());
    for (std::size_t i = 0; i < ta.visited.size(); ++i) {
        CHECK(ta.visited[i].vector == tb.visited[i].vector);
    }
}

TEST_CASE("empirical estimate on the worked example") {
    const auto res = odtomo::estimate(CumulantSource::empirical(draw(paper_model(), 200000, 9)), DpConfig{});
    REQUIRE(res.support.size() == 4);
    const std::vector<double> expected{1, 3, 2, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(res.support[i] == paper_model().columns[i]);
        CHECK(res.means(static_cast<Eigen::Index>(i)) == doctest::Approx(expected[i]).epsilon(0.1));
    }
}

TEST_CASE("absolute mode with a large threshold prunes everything") {
    DpConfig cfg;
    cfg.mode = odtomo::ThresholdMode::Absolute;
    cfg.epsilon = 100.0;
    const auto res = odtomo::estimate(CumulantSource::empirical(draw(paper_model(), 1000, 2)), cfg);
    CHECK(res.visited.empty());
}

TEST_CASE("order cap truncates empirical runs") {
    ExactModel m;
    m.columns = {bv("111")};
    m.means = {4};
    DpConfig cfg;
    cfg.order_cap = 2;
    const auto res = odtomo::estimate(CumulantSource::empirical(draw(m, 50000, 3), 2), cfg);
    CHECK(res.diagnostics.truncated);
    CHECK(res.diagnostics.order_cap_hits == 1);
    CHECK(res.diagnostics.max_order == 2);
}

TEST_CASE("config validation") {
    DpConfig cfg;
    cfg.epsilon = -1;
    CHECK_THROWS_AS(cfg.validate(), odtomo::InvalidInput);
    cfg = DpConfig{};
    cfg.order_cap = 0;
    CHECK_THROWS_AS(cfg.validate(), odtomo::InvalidInput);
    cfg = DpConfig{};
    cfg.z = -0.5;
    CHECK_THROWS_AS(cfg.validate(), odtomo::InvalidInput);
    const auto src = CumulantSource::exact(paper_model());
    CHECK_THROWS_AS(odtomo::run_dp(src, 4, DpConfig{}), odtomo::InvalidInput);
}

TEST_CASE("error metrics by hand") {
    ExactModel truth;
    truth.columns = {bv("10"), bv("01"), bv("11")};
    truth.means = {2, 3, 3};

    odtomo::EstimationResult missing;
    missing.support = {bv("01"), bv("11")};
    missing.means = Eigen::Vector2d(3, 3);
    const auto m1 = odtomo::error_metrics(truth, missing);
    CHECK(m1.relative_total_error == doctest::Approx(0.25));
    CHECK(m1.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m1.precision == 1.0);
    CHECK(m1.l1_error == doctest::Approx(2.0));

    ExactModel small;
    small.columns = {bv("10")};
    small.means = {2};
    odtomo::EstimationResult spurious;
    spurious.support = {bv("10"), bv("01")};
    spurious.means = Eigen::Vector2d(2, 1);
    const auto m2 = odtomo::error_metrics(small, spurious);
    CHECK(m2.precision == 0.5);
    CHECK(m2.recall == 1.0);
    CHECK(m2.l1_error == doctest::Approx(1.0));

    odtomo::EstimationResult exact;
    exact.support = truth.columns;
    exact.means = Eigen::Vector3d(2, 3, 3);
    const auto m3 = odtomo::error_metrics(truth, exact);
    CHECK(m3.relative_total_error == 0.0);
    CHECK(m3.l1_error == 0.0);
}
