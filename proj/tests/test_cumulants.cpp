#include <doctest.h>

#include <cmath>
#include <thread>

#include "odtomo/cumulants.hpp"
#include "odtomo/poset.hpp"
#include "odtomo/simulator.hpp"

using odtomo::BitVector;
using odtomo::ExactModel;
using odtomo::SampleMatrix;

namespace {

BitVector bv(const char* s) { return BitVector::from_string(s); }

ExactModel paper_model() {
    ExactModel m;
    m.columns = {bv("100"), bv("010"), bv("001"), bv("110")};
    m.means = {1, 3, 2, 1};
    return m;
}

// N rows of Y = A X, X_j ~ Poisson(means_j).
SampleMatrix draw(const ExactModel& model, std::size_t n, std::uint64_t seed) {
    odtomo::Rng rng(seed);
    const std::size_t len = model.length();
    SampleMatrix y = SampleMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(len));
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

TEST_CASE("empirical moments by hand") {
    SampleMatrix y(2, 2);
    y << 1, 2, 3, 4;
    const std::vector<std::size_t> first{0};
    const std::vector<std::size_t> both{0, 1};
    CHECK(odtomo::empirical_moment(y, first) == 2.0);
    CHECK(odtomo::empirical_moment(y, both) == 7.0);
    SampleMatrix c = SampleMatrix::Constant(5, 3, 2.5);
    CHECK(odtomo::empirical_moment(c, both) == doctest::Approx(6.25));
    CHECK_THROWS_AS(odtomo::empirical_moment(y, std::vector<std::size_t>{}), odtomo::InvalidInput);
    CHECK_THROWS_AS(odtomo::empirical_moment(y, std::vector<std::size_t>{2}), odtomo::InvalidInput);
}

TEST_CASE("low order cumulants are mean and uncorrected covariance") {
    odtomo::Rng rng(3);
    SampleMatrix y(50, 3);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y.data()[i] = static_cast<double>(rng.below(7));
    }
    CHECK(odtomo::joint_cumulant(y, bv("010")) == doctest::Approx(y.col(1).mean()));
    const double cov = (y.col(0).array() * y.col(2).array()).mean() - y.col(0).mean() * y.col(2).mean();
    CHECK(odtomo::joint_cumulant(y, bv("101")) == doctest::Approx(cov).epsilon(1e-12));
}

TEST_CASE("third and fourth order match central moment formulas") {
    odtomo::Rng rng(4);
    SampleMatrix y(200, 4);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y.data()[i] = static_cast<double>(rng.below(9));
    }
    Eigen::ArrayXXd c = y.rowwise() - y.colwise().mean();
    const double k3 = (c.col(0) * c.col(1) * c.col(3)).mean();
    CHECK(odtomo::joint_cumulant(y, bv("1101")) == doctest::Approx(k3).epsilon(1e-10));

    // κ(a,b,c,d) = E[abcd] − E[ab]E[cd] − E[ac]E[bd] − E[ad]E[bc], central variables.
    auto m2 = [&](int i, int j) { return (c.col(i) * c.col(j)).mean(); };
    const double k4 = (c.col(0) * c.col(1) * c.col(2) * c.col(3)).mean() - m2(0, 1) * m2(2, 3) -
                      m2(0, 2) * m2(1, 3) - m2(0, 3) * m2(1, 2);
    CHECK(odtomo::joint_cumulant(y, bv("1111")) == doctest::Approx(k4).epsilon(1e-9));
}

TEST_CASE("zero columns and order cap") {
    SampleMatrix y = SampleMatrix::Zero(10, 3);
    y.col(0).setConstant(2.0);
    CHECK(odtomo::joint_cumulant(y, bv("110")) == 0.0);
    CHECK_THROWS_AS(odtomo::joint_cumulant(y, bv("111"), 2), odtomo::OrderCapExceeded);
    CHECK_THROWS_AS(odtomo::joint_cumulant(y, bv("000")), odtomo::InvalidInput);
    CHECK_THROWS_AS(odtomo::joint_cumulant(y, bv("0000")), odtomo::InvalidInput);
}

TEST_CASE("sample validation") {
    CHECK_THROWS_AS(odtomo::validate_samples(SampleMatrix(0, 3)), odtomo::InvalidInput);
    SampleMatrix neg = SampleMatrix::Ones(2, 2);
    neg(1, 1) = -1;
    CHECK_THROWS_AS(odtomo::validate_samples(neg), odtomo::InvalidInput);
    SampleMatrix nan = SampleMatrix::Ones(2, 2);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(odtomo::CumulantSource::empirical(nan), odtomo::InvalidInput);
}

TEST_CASE("exact phi on the worked example") {
    const ExactModel m = paper_model();
    CHECK(odtomo::exact_phi(m, bv("100")) == 2);
    CHECK(odtomo::exact_phi(m, bv("010")) == 4);
    CHECK(odtomo::exact_phi(m, bv("001")) == 2);
    CHECK(odtomo::exact_phi(m, bv("110")) == 1);
    CHECK(odtomo::exact_phi(m, bv("011")) == 0);
    CHECK(odtomo::exact_phi(m, bv("111")) == 0);
    ExactModel single;
    single.columns = {bv("0110")};
    single.means = {5};
    CHECK(odtomo::exact_phi(single, bv("0110")) == 5);
}

TEST_CASE("exact model validation") {
    ExactModel m = paper_model();
    m.columns.push_back(bv("100"));
    m.means.push_back(1);
    CHECK_THROWS_AS(m.validate(), odtomo::InvalidInput);
    m = paper_model();
    m.means[0] = 0;
    CHECK_THROWS_AS(m.validate(), odtomo::InvalidInput);
    m = paper_model();
    m.columns[0] = bv("000");
    CHECK_THROWS_AS(m.validate(), odtomo::InvalidInput);
    m = paper_model();
    m.means.pop_back();
    CHECK_THROWS_AS(m.validate(), odtomo::InvalidInput);
}

TEST_CASE("exact phi is monotone non-increasing") {
    odtomo::Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.below(6);
        ExactModel m;
        for (const BitVector& v : odtomo::nonzero_lattice(len)) {
            if (rng.below(5) == 0) {
                m.columns.push_back(v);
                m.means.push_back(rng.uniform(0.5, 4.0));
            }
        }
        const auto lat = odtomo::nonzero_lattice(len);
        for (const auto& v : lat) {
            for (const auto& w : lat) {
                if (odtomo::leq(v, w)) {
                    CHECK(odtomo::exact_phi(m, v) >= odtomo::exact_phi(m, w));
                    if (odtomo::exact_phi(m, v) == 0.0) {
                        CHECK(odtomo::exact_phi(m, w) == 0.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("full-lattice inversion of exact phi returns the means") {
    odtomo::Rng rng(23);
    for (std::size_t len = 1; len <= 4; ++len) {
        const odtomo::OrderedSupport lattice(odtomo::nonzero_lattice(len));
        for (int trial = 0; trial < 50; ++trial) {
            ExactModel m;
            for (const BitVector& v : lattice) {
                if (rng.below(3) == 0) {
                    m.columns.push_back(v);
                    m.means.push_back(rng.uniform(0.1, 9.0));
                }
            }
            Eigen::VectorXd phi(static_cast<Eigen::Index>(lattice.size()));
            for (std::size_t i = 0; i < lattice.size(); ++i) {
                phi(static_cast<Eigen::Index>(i)) = odtomo::exact_phi(m, lattice[i]);
            }
            const Eigen::VectorXd psi = odtomo::solve_unitriangular(lattice, phi);
            for (std::size_t i = 0; i < lattice.size(); ++i) {
                double expected = 0.0;
                for (std::size_t j = 0; j < m.columns.size(); ++j) {
                    if (m.columns[j] == lattice[i]) {
                        expected = m.means[j];
                    }
                }
                CHECK(psi(static_cast<Eigen::Index>(i)) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("single Poisson column: cumulants of every order equal the mean") {
    ExactModel m;
    m.columns = {bv("1111")};
    m.means = {3.0};
    odtomo::EmpiricalCumulants est(draw(m, 100000, 31));
    for (const BitVector& v : odtomo::nonzero_lattice(4)) {
        const double k = est.cumulant(v);
        const double se = est.standard_error(v);
        CHECK(se > 0.0);
        CHECK(std::fabs(k - 3.0) < 5.0 * se);
    }
}

TEST_CASE("empirical phi converges to exact phi") {
    const ExactModel m = paper_model();
    const auto lattice = odtomo::nonzero_lattice(3);
    double err_small = 0.0;
    double err_large = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        odtomo::EmpiricalCumulants small(draw(m, 1000, 100 + static_cast<std::uint64_t>(rep)));
        odtomo::EmpiricalCumulants large(draw(m, 100000, 200 + static_cast<std::uint64_t>(rep)));
        for (const auto& v : lattice) {
            err_small += std::fabs(small.cumulant(v) - odtomo::exact_phi(m, v));
            err_large += std::fabs(large.cumulant(v) - odtomo::exact_phi(m, v));
        }
    }
    CHECK(err_large < err_small);
}

TEST_CASE("standard error tracks the spread of replicated estimates") {
    const ExactModel m = paper_model();
    const BitVector v = bv("110");
    std::vector<double> values;
    double mean_se = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        odtomo::EmpiricalCumulants est(draw(m, 2000, 500 + static_cast<std::uint64_t>(rep)));
        values.push_back(est.cumulant(v));
        mean_se += est.standard_error(v) / reps;
    }
    double mu = 0.0;
    for (double x : values) {
        mu += x / reps;
    }
    double var = 0.0;
    for (double x : values) {
        var += (x - mu) * (x - mu) / (reps - 1);
    }
    const double spread = std::sqrt(var);
    CHECK(mean_se == doctest::Approx(spread).epsilon(0.15));
}

TEST_CASE("cumulant source dispatch and caching") {
    const auto exact = odtomo::CumulantSource::exact(paper_model());
    CHECK(exact.is_exact());
    CHECK(exact.length() == 3);
    CHECK(exact.phi(bv("011")) == 0.0);
    CHECK(exact.standard_error(bv("100")) == 0.0);
    CHECK(exact.evaluations() == 1);
    CHECK_THROWS_AS(exact.phi(bv("1100")), odtomo::InvalidInput);

    ExactModel wide;
    wide.columns = {BitVector::ones(20)};
    wide.means = {2.5};
    CHECK(odtomo::CumulantSource::exact(wide).phi(BitVector::ones(20)) == 2.5); // no order cap

    const auto emp = odtomo::CumulantSource::empirical(draw(paper_model(), 1000, 8), 2);
    CHECK_FALSE(emp.is_exact());
    CHECK(emp.order_cap() == 2);
    const double a = emp.phi(bv("110"));
    const double b = emp.phi(bv("110"));
    CHECK(a == b);
    CHECK(emp.evaluations() == 1);
    CHECK_THROWS_AS(emp.phi(bv("111")), odtomo::OrderCapExceeded);
    CHECK_THROWS_AS(odtomo::CumulantSource::empirical(draw(paper_model(), 10, 1), 13), odtomo::InvalidInput);
}

TEST_CASE("concurrent queries agree") {
    const auto emp = odtomo::CumulantSource::empirical(draw(paper_model(), 5000, 77));
    const auto lattice = odtomo::nonzero_lattice(3);
    std::vector<std::vector<double>> seen(4);
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < 4; ++t) {
            threads.emplace_back([&, t] {
                for (int rep = 0; rep < 20; ++rep) {
                    for (const auto& v : lattice) {
                        seen[t].push_back(emp.phi(v));
                    }
                }
            });
        }
    }
    for (std::size_t t = 1; t < 4; ++t) {
        CHECK(seen[t] == seen[0]);
    }
}
