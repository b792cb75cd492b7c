#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "narmine/csv.hpp"
#include "narmine/rng.hpp"
#include "narmine/sha256.hpp"
#include "narmine/stats.hpp"

using namespace narmine;

TEST_CASE("hurwitz zeta matches known values") {
    // zeta(2, 1) = pi^2 / 6
    CHECK(stats::hurwitz_zeta(2.0, 1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
    // zeta(3) = 1.2020569031595942854...
    CHECK(stats::hurwitz_zeta(3.0, 1.0) == doctest::Approx(1.2020569031595942854).epsilon(1e-14));
    // direct summation cross-check at a shifted start
    double direct = 0.0;
    for (int k = 0; k < 2000000; ++k) direct += std::pow(10.0 + k, -2.5);
    CHECK(stats::hurwitz_zeta(2.5, 10.0) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("incomplete gamma and chi-square tail") {
    // chi2 with 2 dof: sf(x) = exp(-x/2)
    CHECK(stats::chi_square_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    // known quantile: P(chi2_1 > 3.841459) ~ 0.05
    CHECK(stats::chi_square_sf(3.8414588206941236, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(stats::gamma_p(2.0, 0.0) == 0.0);
    CHECK(stats::gamma_q(2.0, 0.0) == 1.0);
    // large-parameter regime stays finite and ordered
    double big = stats::chi_square_sf(140000.0, 204146.0);
    CHECK(big > 0.999);
}

TEST_CASE("normal quantile inverts the CDF") {
    CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(stats::normal_quantile(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-10));
    for (double p : {1e-12, 0.2, 0.7, 1.0 - 1e-12}) {
        double x = stats::normal_quantile(p);
        CHECK(stats::normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("logistic is stable at extremes") {
    CHECK(stats::logistic(0.0) == doctest::Approx(0.5));
    CHECK(stats::logistic(800.0) == doctest::Approx(1.0));
    CHECK(stats::logistic(-800.0) == doctest::Approx(0.0));
    CHECK(stats::logistic(-800.0) >= 0.0);
}

TEST_CASE("brent finds an interior maximum") {
    auto f = [](double x) { return -(x - 1.3) * (x - 1.3); };
    CHECK(stats::brent_maximize(f, -10.0, 10.0) == doctest::Approx(1.3).epsilon(1e-7));
}

TEST_CASE("quantile interpolation matches hand values") {
    std::vector<double> v{1, 2, 3, 4};
    CHECK(stats::quantile_sorted(v, 0.5) == doctest::Approx(2.5));
    CHECK(stats::quantile_sorted(v, 0.25) == doctest::Approx(1.75));
    CHECK(stats::quantile_sorted(v, 0.0) == doctest::Approx(1.0));
    CHECK(stats::quantile_sorted(v, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("counter rng is deterministic and stream-independent") {
    rng::Rng a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

    rng::Rng parent(7);
    rng::Rng s1 = parent.stream("alpha");
    rng::Rng s2 = parent.stream("beta");
    CHECK(s1.next_u64() != s2.next_u64());

    // draws are unaffected by what happened on the parent
    rng::Rng p2(7);
    p2.next_u64();
    p2.next_u64();
    rng::Rng s1_again = p2.stream("alpha");
    rng::Rng s1_ref = rng::Rng(7).stream("alpha");
    CHECK(s1_again.next_u64() == s1_ref.next_u64());
}

TEST_CASE("rng uniform stays in the open interval and is balanced") {
    rng::Rng r(3);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("rng below covers the range uniformly") {
    rng::Rng r(11);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 50000; ++i) ++counts[static_cast<std::size_t>(r.below(10))];
    for (int c : counts) CHECK(c > 4500);
}

TEST_CASE("csv quoting round-trips awkward fields") {
    std::vector<std::string> fields{"plain", "with,comma", "with\"quote", ""};
    std::string line = csv::join(fields);
    CHECK(csv::split_line(line) == fields);
}

TEST_CASE("csv table reader finds columns") {
    std::istringstream in("a,b,c\n1,2,3\n4,5,6\n");
    auto table = csv::read(in);
    CHECK(table.column("b") == 1);
    CHECK(table.column("missing") == -1);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1][2] == "6");
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256::hex_digest("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256::hex_digest("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256::hex_digest(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("ks uniformity test accepts uniform and rejects skewed") {
    rng::Rng r(3);
    std::vector<double> uniform, skewed;
    for (int i = 0; i < 400; ++i) {
        double u = r.uniform();
        uniform.push_back(u);
        skewed.push_back(u * u);
    }
    CHECK(stats::ks_uniform_pvalue(uniform) > 0.01);
    CHECK(stats::ks_uniform_pvalue(skewed) < 1e-6);
}
