#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "streamx/channel.hpp"
#include "streamx/io.hpp"
#include "streamx/stats.hpp"
#include "support.hpp"

using namespace streamx;
namespace ts = testsupport;

namespace {
std::vector<std::size_t> seq(std::initializer_list<std::size_t> v) { return v; }
}  // namespace

TEST_CASE("Dmc validation") {
    CHECK_THROWS_AS(Dmc(2, 2, {0.5, 0.6, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Dmc(2, 2, {1.1, -0.1, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Dmc(2, 2, {0.5, 0.5, 0.5}), std::invalid_argument);
    CHECK_NOTHROW(Dmc::bsc(0.11));
    CHECK_THROWS_AS(InputDistribution({0.5, 0.6}), std::invalid_argument);
}

TEST_CASE("information density on BSC") {
    const auto w = Dmc::bsc(0.1);
    const auto p = InputDistribution::uniform(2);
    const auto x1 = seq({0}), y1 = seq({0});
    CHECK(information_density(p, w, x1, y1) == doctest::Approx(std::log2(0.9 / 0.5)).epsilon(1e-12));
    CHECK(information_density(p, w, x1, y1) == doctest::Approx(0.8480).epsilon(1e-4));

    // ratio 1 when W(y|x) = PW(y)
    const auto half = Dmc::bsc(0.5);
    CHECK(information_density(p, half, x1, y1) == doctest::Approx(0.0));

    // additivity over symbols
    const auto x2 = seq({0, 0}), y2 = seq({0, 0});
    CHECK(information_density(p, w, x2, y2) ==
          doctest::Approx(2.0 * information_density(p, w, x1, y1)).epsilon(1e-12));

    // -inf sentinel when a transition is impossible but the output is reachable
    const auto z = Dmc::z_channel(0.3);
    const auto x0 = seq({0}), yb = seq({1});
    CHECK(information_density(p, z, x0, yb) == -infinity());

    // impossible output under P is an error
    const auto pm = InputDistribution::point_mass(2, 0);
    CHECK_THROWS_AS(information_density(pm, Dmc::identity(2), x0, yb), std::invalid_argument);
    CHECK_THROWS_AS(information_density(p, w, seq({}), seq({})), std::invalid_argument);
    CHECK_THROWS_AS(information_density(p, w, seq({0, 0}), seq({0})), std::invalid_argument);
}

TEST_CASE("mutual information") {
    const auto p = InputDistribution::uniform(2);
    CHECK(mutual_information(p, Dmc::bsc(0.1)) == doctest::Approx(0.531004).epsilon(1e-5));
    CHECK(mutual_information(InputDistribution::point_mass(2, 1), Dmc::bsc(0.1)) ==
          doctest::Approx(0.0));
    CHECK(mutual_information(InputDistribution::uniform(4), Dmc::identity(4)) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("information variances") {
    const auto p = InputDistribution::uniform(2);
    auto uv = information_variances(p, Dmc::bsc(0.5));
    CHECK(uv.unconditional == doctest::Approx(0.0));
    CHECK(uv.conditional == doctest::Approx(0.0));

    uv = information_variances(InputDistribution::uniform(3), Dmc::identity(3));
    CHECK(uv.unconditional == doctest::Approx(0.0));
    CHECK(uv.conditional == doctest::Approx(0.0));

    uv = information_variances(p, Dmc::bsc(0.11));
    const double nu = ts::bsc_dispersion(0.11);
    CHECK(uv.unconditional == doctest::Approx(nu).epsilon(1e-10));
    CHECK(uv.conditional == doctest::Approx(nu).epsilon(1e-10));
    CHECK(uv.unconditional == doctest::Approx(0.8907).epsilon(2e-4));
}

TEST_CASE("capacity solver") {
    auto c = capacity(Dmc::bsc(0.0), 1e-9);
    CHECK(c.capacity_bits == doctest::Approx(1.0).epsilon(1e-12));
    c = capacity(Dmc::bsc(0.5), 1e-9);
    CHECK(c.capacity_bits == doctest::Approx(0.0));
    c = capacity(Dmc::bsc(0.11), 1e-9);
    CHECK(c.capacity_bits == doctest::Approx(ts::bsc_capacity(0.11)).epsilon(1e-8));
    CHECK(std::fabs(c.capacity_bits - 0.5001) < 1e-3);
    CHECK(c.gap <= 1e-9);
    CHECK(mutual_information(c.input, Dmc::bsc(0.11)) >= c.capacity_bits - 1e-9);
    CHECK_THROWS_AS(capacity(Dmc::bsc(0.11), -1.0), std::invalid_argument);
}

TEST_CASE("dispersion") {
    CHECK(dispersion(Dmc::bsc(0.5)).dispersion_bits2 == doctest::Approx(0.0));
    CHECK(dispersion(Dmc::bec(0.5)).dispersion_bits2 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(dispersion(Dmc::bsc(0.11)).dispersion_bits2 ==
          doctest::Approx(ts::bsc_dispersion(0.11)).epsilon(1e-9));
    CHECK(std::fabs(dispersion(Dmc::bsc(0.11)).dispersion_bits2 - 0.8907) < 1e-3);

    // asymmetric path returns a feasible input and a value no larger than
    // V at the capacity solver's input
    const auto z = Dmc::z_channel(0.3);
    const auto r = dispersion(z, 1e-9);
    CHECK_FALSE(r.used_symmetry);
    const auto cap = capacity(z, 1e-9);
    CHECK(mutual_information(r.input, z) >= cap.capacity_bits - 1e-9);
    CHECK(r.dispersion_bits2 <= information_variances(cap.input, z).conditional + 1e-12);
}

TEST_CASE("output symmetry") {
    for (double p : {0.0, 0.11, 0.3, 0.5}) {
        const auto s = output_symmetry(Dmc::bsc(p));
        CHECK(s.symmetric);
        REQUIRE(s.partition.size() == 1);
        CHECK(s.partition[0] == std::vector<std::size_t>{0, 1});
    }
    const auto s = output_symmetry(Dmc::bec(0.5));
    CHECK(s.symmetric);
    REQUIRE(s.partition.size() == 2);
    CHECK(s.partition[0] == std::vector<std::size_t>{0, 1});
    CHECK(s.partition[1] == std::vector<std::size_t>{2});

    CHECK_FALSE(output_symmetry(Dmc::z_channel(0.25)).symmetric);
    CHECK(output_symmetry(Dmc::identity(3)).symmetric);
}

TEST_CASE("divergences") {
    const auto v = Dmc::bsc(0.2), w = Dmc::bsc(0.1);
    const auto p = InputDistribution::uniform(2);
    CHECK(conditional_kl(w, w, p) == doctest::Approx(0.0));
    CHECK(kl_row(w, w, 0) == doctest::Approx(0.0));

    const double expected = 0.2 * std::log2(0.2 / 0.1) + 0.8 * std::log2(0.8 / 0.9);
    CHECK(expected == doctest::Approx(0.064060).epsilon(1e-4));
    CHECK(kl_row(v, w, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(kl_row(v, w, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(conditional_kl(v, w, p) == doctest::Approx(expected).epsilon(1e-12));

    // support escape
    CHECK(kl_row(Dmc::bsc(0.2), Dmc::z_channel(0.0), 1) == infinity());
}

TEST_CASE("invariant: I(P,W) <= C within tol, bounded by H(P) and log|Y|") {
    const double tol = 1e-7;
    int checked = 0;
    for (std::uint64_t cs = 0; cs < 20; ++cs) {
        const std::size_t nx = 2 + (cs % 2), ny = 2 + (cs % 3);
        const auto w = ts::random_channel(cs, nx, ny);
        const auto cap = capacity(w, tol);
        for (std::uint64_t ps = 0; ps < 50; ++ps) {
            const auto p = ts::random_input(cs * 100 + ps, nx);
            const double mi = mutual_information(p, w);
            CHECK(mi >= 0.0);
            CHECK(mi <= entropy_bits(p) + 1e-12);
            CHECK(mi <= std::log2(static_cast<double>(ny)) + 1e-12);
            CHECK(mi <= cap.capacity_bits + tol);
            ++checked;
        }
    }
    CHECK(checked == 1000);
}

TEST_CASE("invariant: U >= V, equality at capacity input") {
    for (std::uint64_t cs = 0; cs < 30; ++cs) {
        const std::size_t nx = 2 + (cs % 3), ny = 2 + ((cs + 1) % 3);
        const auto w = ts::random_channel(cs + 1000, nx, ny);
        for (std::uint64_t ps = 0; ps < 10; ++ps) {
            const auto p = ts::random_input(cs * 31 + ps, nx);
            const auto uv = information_variances(p, w);
            CHECK(uv.unconditional >= uv.conditional - 1e-12);
        }
        const double tol = 1e-10;
        const auto cap = capacity(w, tol);
        const auto uv = information_variances(cap.input, w);
        CHECK(std::fabs(uv.unconditional - uv.conditional) <= 10 * std::sqrt(tol));
    }
}

TEST_CASE("invariant: conditional KL nonnegative, zero iff equal on support") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto v = ts::random_channel(2000 + s, 3, 3);
        const auto w = ts::random_channel(3000 + s, 3, 3);
        const auto p = ts::random_input(4000 + s, 3);
        const double d = conditional_kl(v, w, p);
        CHECK(d >= 0.0);
        CHECK(conditional_kl(v, v, p) == doctest::Approx(0.0));
        double max_entry_diff = 0.0;
        for (std::size_t x = 0; x < 3; ++x)
            for (std::size_t y = 0; y < 3; ++y)
                max_entry_diff = std::max(max_entry_diff, std::fabs(v(x, y) - w(x, y)));
        if (d == 0.0) CHECK(max_entry_diff < 1e-9);
    }
}

TEST_CASE("invariant: symmetric dispersion equals V at uniform") {
    for (double p : {0.05, 0.11, 0.25, 0.4}) {
        const auto w = Dmc::bsc(p);
        const auto r = dispersion(w, 1e-9);
        CHECK(r.used_symmetry);
        CHECK(r.dispersion_bits2 ==
              doctest::Approx(information_variances(InputDistribution::uniform(2), w).conditional)
                  .epsilon(1e-12));
    }
}

TEST_CASE("channel json round trip and spec strings") {
    const auto w = Dmc::bec(0.4);
    const auto j = io::dmc_to_json(w);
    const auto back = io::dmc_from_json(j);
    CHECK(back.input_size() == w.input_size());
    CHECK(back.output_size() == w.output_size());
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 3; ++y) CHECK(back(x, y) == w(x, y));

    CHECK(io::parse_channel_spec("bsc:0.11")(0, 1) == doctest::Approx(0.11));
    CHECK(io::parse_channel_spec("bec:0.5")(0, 2) == doctest::Approx(0.5));
    CHECK(io::parse_channel_spec("zchan:0.25")(1, 0) == doctest::Approx(0.25));
    CHECK(io::parse_channel_spec("identity:4").input_size() == 4);
    CHECK_THROWS_AS(io::parse_channel_spec("foo:1"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_channel_spec("no_such_file.json"), std::invalid_argument);
}

TEST_CASE("summarize") {
    const auto s = summarize(Dmc::bsc(0.11), 1e-9);
    CHECK(s.output_symmetric);
    CHECK(s.capacity_bits == doctest::Approx(ts::bsc_capacity(0.11)).epsilon(1e-8));
    CHECK(s.dispersion_bits2 == doctest::Approx(ts::bsc_dispersion(0.11)).epsilon(1e-9));
    CHECK(s.solver_tolerance == 1e-9);
    CHECK(s.capacity_bits <= std::log2(2.0));
}

TEST_CASE("clopper-pearson closed forms") {
    const auto zero = stats::clopper_pearson(0, 1000);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.025, 1.0 / 1000.0)).epsilon(1e-6));
    CHECK(zero.hi == doctest::Approx(0.003682).epsilon(1e-3));

    const auto all = stats::clopper_pearson(1000, 1000);
    CHECK(all.hi == 1.0);
    CHECK(all.lo == doctest::Approx(std::pow(0.025, 1.0 / 1000.0)).epsilon(1e-6));

    // symmetric interval contains the truth for a calibrated case
    const auto mid = stats::clopper_pearson(500, 1000);
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);
    CHECK(stats::betainc(2.0, 3.0, 0.5) == doctest::Approx(0.6875).epsilon(1e-10));
}
