#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcert/entropy.hpp"
#include "qcert/quantum.hpp"
#include "qcert/tomo.hpp"
#include "test_helpers.hpp"

using namespace qcert;
using namespace qcert::tomo;

TEST_CASE("transverse-plane bound") {
    CHECK(fiorentino_bound(0.0, 0.0) == doctest::Approx(0.0));
    CHECK(fiorentino_bound(0.6, 0.8) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fiorentino_bound(0.004, 0.0) == doctest::Approx(up_bound_rx(0.004)).epsilon(1e-15));
    CHECK_THROWS_AS(fiorentino_bound(0.9, 0.9), std::invalid_argument);
}

TEST_CASE("single-axis bound and its max-entropy identity") {
    CHECK(up_bound_rx(1.0) == doctest::Approx(1.0));
    CHECK(up_bound_rx(0.0) == doctest::Approx(0.0));
    for (double rx = 0.0; rx < 0.995; rx += 0.1) {
        const entropy::ProbVector p({(1.0 + rx) / 2, (1.0 - rx) / 2});
        CHECK(std::abs(up_bound_rx(rx) - (1.0 - entropy::max_entropy_half(p))) < 1e-12);
    }
    CHECK_THROWS_AS(up_bound_rx(1.5), std::invalid_argument);
}

TEST_CASE("two-basis bound dominates the single-axis bound") {
    for (double rx = -0.9; rx <= 0.9; rx += 0.3) {
        for (double ry = -0.4; ry <= 0.4; ry += 0.2) {
            if (rx * rx + ry * ry > 1.0) continue;
            const double two = fiorentino_bound(rx, ry);
            const double one = up_bound_rx(rx);
            CHECK(two >= one - 1e-15);
            if (std::abs(ry) > 1e-9) CHECK(two > one);
        }
    }
}

TEST_CASE("bloch component estimator") {
    CHECK(estimate_r(0, 0) == doctest::Approx(0.0));
    CHECK(estimate_r(100, 0) == doctest::Approx(100.0 / 102.0).epsilon(1e-15));
    CHECK(estimate_r(37, 37) == doctest::Approx(0.0));
    Rng rng(21);
    for (int rep = 0; rep < 100; ++rep) {
        const auto n0 = rng.below(1000), n1 = rng.below(1000);
        CHECK(std::abs(estimate_r(n0, n1)) < 1.0);
    }
}

TEST_CASE("tomographic seed length") {
    CHECK(tomo_seed_length(16) == 22);  // 2 ceil(log2 C(16,4)) = 2 * 11
    CHECK(tomo_seed_length(4) == 6);    // 2 ceil(log2 6)
    CHECK_THROWS_AS(tomo_seed_length(3), std::invalid_argument);

    // Tomography reserves about twice the control budget.
    for (const std::uint64_t m : {100ull, 1000ull, 10000ull, 100000ull, 1000000ull}) {
        CHECK(tomo_seed_length(m) > protocol::seed_length(m));
    }
}

TEST_CASE("tomographic schedule bookkeeping") {
    for (const std::uint64_t m : {4ull, 16ull, 17ull, 100ull, 1001ull, 999983ull}) {
        const auto s = tomo_schedule(m);
        CHECK(s.n_x == s.n_y);
        CHECK(s.n_z + 2 * s.n_x == m);
    }
}

TEST_CASE("tomographic rate") {
    // No information in the counts: only the seed cost remains.
    const auto s100 = tomo_schedule(100);
    const std::uint64_t k = s100.n_x / 2;
    const double flat = tomo_rate(100, TomoCounts{k, s100.n_x - k, k, s100.n_y - k});
    CHECK(flat < 0.0);

    // Pure equatorial source with clean counts at huge m pushes the rate
    // toward one.
    const std::uint64_t m_big = 10000000000ull;
    const auto sbig = tomo_schedule(m_big);
    const std::uint64_t half = sbig.n_y / 2;
    const double r = tomo_rate(m_big, TomoCounts{sbig.n_x, 0, half, sbig.n_y - half});
    CHECK(r > 0.95);
    CHECK(r < 1.0);

    // Norm overflow from sampling noise is rescaled, not rejected.
    const double over = tomo_rate(100, TomoCounts{s100.n_x, 0, s100.n_y, 0});
    CHECK(over > 0.0);

    CHECK_THROWS_AS(tomo_rate(100, TomoCounts{1, 2, 3, 4}), std::invalid_argument);
}

TEST_CASE("pure states saturate the classical min entropy") {
    Rng rng(31415);
    for (int rep = 0; rep < 100; ++rep) {
        // Random pure qubit: uniform direction on the sphere.
        const double u = 2.0 * rng.next_double() - 1.0;
        const double phi = 2.0 * 3.14159265358979323846 * rng.next_double();
        const double s = std::sqrt(1.0 - u * u);
        const quantum::BlochVector r{s * std::cos(phi), s * std::sin(phi), u};

        const auto rho = quantum::bloch_to_density(r);
        const auto pz = quantum::born_probabilities(rho, quantum::computational_basis_povm(2));
        CHECK(std::abs(fiorentino_bound(r.x, r.y) - entropy::classical_min_entropy(pz)) < 1e-12);
    }
}

TEST_CASE("exact tomographic mean matches monte carlo") {
    const quantum::BlochVector src{0.9, 0.05, std::sqrt(1.0 - 0.81 - 0.0025)};
    const std::uint64_t m = 2000;
    const auto exact = tomo_expected_rate_exact(m, src);
    const std::uint64_t grid[] = {m};
    const auto rows = compare_sweep(src, grid, 20000, Rng(5150), 2);
    const double se = rows[0].tomo_std / std::sqrt(20000.0);
    CHECK(std::abs(rows[0].tomo_mean - exact.mean) < 3.0 * se);
}

TEST_CASE("compare sweep is deterministic and well-formed") {
    const quantum::BlochVector src{0.9946, 0.0, 0.0040};
    const std::uint64_t grid[] = {100, 1000};
    const auto a = compare_sweep(src, grid, 50, Rng(9), 1);
    const auto b = compare_sweep(src, grid, 50, Rng(9), 2);
    REQUIRE(a.size() == 2);
    CHECK(a[0].up_mean == b[0].up_mean);
    CHECK(a[1].tomo_mean == b[1].tomo_mean);

    const auto csv = compare_csv(a);
    CHECK(csv.rfind("m,up_mean,up_std,tomo_mean,tomo_std\n", 0) == 0);
    std::istringstream is(csv);
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 3);

    CHECK_THROWS_AS(compare_sweep({1.2, 0.0, 0.0}, grid, 10, Rng(1), 1),
                    std::invalid_argument);
}

TEST_CASE("both protocols lose money at tiny m") {
    // Seed cost dominates below m ~ 50 regardless of the source.
    const quantum::BlochVector pure{0.9947, 0.1027419583227807, 0.004};
    for (const std::uint64_t m : {20ull, 30ull, 40ull}) {
        CHECK(protocol::expected_rate_exact(
                  m, entropy::ProbVector({(1 + pure.x) / 2, (1 - pure.x) / 2}), 1.0)
                  .mean < 0.0);
        CHECK(tomo_expected_rate_exact(m, pure).mean < 0.0);
    }
}

TEST_CASE("matched transverse purity makes the asymptotes coincide") {
    // r_y = 0 at purity ~0.995: both protocols share the same asymptotic
    // bound, exactly.
    const double rx = 0.9947;
    CHECK(std::abs(fiorentino_bound(rx, 0.0) - up_bound_rx(rx)) < 1e-9);
}
