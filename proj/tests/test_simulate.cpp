#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcert/protocol.hpp"
#include "qcert/quantum.hpp"
#include "qcert/simulate.hpp"
#include "qcert/stattests.hpp"
#include "test_helpers.hpp"

using namespace qcert;
using namespace qcert::simulate;

namespace {

// Chi-square goodness of fit of observed counts against expected
// frequencies; bins with expectation below 5 are pooled into the tail.
double chi_square_gof_pvalue(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected) {
    double chi2 = 0.0;
    double pool_obs = 0.0, pool_exp = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double o = static_cast<double>(observed[i]), e = expected[i];
        if (e < 5.0) {
            pool_obs += o;
            pool_exp += e;
            continue;
        }
        chi2 += (o - e) * (o - e) / e;
        ++dof;
    }
    if (pool_exp > 0.0) {
        chi2 += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
        ++dof;
    }
    return stattests::gamma_q(dof / 2.0, chi2 / 2.0);
}

BitString make_seed_bits(std::uint64_t m, std::uint64_t rng_seed) {
    Rng rng = Rng(rng_seed).derive(1);
    return BitString::random(rng, protocol::seed_length(m) * 64);
}

}  // namespace

TEST_CASE("qubit bench model") {
    const auto model = qubit_experiment_model();
    CHECK(model.dim == 2);
    CHECK(std::abs(protocol::asymptotic_rate(model.p_x, 1.0) - 0.8575) < 1e-4);
    CHECK(std::abs(entropy::classical_min_entropy(model.p_z) - 0.99424) < 1e-5);

    // The attached state reproduces both Born vectors exactly.
    REQUIRE(model.rho.has_value());
    const auto r = quantum::density_to_bloch(*model.rho);
    CHECK(r.x == doctest::Approx(0.9946).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(0.0));
    CHECK(r.z == doctest::Approx(0.0040).epsilon(1e-12));
    CHECK(r.norm2() <= 1.0);

    const auto px = quantum::born_probabilities(*model.rho, quantum::fourier_basis_povm(2));
    const auto pz = quantum::born_probabilities(*model.rho, quantum::computational_basis_povm(2));
    CHECK(px[0] == doctest::Approx(model.p_x[0]).epsilon(1e-12));
    CHECK(pz[0] == doctest::Approx(model.p_z[0]).epsilon(1e-12));
}

TEST_CASE("ququart bench model") {
    const auto model = ququart_experiment_model();
    CHECK(model.dim == 4);
    CHECK(model.p_x[3] == doctest::Approx(0.00005).epsilon(1e-9));
    CHECK(std::abs(protocol::asymptotic_rate(model.p_x, 2.0) - 1.685) < 0.002);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) sum += model.p_z[i];
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("sample counts") {
    Rng rng(8);
    const auto sure = sample_counts(entropy::ProbVector({1.0, 0.0}), 100, rng);
    CHECK(sure[0] == 100);
    CHECK(sure[1] == 0);

    const auto none = sample_counts(entropy::ProbVector({0.5, 0.5}), 0, rng);
    CHECK(none.total() == 0);
}

TEST_CASE("sampled error counts follow the binomial law") {
    const auto model = qubit_experiment_model();
    const std::uint64_t n = 1000, draws = 100000;
    Rng rng(987);
    std::vector<std::uint64_t> hist(n + 1, 0);
    for (std::uint64_t rep = 0; rep < draws; ++rep) {
        Rng stream = rng.derive(rep);
        const auto counts = sample_counts(model.p_x, n, stream);
        ++hist[counts[1]];
    }
    auto expected = protocol::error_distribution(n, model.p_x);
    for (auto& e : expected) e *= static_cast<double>(draws);
    CHECK(chi_square_gof_pvalue(hist, expected) > 0.001);
}

TEST_CASE("sample run on a deterministic source") {
    const auto model = parse_model_spec("probs:1,0;1,0");
    Rng rng(5);
    const auto seed_bits = make_seed_bits(1000, 5);
    const auto run = sample_run(model, 1000, seed_bits, rng);
    CHECK(run.schedule.n_x == 32);
    CHECK(run.x_counts[0] == 32);
    CHECK(run.x_counts[1] == 0);
    CHECK(run.z_outcomes.size() == 968);
    for (const auto sym : run.z_outcomes) CHECK(sym == 0);
}

TEST_CASE("sample run is reproducible") {
    const auto model = qubit_experiment_model();
    const auto seed_bits = make_seed_bits(10000, 77);
    Rng rng_a(77), rng_b(77);
    const auto a = sample_run(model, 10000, seed_bits, rng_a);
    const auto b = sample_run(model, 10000, seed_bits, rng_b);
    CHECK(a.schedule.x_positions == b.schedule.x_positions);
    CHECK(a.z_outcomes == b.z_outcomes);
    CHECK(a.x_counts.values().size() == b.x_counts.values().size());
    for (std::size_t i = 0; i < a.x_counts.dim(); ++i) CHECK(a.x_counts[i] == b.x_counts[i]);
    CHECK(a.rng_algorithm == std::string("splitmix64ctr/v1"));
}

TEST_CASE("x count totals always match the schedule") {
    const auto model = qubit_experiment_model();
    Rng rng(13);
    for (const std::uint64_t m : {100ull, 257ull, 1024ull, 5000ull}) {
        const auto seed_bits = make_seed_bits(m, m);
        Rng stream = rng.derive(m);
        const auto run = sample_run(model, m, seed_bits, stream);
        CHECK(run.x_counts.total() == protocol::schedule_sizes(m).first);
        CHECK(run.z_outcomes.size() == run.schedule.n_z);
    }
}

TEST_CASE("sampled runs certify near the exact expectation") {
    const auto model = qubit_experiment_model();
    const std::uint64_t m = 10000;
    const auto exact = protocol::expected_rate_exact(m, model.p_x, 1.0);
    Rng rng(321);
    const int reps = 200;
    double mean = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng stream = rng.derive(static_cast<std::uint64_t>(rep));
        const auto seed_bits = make_seed_bits(m, 1000 + static_cast<std::uint64_t>(rep));
        const auto run = sample_run(model, m, seed_bits, stream);
        mean += protocol::certify(m, run.x_counts, 1.0).rate;
    }
    mean /= reps;
    CHECK(std::abs(mean - exact.mean) < 3.0 * exact.stddev / std::sqrt(double(reps)));
}

TEST_CASE("generation outcomes follow the model distribution") {
    const auto model = ququart_experiment_model();
    const std::uint64_t m = 100000;
    Rng rng(654);
    const auto run = sample_run(model, m, make_seed_bits(m, 654), rng);
    std::vector<std::uint64_t> hist(4, 0);
    for (const auto sym : run.z_outcomes) ++hist[sym];
    std::vector<double> expected(4);
    for (int i = 0; i < 4; ++i)
        expected[i] = model.p_z[i] * static_cast<double>(run.z_outcomes.size());
    CHECK(chi_square_gof_pvalue(hist, expected) > 0.001);
}

TEST_CASE("run container round trip") {
    const auto model = ququart_experiment_model();
    Rng rng(42);
    auto run = sample_run(model, 2000, make_seed_bits(2000, 42), rng);
    run.config_hash = 0xDEADBEEF;

    std::stringstream buf;
    write_run(run, buf);
    const auto back = read_run(buf);
    CHECK(back.schedule.m == run.schedule.m);
    CHECK(back.schedule.x_positions == run.schedule.x_positions);
    CHECK(back.z_outcomes == run.z_outcomes);
    CHECK(back.model_label == run.model_label);
    CHECK(back.rng_seed == run.rng_seed);
    CHECK(back.rng_algorithm == run.rng_algorithm);
    CHECK(back.config_hash == 0xDEADBEEF);
    CHECK(back.dim == 4);

    std::stringstream corrupt;
    corrupt << "NOTMAGIC" << buf.str().substr(8);
    CHECK_THROWS_AS(read_run(corrupt), std::runtime_error);

    std::stringstream truncated(buf.str().substr(0, 40));
    CHECK_THROWS_AS(read_run(truncated), std::runtime_error);
}

TEST_CASE("model spec parsing") {
    CHECK(parse_model_spec("qubit").label == "qubit");
    CHECK(parse_model_spec("ququart").dim == 4);

    const auto custom = parse_model_spec("bloch:0.5,0.1,0.2");
    CHECK(custom.dim == 2);
    CHECK(custom.rho.has_value());
    CHECK(custom.p_x[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(custom.p_z[0] == doctest::Approx(0.6).epsilon(1e-12));

    const auto probs = parse_model_spec("probs:0.9,0.1;0.5,0.5");
    CHECK(probs.dim == 2);
    CHECK(!probs.rho.has_value());
    const auto bloch = model_bloch(probs);
    CHECK(bloch.x == doctest::Approx(0.8));
    CHECK(bloch.y == doctest::Approx(0.0));
    CHECK(bloch.z == doctest::Approx(0.0));

    CHECK_THROWS_AS(parse_model_spec("bloch:1,1,1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model_spec("probs:0.9,0.1;0.5,0.4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model_spec("probs:0.9,0.1;0.3,0.3,0.4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model_spec("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(model_bloch(parse_model_spec("ququart")), std::invalid_argument);
}
