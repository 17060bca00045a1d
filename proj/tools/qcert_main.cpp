// qcert command-line front end: simulate | certify | extract | sweep |
// compare-tomo | stats | selftest.  Exit codes: 0 success, 2 the run
// certifies nothing, 3 input error, 4 selftest failure.

#include <CLI11.hpp>

#include <omp.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcert/extract.hpp"
#include "qcert/protocol.hpp"
#include "qcert/quantum.hpp"
#include "qcert/simulate.hpp"
#include "qcert/stattests.hpp"
#include "qcert/tomo.hpp"
#include "qcert/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertifiesNothing = 2;
constexpr int kExitInputError = 3;
constexpr int kExitSelftestFailure = 4;

int default_workers() {
    if (const char* env = std::getenv("QCERT_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return omp_get_max_threads();
}

std::vector<std::uint64_t> parse_grid(const std::string& spec) {
    std::vector<std::uint64_t> grid;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const double v = std::stod(tok);
        if (v < 2.0 || v != std::floor(v))
            throw std::invalid_argument("m grid entries must be integers >= 2");
        grid.push_back(static_cast<std::uint64_t>(v));
    }
    if (grid.empty()) throw std::invalid_argument("empty m grid");
    return grid;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << body;
    if (!os) throw std::runtime_error("write failure on " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string csv_preamble(const std::string& schema, const std::string& config_line,
                         std::uint64_t config_hash) {
    std::ostringstream os;
    os << "# schema: " << schema << "\n";
    os << "# tool: " << qcert::kToolVersion << "\n";
    os << "# config: " << config_line << "\n";
    os << "# config_hash: 0x" << std::hex << config_hash << std::dec << "\n";
    return os.str();
}

struct SimulateOpts {
    std::string model = "qubit";
    std::uint64_t m = 1'000'000;
    std::uint64_t rng_seed = 1;
    std::string seed_file;
    std::string out = "run.qcrun";
};

int cmd_simulate(const SimulateOpts& opt) {
    const auto model = qcert::simulate::parse_model_spec(opt.model);
    const qcert::Rng rng(opt.rng_seed);

    qcert::BitString seed_bits;
    std::string seed_source;
    if (!opt.seed_file.empty()) {
        seed_bits = qcert::extract::read_seed_file(opt.seed_file);
        seed_source = "file:" + opt.seed_file;
    } else {
        // 64 blocks of t(m) bits: every block accepts with probability above
        // 1/2, so a derived seed of this size fails to yield a schedule with
        // probability below 2^-64.
        const std::uint64_t t = qcert::protocol::seed_length(opt.m);
        qcert::Rng seed_rng = rng.derive(1);
        seed_bits = qcert::BitString::random(seed_rng, t * 64);
        seed_source = "derived";
    }

    std::ostringstream cfg;
    cfg << "cmd=simulate model=" << opt.model << " m=" << opt.m << " rng_seed=" << opt.rng_seed
        << " seed=" << seed_source;
    const std::uint64_t config_hash = qcert::fnv1a64(cfg.str());

    qcert::Rng draw_rng = rng.derive(2);
    auto run = qcert::simulate::sample_run(model, opt.m, seed_bits, draw_rng);
    run.rng_seed = opt.rng_seed;
    run.config_hash = config_hash;
    qcert::simulate::write_run_file(run, opt.out);

    std::cout << "wrote " << opt.out << " (m=" << run.schedule.m << ", n_x=" << run.schedule.n_x
              << ", d=" << run.dim << ", model=" << run.model_label << ")\n";
    return kExitOk;
}

struct CertifyOpts {
    std::string run_file;
    double q = 0.0;  // 0 = use log2(d) of the run
    std::string out = "certificate.txt";
};

int cmd_certify(const CertifyOpts& opt) {
    const auto run = qcert::simulate::read_run_file(opt.run_file);
    const double q = opt.q > 0.0 ? opt.q : std::log2(static_cast<double>(run.dim));
    const auto cert = qcert::protocol::certify(run.schedule.m, run.x_counts, q);

    std::ostringstream body;
    body << "# tool: " << qcert::kToolVersion << "\n";
    body << "# config_hash: 0x" << std::hex << run.config_hash << std::dec << "\n";
    body << qcert::protocol::certificate_to_text(cert);
    write_text_file(opt.out, body.str());

    std::cout << "m=" << cert.m << " n_x=" << cert.n_x << " q=" << cert.q
              << " H_half_estimate=" << cert.h_half_estimate
              << " bound=" << cert.min_entropy_bound << " seed_cost=" << cert.seed_cost_bits
              << " b_sec=" << cert.b_sec << " rate=" << cert.rate << "\n";
    std::cout << "wrote " << opt.out << "\n";
    if (!(cert.b_sec > 0.0)) {
        std::cout << "certificate is non-positive: this run certifies nothing; "
                     "no true random bits can be extracted\n";
        return kExitCertifiesNothing;
    }
    return kExitOk;
}

struct ExtractOpts {
    std::string run_file;
    std::string cert_file;
    std::string extractor_seed_file;
    std::uint64_t rng_seed = 1;
    int epsilon_exp = 0;
    std::string out = "random.qcbits";
};

int cmd_extract(const ExtractOpts& opt) {
    const auto run = qcert::simulate::read_run_file(opt.run_file);
    const auto cert = qcert::protocol::certificate_from_text(read_text_file(opt.cert_file));
    if (!(cert.b_sec > 0.0)) {
        std::cerr << "refusing to extract: the certificate grants no certified bits\n";
        return kExitCertifiesNothing;
    }

    const auto input = qcert::extract::serialize_outcomes(run);
    const std::uint64_t ell = qcert::extract::output_length(cert.b_sec, opt.epsilon_exp);
    if (ell == 0) {
        std::cerr << "nothing to extract: certified budget is zero after the security margin\n";
        return kExitCertifiesNothing;
    }

    qcert::extract::ToeplitzSeed seed;
    if (!opt.extractor_seed_file.empty()) {
        seed.bits = qcert::extract::read_seed_file(opt.extractor_seed_file);
        if (seed.bits.size() != input.size() + ell - 1) {
            std::cerr << "extractor seed must have exactly n + ell - 1 = "
                      << input.size() + ell - 1 << " bits (got " << seed.bits.size() << ")\n";
            return kExitInputError;
        }
    } else {
        qcert::Rng rng = qcert::Rng(opt.rng_seed).derive(3);
        seed.bits = qcert::BitString::random(rng, input.size() + ell - 1);
    }

    std::ostringstream cfg;
    cfg << "cmd=extract run=" << opt.run_file << " cert=" << opt.cert_file
        << " epsilon_exp=" << opt.epsilon_exp;
    const auto y = qcert::extract::extract_run(run, cert, seed, opt.epsilon_exp);
    qcert::extract::write_bits_file(y, opt.out, qcert::fnv1a64(cfg.str()));
    std::cout << "extracted " << y.size() << " bits -> " << opt.out << "\n";
    return kExitOk;
}

struct SweepOpts {
    std::string model = "qubit";
    std::string m_grid = "100,1000,10000,100000,1000000";
    std::uint64_t reps = 200;
    std::uint64_t rng_seed = 1;
    int workers = 0;
    std::string out = "sweep.csv";
};

int cmd_sweep(const SweepOpts& opt) {
    const auto model = qcert::simulate::parse_model_spec(opt.model);
    const auto grid = parse_grid(opt.m_grid);
    const double q = std::log2(static_cast<double>(model.dim));
    const double h_inf = qcert::entropy::classical_min_entropy(model.p_z);
    const int workers = opt.workers > 0 ? opt.workers : default_workers();

    std::ostringstream cfg;
    cfg << "cmd=sweep model=" << opt.model << " m_grid=" << opt.m_grid << " reps=" << opt.reps
        << " rng_seed=" << opt.rng_seed << " workers=" << workers;

    std::ostringstream body;
    body << csv_preamble("qcert-sweep-csv/v1", cfg.str(), qcert::fnv1a64(cfg.str()));
    body << "m,mean_rate,std_rate,classical_min_entropy\n";
    body.precision(9);
    const qcert::Rng rng(opt.rng_seed);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto stats = qcert::protocol::expected_rate_montecarlo(
            grid[gi], model.p_x, q, opt.reps, rng.derive(gi), workers);
        body << grid[gi] << ',' << stats.mean << ',' << stats.stddev << ',' << h_inf << '\n';
    }
    write_text_file(opt.out, body.str());
    std::cout << "wrote " << opt.out << "\n";
    return kExitOk;
}

struct CompareOpts {
    std::string model = "bloch:0.9947,0.1027419583227807,0.004";
    std::string m_grid = "1000,10000,100000,1000000";
    std::uint64_t reps = 200;
    std::uint64_t rng_seed = 1;
    int workers = 0;
    std::string out = "compare.csv";
};

int cmd_compare_tomo(const CompareOpts& opt) {
    const auto model = qcert::simulate::parse_model_spec(opt.model);
    if (model.dim != 2) {
        std::cerr << "compare-tomo supports d = 2 models only\n";
        return kExitInputError;
    }
    const auto bloch = qcert::simulate::model_bloch(model);
    const auto grid = parse_grid(opt.m_grid);
    const int workers = opt.workers > 0 ? opt.workers : default_workers();

    std::ostringstream cfg;
    cfg << "cmd=compare-tomo model=" << opt.model << " m_grid=" << opt.m_grid
        << " reps=" << opt.reps << " rng_seed=" << opt.rng_seed << " workers=" << workers;

    const auto rows =
        qcert::tomo::compare_sweep(bloch, grid, opt.reps, qcert::Rng(opt.rng_seed), workers);
    std::string body = csv_preamble("qcert-compare-csv/v1", cfg.str(), qcert::fnv1a64(cfg.str()));
    body += qcert::tomo::compare_csv(rows);
    write_text_file(opt.out, body);
    std::cout << "wrote " << opt.out << "\n";
    return kExitOk;
}

struct StatsOpts {
    std::string bits_file;
    std::string out = "stats.csv";
};

int cmd_stats(const StatsOpts& opt) {
    const auto bits = qcert::extract::read_bits_file(opt.bits_file);
    const auto result = qcert::stattests::battery(bits);

    std::ostringstream cfg;
    cfg << "cmd=stats bits=" << opt.bits_file;
    std::string body = csv_preamble("qcert-stats-csv/v1", cfg.str(), qcert::fnv1a64(cfg.str()));
    body += qcert::stattests::reports_csv(result.reports);
    write_text_file(opt.out, body);

    const char* verdict = result.summary == qcert::stattests::Verdict::Pass   ? "pass"
                          : result.summary == qcert::stattests::Verdict::Warn ? "warn"
                                                                              : "fail";
    for (const auto& r : result.reports)
        std::cout << r.name << ": statistic=" << r.statistic << " p=" << r.p_value << "\n";
    std::cout << "battery summary: " << verdict << " (wrote " << opt.out << ")\n";
    std::cout << "note: statistical tests bound classical defects only; they do not "
                 "certify independence from quantum side information\n";
    return kExitOk;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        for (int d = 2; d <= 16; ++d) {
            const auto ov = qcert::quantum::overlap_c(qcert::quantum::computational_basis_povm(d),
                                                      qcert::quantum::fourier_basis_povm(d));
            ok = ok && std::abs(ov.c - 1.0 / d) < 1e-12 && std::abs(ov.q - std::log2(d)) < 1e-12;
        }
        check("mub overlap c=1/d, q=log2 d (d=2..16)", ok);
    }

    {
        const double h = qcert::entropy::bayesian_h_half(qcert::entropy::CountsVector({0, 0}));
        check("bayesian prior fixture 0.830075", std::abs(h - 0.8300749985576876) < 1e-12);
    }

    {
        bool ok = true;
        for (std::uint64_t m = 1; m <= 12 && ok; ++m) {
            for (std::uint64_t k = 0; k <= m && ok; ++k) {
                const mpz_class total = qcert::protocol::binomial(m, k);
                for (mpz_class i = 0; i < total; ++i) {
                    const auto combo = qcert::protocol::unrank_combination(i, m, k);
                    if (qcert::protocol::rank_combination(combo, m, k) != i) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        check("combination rank/unrank bijection (m <= 12)", ok);
    }

    {
        // All 64 seeds of length 2 t(4): 6 subsets hit exactly 10 times each,
        // 4 seeds exhaust without acceptance.
        std::array<int, 6> hits{};
        int errors = 0;
        for (unsigned v = 0; v < 64; ++v) {
            qcert::BitString seed(6);
            for (unsigned b = 0; b < 6; ++b) seed.set_bit(b, (v >> (5 - b)) & 1);
            try {
                const auto draw = qcert::protocol::seed_to_schedule(seed, 4);
                const auto idx =
                    qcert::protocol::rank_combination(draw.schedule.x_positions, 4, 2);
                ++hits[idx.get_ui()];
            } catch (const std::exception&) {
                ++errors;
            }
        }
        bool ok = errors == 4;
        for (const int h : hits) ok = ok && h == 10;
        check("seed_to_schedule exact uniformity (m=4)", ok);
    }

    {
        const std::uint64_t n = 6, ell = 3, slen = n + ell - 1;
        bool ok = true;
        for (std::uint64_t x = 1; x < (1u << n) && ok; ++x) {
            std::uint64_t collisions = 0;
            for (std::uint64_t sv = 0; sv < (1u << slen); ++sv) {
                qcert::extract::ToeplitzSeed seed;
                seed.bits = qcert::BitString(slen);
                for (std::uint64_t b = 0; b < slen; ++b) seed.bits.set_bit(b, (sv >> b) & 1);
                qcert::BitString in(n);
                for (std::uint64_t b = 0; b < n; ++b) in.set_bit(b, (x >> b) & 1);
                if (qcert::extract::toeplitz_hash(in, ell, seed).ones() == 0) ++collisions;
            }
            ok = collisions * (1u << ell) <= (1u << slen);
        }
        check("toeplitz two-universality (n=6, ell=3)", ok);
    }

    {
        const auto model = qcert::simulate::qubit_experiment_model();
        qcert::Rng rng(424242);
        const auto counts = qcert::simulate::sample_counts(model.p_x, 100000, rng);
        const double h = qcert::entropy::bayesian_h_half(counts);
        const double truth = qcert::entropy::max_entropy_half(model.p_x);
        check("bayesian estimate within 0.01 at n=1e5", std::abs(h - truth) < 0.01);
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? kExitOk : kExitSelftestFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertainty-certified quantum random number generation toolkit"};
    app.set_config("--config", "", "read defaults from a key=value file");
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "sample one run of the source");
    c_sim->add_option("--model", sim.model, "qubit | ququart | bloch:rx,ry,rz | probs:p;P");
    c_sim->add_option("--m", sim.m, "total number of measurements");
    c_sim->add_option("--rng-seed", sim.rng_seed, "deterministic generator seed");
    c_sim->add_option("--seed-file", sim.seed_file, "protocol seed bits (raw packed file)");
    c_sim->add_option("--out", sim.out, "run container path");

    CertifyOpts cert;
    auto* c_cert = app.add_subcommand("certify", "certify a recorded run");
    c_cert->add_option("--run", cert.run_file, "run container path")->required();
    c_cert->add_option("--q", cert.q, "measurement incompatibility (default log2 d)");
    c_cert->add_option("--out", cert.out, "certificate path");

    ExtractOpts ext;
    auto* c_ext = app.add_subcommand("extract", "hash a run down to certified bits");
    c_ext->add_option("--run", ext.run_file, "run container path")->required();
    c_ext->add_option("--cert", ext.cert_file, "certificate path")->required();
    c_ext->add_option("--extractor-seed", ext.extractor_seed_file,
                      "Toeplitz seed bits (raw packed file)");
    c_ext->add_option("--rng-seed", ext.rng_seed, "seed for a derived extractor seed");
    c_ext->add_option("--epsilon-exp", ext.epsilon_exp, "security exponent (bits)");
    c_ext->add_option("--out", ext.out, "output bit container path");

    SweepOpts sweep;
    auto* c_sweep = app.add_subcommand("sweep", "rate curve over an m grid");
    c_sweep->add_option("--model", sweep.model);
    c_sweep->add_option("--m-grid", sweep.m_grid, "comma-separated m values");
    c_sweep->add_option("--reps", sweep.reps);
    c_sweep->add_option("--rng-seed", sweep.rng_seed);
    c_sweep->add_option("--workers", sweep.workers, "thread count (default $QCERT_WORKERS)");
    c_sweep->add_option("--out", sweep.out);

    CompareOpts cmp;
    auto* c_cmp = app.add_subcommand("compare-tomo", "rate comparison vs tomographic bound");
    c_cmp->add_option("--model", cmp.model, "d=2 model (bloch:... recommended)");
    c_cmp->add_option("--m-grid", cmp.m_grid);
    c_cmp->add_option("--reps", cmp.reps);
    c_cmp->add_option("--rng-seed", cmp.rng_seed);
    c_cmp->add_option("--workers", cmp.workers);
    c_cmp->add_option("--out", cmp.out);

    StatsOpts stats;
    auto* c_stats = app.add_subcommand("stats", "randomness test battery on a bit file");
    c_stats->add_option("--bits", stats.bits_file, "bit container path")->required();
    c_stats->add_option("--out", stats.out);

    auto* c_self = app.add_subcommand("selftest", "run the built-in invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_cert->parsed()) return cmd_certify(cert);
        if (c_ext->parsed()) return cmd_extract(ext);
        if (c_sweep->parsed()) return cmd_sweep(sweep);
        if (c_cmp->parsed()) return cmd_compare_tomo(cmp);
        if (c_stats->parsed()) return cmd_stats(stats);
        if (c_self->parsed()) return cmd_selftest();
    } catch (const qcert::extract::CertifiesNothingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCertifiesNothing;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
