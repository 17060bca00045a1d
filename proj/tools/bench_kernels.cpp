// Timing harness for the two parallel kernels: the blocked Toeplitz hash
// against its bit-by-bit reference, and the Monte Carlo rate estimator at
// one worker against all workers.

#include <omp.h>

#include <cstdint>
#include <iostream>

#include "qcert/extract.hpp"
#include "qcert/protocol.hpp"
#include "qcert/rng.hpp"
#include "qcert/simulate.hpp"

using namespace qcert;

int main() {
    const int max_threads = omp_get_max_threads();
    std::cout << "threads available: " << max_threads << "\n\n";

    {
        // Reference is O(n*ell) bit operations, so keep its size moderate.
        const std::uint64_t n_ref = 1 << 14, ell_ref = n_ref / 2;
        Rng rng(7);
        const BitString x = BitString::random(rng, n_ref);
        extract::ToeplitzSeed seed{BitString::random(rng, n_ref + ell_ref - 1)};

        double t0 = -omp_get_wtime();
        const BitString y_ref = extract::toeplitz_hash_reference(x, ell_ref, seed);
        t0 += omp_get_wtime();

        double t1 = -omp_get_wtime();
        const BitString y = extract::toeplitz_hash(x, ell_ref, seed);
        t1 += omp_get_wtime();

        std::cout << "toeplitz n=" << n_ref << " ell=" << ell_ref << "\n";
        std::cout << "  reference : " << t0 << " s\n";
        std::cout << "  blocked   : " << t1 << " s   (match: " << (y == y_ref ? "yes" : "NO")
                  << ", speedup " << t0 / t1 << "x)\n\n";
    }

    {
        const std::uint64_t n = 1 << 21, ell = (n * 4) / 5;
        Rng rng(11);
        const BitString x = BitString::random(rng, n);
        extract::ToeplitzSeed seed{BitString::random(rng, n + ell - 1)};

        omp_set_num_threads(1);
        double t1 = -omp_get_wtime();
        const BitString y1 = extract::toeplitz_hash(x, ell, seed);
        t1 += omp_get_wtime();

        omp_set_num_threads(max_threads);
        double tn = -omp_get_wtime();
        const BitString yn = extract::toeplitz_hash(x, ell, seed);
        tn += omp_get_wtime();

        std::cout << "toeplitz blocked kernel n=" << n << " ell=" << ell << "\n";
        std::cout << "  1 thread  : " << t1 << " s\n";
        std::cout << "  " << max_threads << " threads : " << tn << " s   (match: "
                  << (y1 == yn ? "yes" : "NO") << ", speedup " << t1 / tn << "x)\n\n";
    }

    {
        const std::uint64_t m = 1'000'000, reps = 20000;
        const auto model = simulate::qubit_experiment_model();
        const Rng rng(23);

        double t1 = -omp_get_wtime();
        const auto s1 = protocol::expected_rate_montecarlo(m, model.p_x, 1.0, reps, rng, 1);
        t1 += omp_get_wtime();

        double tn = -omp_get_wtime();
        const auto sn =
            protocol::expected_rate_montecarlo(m, model.p_x, 1.0, reps, rng, max_threads);
        tn += omp_get_wtime();

        std::cout << "expected_rate_montecarlo m=" << m << " reps=" << reps << "\n";
        std::cout << "  1 worker  : " << t1 << " s (mean " << s1.mean << ")\n";
        std::cout << "  " << max_threads << " workers : " << tn << " s (mean " << sn.mean
                  << ", identical: " << (s1.mean == sn.mean ? "yes" : "NO") << ", speedup "
                  << t1 / tn << "x)\n";
    }
    return 0;
}
