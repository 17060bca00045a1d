#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "qcert/entropy.hpp"
#include "qcert/rng.hpp"

namespace qcert::testing {

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path = base / ("qcert-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

/// Random point on the probability simplex (exponential spacings).
inline entropy::ProbVector random_prob_vector(std::size_t d, Rng& rng) {
    std::vector<double> p(d);
    double sum = 0.0;
    for (auto& v : p) {
        v = -std::log(1.0 - rng.next_double());
        sum += v;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        p[i] /= sum;
        acc += p[i];
    }
    p[d - 1] = 1.0 - acc;  // exact unit sum
    return entropy::ProbVector(std::move(p));
}

}  // namespace qcert::testing
