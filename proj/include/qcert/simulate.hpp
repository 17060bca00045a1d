#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcert/entropy.hpp"
#include "qcert/protocol.hpp"
#include "qcert/quantum.hpp"
#include "qcert/rng.hpp"

namespace qcert::simulate {

/// A d-level source described by its Born distributions in the control (X)
/// and generation (Z) bases; a density matrix is attached when the model is
/// specified at the state level (d = 2 Bloch models).
struct SourceModel {
    int dim = 0;
    entropy::ProbVector p_x;  // control basis
    entropy::ProbVector p_z;  // generation basis
    std::optional<quantum::DensityMatrix> rho;
    std::string label;
};

/// One simulated experiment, reproducible from (model, m, seed bits, rng).
struct RunRecord {
    protocol::Schedule schedule;
    std::vector<std::uint8_t> z_outcomes;  // length n_z, symbols in 0..d-1
    entropy::CountsVector x_counts;
    std::uint64_t rng_seed = 0;
    std::string rng_algorithm;
    std::string model_label;
    int dim = 0;
    std::uint64_t config_hash = 0;
    std::string tool_version;
};

/// d=2 bench model: control probabilities (0.9973, 0.0027), generation
/// probabilities (0.5020, 0.4980).  The attached state is the maximum-purity
/// Bloch completion (r_x = 0.9946, r_y = 0, r_z = 0.0040), whose Born
/// distributions in the Fourier / computational bases reproduce both vectors.
SourceModel qubit_experiment_model();

/// d=4 bench model: control (0.9937, 0.00359, 0.00266, 0.00005), generation
/// (0.2527, 0.2412, 0.2608, 0.2453).
SourceModel ququart_experiment_model();

/// Multinomial(n, p) tallies; deterministic given the rng state.
entropy::CountsVector sample_counts(const entropy::ProbVector& p, std::uint64_t n, Rng& rng);

/// Full run: schedule from the seed bits, then one Born draw per slot in
/// schedule order (control slots tally into x_counts, the rest append to
/// z_outcomes).
RunRecord sample_run(const SourceModel& model, std::uint64_t m, const BitString& seed_bits,
                     Rng& rng);

/// Binary run container (16-byte magic+version header, little-endian fields,
/// outcome payload packed log2(d) bits per symbol, LSB-first within bytes).
void write_run(const RunRecord& run, std::ostream& os);
RunRecord read_run(std::istream& is);
void write_run_file(const RunRecord& run, const std::string& path);
RunRecord read_run_file(const std::string& path);

/// Model specs accepted by the CLI:
///   qubit | ququart | bloch:<rx>,<ry>,<rz> | probs:<p0,p1,...>;<P0,P1,...>
SourceModel parse_model_spec(const std::string& spec);

/// Bloch vector of a d=2 model (from rho when present, else the r_y = 0
/// completion of the two Born vectors).
quantum::BlochVector model_bloch(const SourceModel& model);

}  // namespace qcert::simulate
