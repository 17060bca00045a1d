#include "qcert/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qcert/version.hpp"

namespace qcert::simulate {

namespace {

constexpr char kMagic[8] = {'Q', 'C', 'E', 'R', 'T', 'R', 'U', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 8);
}

void put_string(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("run container: truncated field");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("run container: truncated field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::string get_string(std::istream& is) {
    const std::uint32_t len = get_u32(is);
    if (len > (1u << 20)) throw std::runtime_error("run container: oversized string field");
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("run container: truncated string");
    return s;
}

int bits_per_outcome(int dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("run container: outcome packing needs a power-of-two d");
    return std::bit_width(static_cast<unsigned>(dim)) - 1;
}

}  // namespace

SourceModel qubit_experiment_model() {
    entropy::ProbVector px({0.9973, 0.0027});
    entropy::ProbVector pz({0.5020, 0.4980});
    quantum::BlochVector r{0.9973 - 0.0027, 0.0, 0.5020 - 0.4980};
    return SourceModel{2, std::move(px), std::move(pz), quantum::bloch_to_density(r), "qubit"};
}

SourceModel ququart_experiment_model() {
    const double p0 = 0.9937, p1 = 0.00359, p2 = 0.00266;
    entropy::ProbVector px({p0, p1, p2, 1.0 - p0 - p1 - p2});
    entropy::ProbVector pz({0.2527, 0.2412, 0.2608, 0.2453});
    return SourceModel{4, std::move(px), std::move(pz), std::nullopt, "ququart"};
}

entropy::CountsVector sample_counts(const entropy::ProbVector& p, std::uint64_t n, Rng& rng) {
    return entropy::CountsVector(random::multinomial(rng, p.values(), n));
}

RunRecord sample_run(const SourceModel& model, std::uint64_t m, const BitString& seed_bits,
                     Rng& rng) {
    auto draw = protocol::seed_to_schedule(seed_bits, m);
    const auto& sched = draw.schedule;

    std::vector<double> cdf_x(model.p_x.values().begin(), model.p_x.values().end());
    std::vector<double> cdf_z(model.p_z.values().begin(), model.p_z.values().end());
    for (std::size_t i = 1; i < cdf_x.size(); ++i) cdf_x[i] += cdf_x[i - 1];
    for (std::size_t i = 1; i < cdf_z.size(); ++i) cdf_z[i] += cdf_z[i - 1];
    auto draw_outcome = [&](const std::vector<double>& cdf) {
        const double u = rng.next_double() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::size_t>(it - cdf.begin());
        return static_cast<std::uint8_t>(std::min(idx, cdf.size() - 1));
    };

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(model.dim), 0);
    std::vector<std::uint8_t> z;
    z.reserve(sched.n_z);
    std::size_t next_x = 0;
    for (std::uint64_t slot = 0; slot < m; ++slot) {
        if (next_x < sched.x_positions.size() && sched.x_positions[next_x] == slot) {
            ++counts[draw_outcome(cdf_x)];
            ++next_x;
        } else {
            z.push_back(draw_outcome(cdf_z));
        }
    }

    RunRecord run{sched,
                  std::move(z),
                  entropy::CountsVector(std::move(counts)),
                  rng.seed(),
                  Rng::algorithm(),
                  model.label,
                  model.dim,
                  0,
                  std::string(kToolVersion)};
    return run;
}

void write_run(const RunRecord& run, std::ostream& os) {
    os.write(kMagic, 8);
    put_u32(os, kFormatVersion);
    put_u32(os, 0);  // reserved

    put_string(os, run.tool_version);
    put_u64(os, run.config_hash);
    put_string(os, run.model_label);
    put_string(os, run.rng_algorithm);
    put_u64(os, run.rng_seed);
    put_u32(os, static_cast<std::uint32_t>(run.dim));
    put_u64(os, run.schedule.m);
    put_u64(os, run.schedule.n_x);
    for (const auto pos : run.schedule.x_positions) put_u64(os, pos);
    for (std::size_t i = 0; i < run.x_counts.dim(); ++i) put_u64(os, run.x_counts[i]);

    const int bpo = bits_per_outcome(run.dim);
    put_u64(os, run.z_outcomes.size());
    BitString payload(run.z_outcomes.size() * static_cast<std::uint64_t>(bpo));
    std::uint64_t at = 0;
    for (const std::uint8_t sym : run.z_outcomes)
        for (int b = 0; b < bpo; ++b) payload.set_bit(at++, (sym >> b) & 1);
    const auto bytes = payload.to_bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write_run: stream failure");
}

RunRecord read_run(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || !std::equal(magic, magic + 8, kMagic))
        throw std::runtime_error("read_run: bad magic");
    if (get_u32(is) != kFormatVersion) throw std::runtime_error("read_run: unknown version");
    get_u32(is);  // reserved

    const std::string tool_version = get_string(is);
    const std::uint64_t config_hash = get_u64(is);
    const std::string model_label = get_string(is);
    const std::string rng_algorithm = get_string(is);
    const std::uint64_t rng_seed = get_u64(is);
    const int dim = static_cast<int>(get_u32(is));
    const std::uint64_t m = get_u64(is);
    const std::uint64_t n_x = get_u64(is);
    if (n_x != protocol::schedule_sizes(m).first)
        throw std::runtime_error("read_run: schedule size mismatch");

    protocol::Schedule sched;
    sched.m = m;
    sched.n_x = n_x;
    sched.n_z = m - n_x;
    sched.x_positions.resize(n_x);
    for (auto& pos : sched.x_positions) pos = get_u64(is);
    for (std::size_t i = 1; i < sched.x_positions.size(); ++i)
        if (sched.x_positions[i] <= sched.x_positions[i - 1])
            throw std::runtime_error("read_run: x positions not increasing");
    if (!sched.x_positions.empty() && sched.x_positions.back() >= m)
        throw std::runtime_error("read_run: x position out of range");

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(dim));
    for (auto& c : counts) c = get_u64(is);
    entropy::CountsVector x_counts(std::move(counts));
    if (x_counts.total() != n_x) throw std::runtime_error("read_run: count total mismatch");

    const std::uint64_t n_out = get_u64(is);
    if (n_out != sched.n_z) throw std::runtime_error("read_run: payload length mismatch");
    const int bpo = bits_per_outcome(dim);
    const std::uint64_t nbits = n_out * static_cast<std::uint64_t>(bpo);
    std::vector<std::uint8_t> bytes((nbits + 7) / 8);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw std::runtime_error("read_run: truncated payload");
    const BitString payload = BitString::from_bytes(bytes, nbits);

    std::vector<std::uint8_t> z(n_out);
    std::uint64_t at = 0;
    for (auto& sym : z) {
        unsigned v = 0;
        for (int b = 0; b < bpo; ++b) v |= static_cast<unsigned>(payload.bit(at++)) << b;
        if (v >= static_cast<unsigned>(dim))
            throw std::runtime_error("read_run: outcome symbol out of range");
        sym = static_cast<std::uint8_t>(v);
    }
    return RunRecord{std::move(sched), std::move(z),          std::move(x_counts),
                     rng_seed,         rng_algorithm,         model_label,
                     dim,              config_hash,           tool_version};
}

void write_run_file(const RunRecord& run, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_run_file: cannot open " + path);
    write_run(run, os);
}

RunRecord read_run_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_run_file: cannot open " + path);
    return read_run(is);
}

SourceModel parse_model_spec(const std::string& spec) {
    if (spec == "qubit") return qubit_experiment_model();
    if (spec == "ququart") return ququart_experiment_model();

    auto parse_list = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) throw std::invalid_argument("model spec: empty number");
            out.push_back(std::stod(tok));
        }
        return out;
    };

    if (spec.rfind("bloch:", 0) == 0) {
        const auto v = parse_list(spec.substr(6));
        if (v.size() != 3) throw std::invalid_argument("model spec: bloch needs rx,ry,rz");
        const quantum::BlochVector r{v[0], v[1], v[2]};
        const auto rho = quantum::bloch_to_density(r);
        auto px = quantum::born_probabilities(rho, quantum::fourier_basis_povm(2));
        auto pz = quantum::born_probabilities(rho, quantum::computational_basis_povm(2));
        return SourceModel{2, std::move(px), std::move(pz), rho, spec};
    }
    if (spec.rfind("probs:", 0) == 0) {
        const auto body = spec.substr(6);
        const auto semi = body.find(';');
        if (semi == std::string::npos)
            throw std::invalid_argument("model spec: probs needs <x-probs>;<z-probs>");
        entropy::ProbVector px(parse_list(body.substr(0, semi)));
        entropy::ProbVector pz(parse_list(body.substr(semi + 1)));
        if (px.dim() != pz.dim() || px.dim() < 2)
            throw std::invalid_argument("model spec: probs lists must have equal length >= 2");
        const int d = static_cast<int>(px.dim());
        return SourceModel{d, std::move(px), std::move(pz), std::nullopt, spec};
    }
    throw std::invalid_argument("model spec: expected qubit | ququart | bloch:... | probs:...");
}

quantum::BlochVector model_bloch(const SourceModel& model) {
    if (model.dim != 2) throw std::invalid_argument("model_bloch: d = 2 only");
    if (model.rho) return quantum::density_to_bloch(*model.rho);
    return quantum::BlochVector{model.p_x[0] - model.p_x[1], 0.0, model.p_z[0] - model.p_z[1]};
}

}  // namespace qcert::simulate
