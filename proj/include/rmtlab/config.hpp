#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtlab/clt_theory.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/girko.hpp"
#include "rmtlab/test_functions.hpp"

namespace rmtlab {

using Json = nlohmann::json;

/// Reads a JSON config file. Throws IoError with the path on failure.
Json load_json_file(const std::string& path);

/// Applies "a.b.c=value" to the document. The value is parsed as JSON when possible
/// (numbers, booleans, arrays, objects) and taken as a string otherwise.
void apply_override(Json& doc, const std::string& assignment);

/// Complex numbers are written either as a number or as [re, im].
Complex complex_from_json(const Json& j);
Json complex_to_json(Complex c);

EntryDistribution distribution_from_json(const Json& j);
Json distribution_to_json(const EntryDistribution& d);
FunctionSpec function_spec_from_json(const Json& j);
Json function_spec_to_json(const FunctionSpec& f);

struct LocalLawSettings {
    std::vector<double> eta_exponents{0.8, 0.6, 0.4, 0.2, 0.0};  // eta = n^{-a}
    Complex z{0.3, 0.0};
    std::vector<std::size_t> two_resolvent_ns{64, 128, 256, 512};
    std::size_t two_resolvent_replicas = 40;
    double two_resolvent_eta = 0.2;
    Complex z1{0.0, 0.0};
    Complex z2{0.5, 0.0};
};

struct OverlapSettings {
    Complex z1{0.0, 0.0};
    Complex z2{0.8, 0.0};
    std::size_t k = 5;
};

struct IndependenceSettings {
    Complex z1{0.0, 0.0};
    Complex z2{0.8, 0.0};
    double eta = 0.0;  // 0 means 1/n
    double omega_hat = 0.2;
};

struct DbmSettings {
    double dt = 1e-5;
    double t_final = 1e-2;
    std::string mode = "matrix_flow";
    std::vector<Complex> zs{Complex(0.0, 0.0)};
    std::size_t K = 0;
    std::size_t record_every = 100;
    std::size_t substep_cap = 1024;
};

/// Parsed experiment description. Keys: experiment, n (number or list), distribution
/// {kind, params}, functions [{family, params, part}], replicas, base_seed, kappa4 (optional
/// override of the theory input), quad, girko, locallaw, overlap, independence, dbm,
/// output {csv, json}.
struct ExperimentConfig {
    std::string experiment = "clt";
    std::vector<std::size_t> ns{256};
    EntryDistribution distribution = EntryDistribution::ginibre();
    std::vector<FunctionSpec> functions;
    std::size_t replicas = 100;
    std::uint64_t base_seed = 1;
    std::optional<double> kappa4_override;
    QuadSpec quad;
    GirkoConfig girko;
    LocalLawSettings locallaw;
    OverlapSettings overlap;
    IndependenceSettings independence;
    DbmSettings dbm;
    std::string output_csv;
    std::string output_json;

    Json source;  // the document after overrides, used for hashing

    double kappa4() const { return kappa4_override ? *kappa4_override : distribution.kappa4(); }
};

ExperimentConfig parse_experiment(const Json& doc);
ExperimentConfig load_experiment(const std::string& path, const std::vector<std::string>& overrides = {});

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const Json& doc);

} // namespace rmtlab
