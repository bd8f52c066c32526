#pragma once

#include "offreach/bihari.hpp"
#include "offreach/frs.hpp"
#include "offreach/models.hpp"
#include "offreach/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace offreach {

struct ScenarioConfig {
    std::string name;
    std::string model; // norrbin | cascade | interconnect
    NorrbinParams norrbin;
    NorrbinMode norrbin_mode = NorrbinMode::Diminished;
    double m2_pad = 0.02;
    CascadeParams cascade;
    InterconnectParams interconnect;

    std::vector<double> times;
    double horizon = 0.0;
    std::size_t cells = 0;
    double margin = 0.1;
    SamplerSettings sampler;
    BoundSettings bound;
    std::size_t bound_points = 512; // output grid intervals over [0, horizon]
    double delta = 0.0;             // input-set gap used by the outer bound
    std::string table;              // "", table1, table2
    std::string reference;          // linear | sampled

    nlohmann::json resolved; // every effective setting, echoed into meta.json
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

struct RunOptions {
    std::string verb = "all"; // nominal inner outer intervals table plot all
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<std::pair<std::size_t, std::size_t>> project; // 0-based axes
};

// Writes the artifact directory; throws offreach::Error on failure.
void run_scenario(ScenarioConfig cfg, const RunOptions& opt, std::ostream& log);

// Loads nominal.rgs1 and the stored rho from one evaluation-time directory.
VerifyOutcome verify_result(const std::string& dir, const std::vector<double>& x, std::size_t n_eval_max = 32);

// 2 for configuration and I/O problems, 3 for numerical failures.
int exit_code(const std::exception& e) noexcept;
nlohmann::json error_json(const std::exception& e);

std::string time_dir_name(double t);

} // namespace offreach
