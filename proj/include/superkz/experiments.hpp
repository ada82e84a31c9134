#pragma once

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace superkz {

struct Assertion {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

struct Report {
    std::string experiment;
    bool pass = true;
    std::vector<Assertion> assertions;
    nlohmann::json data = nlohmann::json::object();
    double seconds = 0;
    std::uint64_t seed = 0;
    std::string csv;  // optional module summaries
};

nlohmann::json to_json(const Report& r);

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::string topic;
};

const std::vector<ExperimentInfo>& experiment_catalog();

struct InvalidConfig : std::invalid_argument {
    nlohmann::json errors;
    explicit InvalidConfig(nlohmann::json e)
        : std::invalid_argument("invalid configuration"), errors(std::move(e)) {}
};

// Runs one experiment; `config` must contain "experiment". Throws InvalidConfig.
Report run_experiment(const nlohmann::json& config, std::uint64_t seed);

// Checks the configuration without running it; returns the list of problems.
nlohmann::json validate_config(const nlohmann::json& config);

}  // namespace superkz
