#include "superkz/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

int default_jobs() {
    if (const char* e = std::getenv("SUPERKZ_JOBS")) {
        try {
            const int j = std::stoi(e);
            if (j > 0) return j;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text << "\n";
}

// A config file holds one experiment object, an array of them, or {"experiments": [...]}.
std::vector<json> batch_of(const json& doc) {
    if (doc.is_array()) return {doc.begin(), doc.end()};
    if (doc.is_object() && doc.contains("experiments") && !doc.contains("experiment")) {
        const json& e = doc.at("experiments");
        if (e.is_array()) return {e.begin(), e.end()};
    }
    return {doc};
}

int cmd_list(bool verbose) {
    json out = json::array();
    for (const auto& e : superkz::experiment_catalog())
        out.push_back({{"name", e.name}, {"description", e.description}, {"topic", e.topic}});
    if (verbose) std::cout << out.dump(2) << "\n";
    else
        for (const auto& e : superkz::experiment_catalog())
            std::cout << e.name << "\t" << e.description << "\t[" << e.topic << "]\n";
    return kExitOk;
}

bool load(const std::string& path, json& doc, json& errors) {
    std::ifstream is(path);
    if (!is) {
        errors.push_back("cannot read " + path);
        return false;
    }
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        errors.push_back(std::string("malformed JSON: ") + e.what());
        return false;
    }
    return true;
}

json invalid_report(const json& errors) { return {{"valid", false}, {"errors", errors}}; }

int cmd_validate(const std::string& path, const std::string& out) {
    json doc, errors = json::array();
    if (load(path, doc, errors))
        for (const auto& c : batch_of(doc))
            for (const auto& e : superkz::validate_config(c)) errors.push_back(e);
    emit((errors.empty() ? json{{"valid", true}} : invalid_report(errors)).dump(2), out);
    return errors.empty() ? kExitOk : kExitInvalid;
}

int cmd_run(const std::string& path, const std::string& out, std::uint64_t seed, bool csv, bool verbose, int jobs) {
    json doc, errors = json::array();
    if (!load(path, doc, errors)) {
        emit(invalid_report(errors).dump(2), out);
        return kExitInvalid;
    }
    const auto batch = batch_of(doc);
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (const auto& e : superkz::validate_config(batch[i]))
            errors.push_back(batch.size() > 1 ? "[" + std::to_string(i) + "] " + e.get<std::string>() : e.get<std::string>());
    if (!errors.empty()) {
        emit(invalid_report(errors).dump(2), out);
        return kExitInvalid;
    }

    std::vector<superkz::Report> reports(batch.size());
    std::vector<std::string> crashes(batch.size());
    auto one = [&](std::size_t i) {
        std::uint64_t s = seed;
        if (batch[i].contains("seed") && batch[i].at("seed").is_number_unsigned()) s = batch[i].at("seed").get<std::uint64_t>();
        try {
            reports[i] = superkz::run_experiment(batch[i], s);
        } catch (const std::exception& e) {
            crashes[i] = e.what();
            reports[i].experiment = batch[i].value("experiment", "");
            reports[i].pass = false;
            reports[i].assertions.push_back({"experiment completed", false, {{"error", e.what()}}});
        }
    };
    for (std::size_t start = 0; start < batch.size(); start += jobs) {
        std::vector<std::future<void>> running;
        const std::size_t end = std::min(batch.size(), start + static_cast<std::size_t>(jobs));
        for (std::size_t i = start; i < end; ++i) running.push_back(std::async(std::launch::async, one, i));
        for (auto& f : running) f.get();
    }

    bool pass = true;
    json arr = json::array();
    std::string csv_text;
    for (const auto& r : reports) {
        pass = pass && r.pass;
        arr.push_back(superkz::to_json(r));
        csv_text += r.csv;
        if (verbose) {
            for (const auto& a : r.assertions)
                std::cerr << (a.pass ? "  pass  " : "  FAIL  ") << r.experiment << ": " << a.name << "\n";
            std::cerr << (r.pass ? "PASS " : "FAIL ") << r.experiment << " (" << r.seconds << " s)\n";
        }
    }
    const json result = batch.size() == 1 && !doc.is_array() && !doc.contains("experiments")
                            ? arr[0]
                            : json{{"pass", pass}, {"reports", arr}};
    emit(result.dump(2), out);
    if (csv) {
        if (out.empty()) std::cout << csv_text;
        else emit(csv_text, out + ".csv");
    }
    return pass ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superkz: Lie superalgebra KZ experiments"};
    app.require_subcommand(1);
    bool verbose = false;

    auto* list = app.add_subcommand("list", "List the available experiments");
    list->add_flag("--verbose", verbose, "Print the catalog as JSON");

    std::string config, out;
    std::uint64_t seed = 0;
    bool csv = false;
    int jobs = default_jobs();
    auto* run = app.add_subcommand("run", "Run the experiments of a configuration file");
    run->add_option("--config", config, "Experiment configuration (JSON)")->required();
    run->add_option("--out", out, "Report path (default: stdout)");
    run->add_option("--seed", seed, "Random seed");
    run->add_flag("--csv", csv, "Also write module summaries as CSV");
    run->add_flag("--verbose", verbose, "Per-assertion progress on stderr");
    run->add_option("--jobs", jobs, "Experiments run in parallel (default: $SUPERKZ_JOBS or 1)")
        ->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
    validate->add_option("--config", config, "Experiment configuration (JSON)")->required();
    validate->add_option("--out", out, "Report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }
    try {
        if (*list) return cmd_list(verbose);
        if (*validate) return cmd_validate(config, out);
        return cmd_run(config, out, seed, csv, verbose, jobs);
    } catch (const std::exception& e) {
        std::cerr << "superkz: " << e.what() << "\n";
        return kExitFail;
    }
}
