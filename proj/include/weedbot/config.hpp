#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "weedbot/experiments.hpp"

namespace weedbot::config {

/// A value of the TOML subset: booleans, integers, floats, basic strings and arrays.
struct Value {
    enum class Type { boolean, integer, floating, string, array };

    Type type{Type::integer};
    bool b{false};
    std::int64_t i{0};
    double d{0.0};
    std::string s;
    std::vector<Value> items;

    [[nodiscard]] bool is_number() const { return type == Type::integer || type == Type::floating; }
    /// Integers widen to double; anything else throws ConfigError.
    [[nodiscard]] double as_double() const;
    [[nodiscard]] std::int64_t as_int() const;
    [[nodiscard]] bool as_bool() const;
    [[nodiscard]] const std::string& as_string() const;
    [[nodiscard]] const std::vector<Value>& as_array() const;
};

using Table = std::map<std::string, Value>;

/// Parsed document. Keys before any header live in the table named "".
/// Headers are kept as flat dotted names, e.g. "gantry.x".
struct Document {
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;
};

/// Parses the supported subset: `[table]`, `[[array.of.tables]]`, `key = value`,
/// `#` comments, basic strings with \" \\ \n \t escapes, decimal integers and
/// floats, true/false and (possibly multi-line) arrays. Throws ConfigError with
/// the line number on anything else.
Document parse_toml(std::string_view text);
Document load_toml(const std::filesystem::path& path);

struct ExperimentConfig {
    std::vector<double> speeds{30.0, 40.0, 50.0, 60.0, 70.0};
    int trials{1};
    double accuracy_speed_cm_s{42.5};
    double histogram_bin_mm{0.5};
    int parallel{1};
    StabilityConfig stability;
};

/// Every tunable of a run. Defaults are compiled in; a config file overrides
/// them and command-line flags override the file.
struct RunConfig {
    ScenarioSpec world;
    MissionConfig mission;
    ExperimentConfig experiment;
    std::uint64_t seed{1};
    std::string out{"results"};
};

/// Overrides `config` with the document. Unknown tables or keys are errors.
void apply(const Document& doc, RunConfig& config);

RunConfig load_run_config(const std::filesystem::path& path);

/// The experiment inputs of a run.
StudyConfig study_config(const RunConfig& config);

/// Parses "30,40,50" into numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace weedbot::config
