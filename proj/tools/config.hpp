#pragma once

#include "json.hpp"

#include <deque>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kitwpa::cli {

// Malformed or incomplete configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Read-only view of one JSON object that remembers which keys were read.
// finish() rejects any key nobody asked for, so typos in unit-suffixed keys
// fail loudly instead of falling back to a default.
class Section {
public:
    Section(const nlohmann::json& j, std::string path);

    bool has(const std::string& key) const;

    double number(const std::string& key);
    double number_or(const std::string& key, double fallback);
    std::optional<double> maybe_number(const std::string& key);
    int integer(const std::string& key);
    int integer_or(const std::string& key, int fallback);
    bool boolean_or(const std::string& key, bool fallback);
    std::string string(const std::string& key);
    std::string string_or(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);

    Section& child(const std::string& key);
    std::vector<Section*> children(const std::string& key);  // array of objects

    // Throws ConfigError on unread keys, here or in any child taken.
    void finish() const;

    const std::string& path() const { return path_; }

private:
    const nlohmann::json& at(const std::string& key);
    std::string where(const std::string& key) const;

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> used_;
    std::deque<Section> children_;
};

// Loaded config file with paths resolved against its directory.
struct ConfigFile {
    nlohmann::json json;
    std::string bytes;
    std::filesystem::path dir;
};

ConfigFile load_config(const std::filesystem::path& path);
nlohmann::json parse_json_file(const std::filesystem::path& path, std::string* bytes = nullptr);
std::string read_file(const std::filesystem::path& path);

}  // namespace kitwpa::cli
