#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kitwpa::cli {

using ojson = nlohmann::ordered_json;

// Incremental SHA-256 over everything a command read.
class InputDigest {
public:
    InputDigest();
    ~InputDigest();
    InputDigest(const InputDigest&) = delete;
    InputDigest& operator=(const InputDigest&) = delete;

    // Each chunk is length-prefixed so boundaries cannot alias.
    void add(const std::string& label, const std::string& bytes);
    std::string hex();

private:
    struct Impl;
    Impl* impl_;
};

struct Report {
    std::string command;
    long long seed = 0;
    std::string input_digest;
    ojson results = ojson::object();
    std::vector<std::string> warnings;
    std::vector<std::string> outputs;  // file names relative to the out dir

    ojson to_json() const;
};

// Key suffixes accepted on numeric results.
const std::vector<std::string>& unit_suffixes();
// Paths of numeric leaves whose key carries no unit suffix.
std::vector<std::string> keys_without_units(const ojson& j);

std::string toolkit_version();

}  // namespace kitwpa::cli
