#include "config.hpp"

#include <fstream>
#include <sstream>

namespace kitwpa::cli {

Section::Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool Section::has(const std::string& key) const { return j_.contains(key); }

std::string Section::where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
}

const nlohmann::json& Section::at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError("missing key " + where(key));
    used_.insert(key);
    return j_.at(key);
}

double Section::number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
}

double Section::number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
}

std::optional<double> Section::maybe_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
}

int Section::integer(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v.get<int>();
}

int Section::integer_or(const std::string& key, int fallback) {
    return has(key) ? integer(key) : fallback;
}

bool Section::boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
}

std::string Section::string(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
}

std::string Section::string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
}

std::vector<double> Section::numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Section& Section::child(const std::string& key) {
    const auto& v = at(key);
    children_.emplace_back(v, where(key));
    return children_.back();
}

std::vector<Section*> Section::children(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of objects");
    std::vector<Section*> out;
    for (size_t i = 0; i < v.size(); ++i) {
        children_.emplace_back(v[i], where(key) + "[" + std::to_string(i) + "]");
        out.push_back(&children_.back());
    }
    return out;
}

void Section::finish() const {
    for (const auto& [key, value] : j_.items()) {
        if (!used_.count(key)) throw ConfigError("unknown key " + where(key));
    }
    for (const auto& c : children_) c.finish();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json parse_json_file(const std::filesystem::path& path, std::string* bytes) {
    std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (bytes) *bytes = std::move(text);
    return j;
}

ConfigFile load_config(const std::filesystem::path& path) {
    ConfigFile c;
    c.json = parse_json_file(path, &c.bytes);
    if (!c.json.is_object()) throw ConfigError(path.string() + ": top level must be an object");
    c.dir = path.parent_path();
    return c;
}

}  // namespace kitwpa::cli
