#pragma once

#include "config.hpp"
#include "report.hpp"
#include "svg.hpp"

#include "kitwpa/tline.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <string>

namespace kitwpa::cli {

struct Context {
    std::filesystem::path out_dir;
    std::filesystem::path config_dir;
    bool plots = true;
    bool verbose = false;
    long long seed = 1;
    std::ostream* log = nullptr;
    InputDigest digest;
    Report report;

    // Path from the config, relative to the config file; must exist.
    std::filesystem::path input_path(const std::string& p) const;
    // Reads an input file and adds it to the digest.
    std::string read_input(const std::filesystem::path& p);
    void write(const std::string& name, const std::string& text);
    void plot(const std::string& name, const SvgPlot& plot);
    void info(const std::string& msg) const;
    void warn(const std::string& msg);
};

using Command = std::function<void(Section& root, Context& ctx)>;

const std::map<std::string, Command>& commands();

// Line section: base{l0_H, c_F, i_star_A}, pattern, pattern_target,
// n_supercells, dc_bias_A; or {"file": path} pointing at such an object.
tline::LoadedLineSpec parse_line(Section& s, Context& ctx);
ojson line_to_json(const tline::LoadedLineSpec& spec);

}  // namespace kitwpa::cli
