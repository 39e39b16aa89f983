#include "cli.hpp"

#include "commands.hpp"
#include "csv_io.hpp"

#include "kitwpa/error.hpp"

#include "CLI11.hpp"

#include <map>
#include <optional>

namespace kitwpa::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kDescriptions{
    {"tc", "critical temperature from R(T) curves"},
    {"lk", "kinetic inductance from T_c and R_n, optionally against a resonator"},
    {"resfit", "fit resonance traces"},
    {"istar", "I* from a power sweep manifest"},
    {"dispersion", "Bloch dispersion and stopbands of a loaded line"},
    {"design", "loading design, pump placement and gain for a target pump"},
    {"gain", "coupled-mode gain of a line and pump"},
    {"oracle", "time-domain simulation of the nonlinear ladder"},
    {"gen-fixtures", "write seeded synthetic data and example configs"},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kinetic-inductance TWPA design and analysis toolkit", "kitwpa"};
    std::string config_path, out_dir = ".";
    std::optional<long long> seed;
    bool no_plots = false, verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "directory for the report, CSVs and plots");
    app.add_flag("--no-plots", no_plots, "skip SVG plots");
    app.add_option("--seed", seed, "seed for synthetic data");
    app.add_flag("--verbose", verbose, "progress on stderr");
    app.set_version_flag("--version", toolkit_version());
    app.require_subcommand(1, 1);
    app.fallthrough();
    for (const auto& [name, cmd] : commands()) app.add_subcommand(name, kDescriptions.at(name))->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    Context ctx;
    ctx.out_dir = out_dir;
    ctx.verbose = verbose;
    ctx.log = &err;
    ctx.report.command = name;
    try {
        nlohmann::json empty = nlohmann::json::object();
        ConfigFile cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            ctx.config_dir = cfg.dir;
        } else if (name != "gen-fixtures") {
            throw ConfigError(name + " needs --config");
        } else {
            cfg.json = empty;
        }
        Section root(cfg.json, "");
        const long long config_seed = root.has("seed") ? root.integer("seed") : 1;
        ctx.seed = seed.value_or(config_seed);
        ctx.plots = root.boolean_or("plots", true) && !no_plots;
        ctx.digest.add("command", name);
        ctx.digest.add("seed", std::to_string(ctx.seed));
        ctx.digest.add("config", cfg.bytes);
        ctx.report.seed = ctx.seed;

        fs::create_directories(ctx.out_dir);
        commands().at(name)(root, ctx);

        ctx.report.input_digest = ctx.digest.hex();
        const std::string report_name = name + "_report.json";
        write_text(ctx.out_dir / report_name, ctx.report.to_json().dump(2) + "\n");
        ctx.info("wrote " + (ctx.out_dir / report_name).string());
        return kOk;
    } catch (const ConfigError& e) {
        err << "kitwpa " << name << ": config error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "kitwpa " << name << ": " << e.what() << '\n';
        return is_input_error(e.code()) ? kInputError : kComputeError;
    } catch (const nlohmann::json::exception& e) {
        err << "kitwpa " << name << ": config error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "kitwpa " << name << ": " << e.what() << '\n';
        return kComputeError;
    }
}

}  // namespace kitwpa::cli
