#include "csv_io.hpp"

#include "kitwpa/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace kitwpa::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& where) {
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::InvalidInput, where + ": not a number '" + cell + "'");
    return v;
}

// Rows of numbers under a header whose leading columns must be `required`.
std::vector<std::vector<double>> read_table(const std::filesystem::path& path,
                                            const std::vector<std::string>& required,
                                            const std::vector<std::string>& optional_cols) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path.string());
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        header = split(line);
        break;
    }
    if (header.empty()) throw Error(ErrorCode::InvalidInput, path.string() + ": empty file");
    auto expected = required;
    for (size_t i = required.size(); i < header.size(); ++i) {
        const size_t o = i - required.size();
        if (o >= optional_cols.size()) break;
        expected.push_back(optional_cols[o]);
    }
    if (header != expected) {
        std::string want;
        for (const auto& c : required) want += (want.empty() ? "" : ",") + c;
        throw Error(ErrorCode::InvalidInput, path.string() + ": expected header " + want);
    }
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (cells.size() != header.size()) throw Error(ErrorCode::InvalidInput, where + ": wrong column count");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_number(c, where));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::InvalidInput, path.string() + ": no data rows");
    return rows;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

film::TransitionCurve read_transition_csv(const std::filesystem::path& path) {
    auto rows = read_table(path, {"temperature_K", "resistance_ohm"}, {});
    std::sort(rows.begin(), rows.end());
    film::TransitionCurve c;
    c.film_id = path.stem().string();
    for (const auto& r : rows) c.samples.push_back({r[0], r[1]});
    return c;
}

void write_transition_csv(const std::filesystem::path& path, const film::TransitionCurve& curve) {
    std::string s = "temperature_K,resistance_ohm\n";
    for (const auto& p : curve.samples) s += format_double(p.temperature_k) + "," + format_double(p.resistance_ohm) + "\n";
    write_text(path, s);
}

resonator::S21Sweep read_s21_csv(const std::filesystem::path& path) {
    const auto rows = read_table(path, {"frequency_Hz", "s21_db"}, {"s21_phase_rad"});
    resonator::S21Sweep s;
    s.resonator_id = path.stem().string();
    for (const auto& r : rows) {
        s.points.push_back({r[0], r[1], r.size() > 2 ? std::optional<double>(r[2]) : std::nullopt});
    }
    return s;
}

void write_s21_csv(const std::filesystem::path& path, const resonator::S21Sweep& sweep) {
    const bool phase = !sweep.points.empty() && sweep.points.front().phase_rad.has_value();
    std::string s = phase ? "frequency_Hz,s21_db,s21_phase_rad\n" : "frequency_Hz,s21_db\n";
    for (const auto& p : sweep.points) {
        s += format_double(p.frequency_hz) + "," + format_double(p.s21_db);
        if (phase) s += "," + format_double(p.phase_rad.value_or(0.0));
        s += "\n";
    }
    write_text(path, s);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace kitwpa::cli
