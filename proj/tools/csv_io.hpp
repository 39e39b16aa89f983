#pragma once

#include "kitwpa/film.hpp"
#include "kitwpa/resonator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kitwpa::cli {

// Header temperature_K,resistance_ohm. Rows are sorted by temperature.
film::TransitionCurve read_transition_csv(const std::filesystem::path& path);
void write_transition_csv(const std::filesystem::path& path, const film::TransitionCurve& curve);

// Header frequency_Hz,s21_db[,s21_phase_rad].
resonator::S21Sweep read_s21_csv(const std::filesystem::path& path);
void write_s21_csv(const std::filesystem::path& path, const resonator::S21Sweep& sweep);

void write_text(const std::filesystem::path& path, const std::string& text);

// Shortest round-trip representation, locale independent.
std::string format_double(double x);

}  // namespace kitwpa::cli
