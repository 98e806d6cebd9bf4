#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavetank/mesh.hpp"

namespace wavetank {

// Round-trip formatting, %.17g.
std::string format_double(double x);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);

// Writes to a temporary sibling and renames; throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// CSV with a header line; every value in round-trip format.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

using Rgb = std::array<std::uint8_t, 3>;
// 256 entries, viridis-like; t is clamped to [0, 1].
const std::array<Rgb, 256>& colormap();
Rgb colormap_at(double t);
std::string rgb_hex(const Rgb& c);

// One filled polygon per triangle, colored by the mean of its nodal values. Also writes
// the nodal x,y,value CSV next to the SVG (same stem). Returns both paths.
std::vector<std::filesystem::path> emit_heatmap(const Eigen::VectorXd& field, const TriMesh& mesh,
                                                const std::filesystem::path& svg_path,
                                                const std::string& title = "");

enum class LogLevel { quiet = 0, info = 1, debug = 2 };
// From WAVETANK_LOG: quiet|info|debug or 0|1|2; default info.
LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

}  // namespace wavetank
