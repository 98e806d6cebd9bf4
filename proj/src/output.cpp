#include "wavetank/output.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "wavetank/errors.hpp"

namespace wavetank {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  const fs::path tmp = path.string() + ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), std::streamsize(content.size()));
    out.close();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) s += (k ? "," : "") + header[k];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + format_double(row[k]);
    s += '\n';
  }
  return s;
}

const std::array<Rgb, 256>& colormap() {
  static const std::array<Rgb, 256> table = [] {
    const Rgb anchors[] = {{0x44, 0x01, 0x54}, {0x47, 0x2d, 0x7b}, {0x3b, 0x52, 0x8b}, {0x2c, 0x72, 0x8e}, {0x21, 0x91, 0x8c},
                           {0x28, 0xae, 0x80}, {0x5e, 0xc9, 0x62}, {0xad, 0xdc, 0x30}, {0xfd, 0xe7, 0x25}};
    constexpr int n = 9;
    std::array<Rgb, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double x = i / 255.0 * (n - 1);
      const int k = std::min(int(x), n - 2);
      const double w = x - k;
      for (int c = 0; c < 3; ++c) t[i][c] = std::uint8_t(std::lround((1 - w) * anchors[k][c] + w * anchors[k + 1][c]));
    }
    return t;
  }();
  return table;
}

Rgb colormap_at(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return colormap()[std::size_t(std::lround(t * 255.0))];
}

std::string rgb_hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

namespace {

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::vector<fs::path> emit_heatmap(const Eigen::VectorXd& field, const TriMesh& mesh, const fs::path& svg_path,
                                   const std::string& title) {
  if (field.size() != Eigen::Index(mesh.vertex_count()))
    throw IoError("heatmap field has " + std::to_string(field.size()) + " values for " +
                  std::to_string(mesh.vertex_count()) + " vertices");
  if (!field.allFinite()) throw IoError("heatmap field is not finite: " + svg_path.string());
  if (mesh.triangles.empty()) throw IoError("heatmap of an empty mesh");

  const double lo = field.minCoeff(), hi = field.maxCoeff();
  Eigen::Vector2d bmin = mesh.vertices[0], bmax = mesh.vertices[0];
  for (const Vec2& v : mesh.vertices) {
    bmin = bmin.cwiseMin(v);
    bmax = bmax.cwiseMax(v);
  }
  const double width = 800.0, margin = 10.0, band = 40.0;
  const double scale = (width - 2 * margin) / std::max(bmax.x() - bmin.x(), 1e-300);
  const double height = (bmax.y() - bmin.y()) * scale + 2 * margin + band;

  std::string svg;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, std::ceil(height), width, std::ceil(height));
  svg += buf;
  svg += "<g stroke=\"none\">\n";
  for (const auto& tri : mesh.triangles) {
    const double mean = (field[tri[0]] + field[tri[1]] + field[tri[2]]) / 3.0;
    const double t = hi > lo ? (mean - lo) / (hi - lo) : 0.5;
    svg += "<polygon points=\"";
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = mesh.vertices[std::size_t(tri[k])];
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", k ? " " : "", margin + (p.x() - bmin.x()) * scale,
                    margin + (bmax.y() - p.y()) * scale);
      svg += buf;
    }
    svg += "\" fill=\"" + rgb_hex(colormap_at(t)) + "\"/>\n";
  }
  svg += "</g>\n";
  const double ytext = height - band / 2;
  if (!title.empty()) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" font-size=\"14\">", margin, ytext);
    svg += buf + title + "</text>\n";
  }
  std::snprintf(buf, sizeof buf, "<text class=\"range\" x=\"%.0f\" y=\"%.0f\" font-size=\"14\" text-anchor=\"end\">",
                width - margin, ytext);
  svg += buf + ("range [" + short_number(lo) + ", " + short_number(hi) + "]") + "</text>\n";
  svg += "</svg>\n";

  std::vector<std::vector<double>> rows;
  rows.reserve(mesh.vertex_count());
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    rows.push_back({mesh.vertices[i].x(), mesh.vertices[i].y(), field[Eigen::Index(i)]});
  fs::path csv_path = svg_path;
  csv_path.replace_extension(".csv");
  write_atomic(csv_path, csv_table({"x", "y", "value"}, rows));
  write_atomic(svg_path, svg);
  return {svg_path, csv_path};
}

LogLevel log_level() {
  const char* env = std::getenv("WAVETANK_LOG");
  if (!env) return LogLevel::info;
  const std::string s = env;
  if (s == "quiet" || s == "0") return LogLevel::quiet;
  if (s == "debug" || s == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log_message(LogLevel level, const std::string& msg) {
  static std::mutex mu;
  if (level == LogLevel::quiet || int(level) > int(log_level())) return;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "wavetank: " << msg << '\n';
}

}  // namespace wavetank
