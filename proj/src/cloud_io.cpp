#include "mped/cloud_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mped/error.hpp"

namespace mped {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split(std::string_view line, bool (*is_sep)(char)) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::optional<double> to_double(std::string_view tok) {
  std::string s(tok);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return v;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_offset(const std::filesystem::path& path, std::size_t offset, const std::string& msg) {
  throw ParseError(path.string() + ": byte " + std::to_string(offset) + ": " + msg);
}

/// Splits `text` into lines, remembering 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text, std::size_t pos = 0, std::size_t line = 0)
      : text_(text), pos_(pos), line_(line) {}

  bool next(std::string_view& out) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    out = text_.substr(pos_, stop - pos_);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_;
    return true;
  }

  std::size_t line() const { return line_; }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_;
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::i8;
  if (name == "uchar" || name == "uint8") return PlyType::u8;
  if (name == "short" || name == "int16") return PlyType::i16;
  if (name == "ushort" || name == "uint16") return PlyType::u16;
  if (name == "int" || name == "int32") return PlyType::i32;
  if (name == "uint" || name == "uint32") return PlyType::u32;
  if (name == "float" || name == "float32") return PlyType::f32;
  if (name == "double" || name == "float64") return PlyType::f64;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

double ply_read(PlyType t, const char* p) {
  switch (t) {
    case PlyType::i8: return static_cast<double>(load_le<std::int8_t>(p));
    case PlyType::u8: return static_cast<double>(load_le<std::uint8_t>(p));
    case PlyType::i16: return static_cast<double>(load_le<std::int16_t>(p));
    case PlyType::u16: return static_cast<double>(load_le<std::uint16_t>(p));
    case PlyType::i32: return static_cast<double>(load_le<std::int32_t>(p));
    case PlyType::u32: return static_cast<double>(load_le<std::uint32_t>(p));
    case PlyType::f32: return static_cast<double>(load_le<float>(p));
    case PlyType::f64: return load_le<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  std::size_t offset = 0;
};

struct PlyHeader {
  bool binary = false;
  std::size_t vertex_count = 0;
  std::vector<PlyProperty> props;
  std::size_t stride = 0;
  std::size_t data_offset = 0;
  std::size_t header_lines = 0;
  int xyz[3] = {-1, -1, -1};
  int rgb[3] = {-1, -1, -1};
};

PlyHeader parse_ply_header(const std::filesystem::path& path, std::string_view text) {
  PlyHeader h;
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || line != "ply") fail_line(path, 1, "missing 'ply' magic");
  bool have_format = false;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool ended = false;
  while (reader.next(line)) {
    const auto tok = split(line, is_space);
    if (tok.empty()) continue;
    const std::size_t ln = reader.line();
    if (tok[0] == "end_header") {
      ended = true;
      break;
    }
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail_line(path, ln, "incomplete format line");
      if (tok[1] == "ascii") {
        h.binary = false;
      } else if (tok[1] == "binary_little_endian") {
        h.binary = true;
      } else {
        fail_line(path, ln, "unsupported PLY encoding '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() < 3) fail_line(path, ln, "incomplete element line");
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        if (seen_vertex) fail_line(path, ln, "duplicate vertex element");
        const auto n = to_double(tok[2]);
        if (!n || *n < 0 || std::floor(*n) != *n) fail_line(path, ln, "bad vertex count");
        h.vertex_count = static_cast<std::size_t>(*n);
        seen_vertex = true;
      } else if (!seen_vertex) {
        fail_line(path, ln, "the vertex element must come first");
      }
    } else if (tok[0] == "property") {
      if (!in_vertex) continue;
      if (tok.size() < 3) fail_line(path, ln, "incomplete property line");
      if (tok[1] == "list") fail_line(path, ln, "list properties are not supported on vertices");
      const auto t = ply_type(tok[1]);
      if (!t) fail_line(path, ln, "unknown property type '" + std::string(tok[1]) + "'");
      h.props.push_back({std::string(tok[2]), *t, h.stride});
      h.stride += ply_size(*t);
    } else {
      fail_line(path, ln, "unexpected header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!ended) fail_line(path, reader.line(), "missing end_header");
  if (!have_format) fail_line(path, reader.line(), "missing format line");
  if (!seen_vertex) fail_line(path, reader.line(), "no vertex element");
  h.data_offset = reader.pos();
  h.header_lines = reader.line();

  const char* xyz_names[3] = {"x", "y", "z"};
  const char* rgb_names[2][3] = {{"red", "green", "blue"}, {"r", "g", "b"}};
  for (std::size_t i = 0; i < h.props.size(); ++i) {
    const auto name = lower(h.props[i].name);
    for (int d = 0; d < 3; ++d) {
      if (name == xyz_names[d]) h.xyz[d] = static_cast<int>(i);
      if (name == rgb_names[0][d] || name == rgb_names[1][d] || name == std::string("diffuse_") + rgb_names[0][d]) {
        h.rgb[d] = static_cast<int>(i);
      }
    }
  }
  for (int d = 0; d < 3; ++d) {
    if (h.xyz[d] < 0) fail_line(path, h.header_lines, std::string("missing vertex property ") + xyz_names[d]);
  }
  return h;
}

PointCloud finish(const std::filesystem::path& path, std::vector<Vec3> pos, std::vector<Vec3> col, bool colored) {
  if (pos.empty()) throw ParseError(path.string() + ": no points");
  if (colored) return PointCloud(std::move(pos), std::move(col));
  return PointCloud(std::move(pos));
}

PointCloud load_ply(const std::filesystem::path& path, const std::string& text) {
  const PlyHeader h = parse_ply_header(path, text);
  const bool colored = h.rgb[0] >= 0 && h.rgb[1] >= 0 && h.rgb[2] >= 0;
  std::vector<Vec3> pos(h.vertex_count);
  std::vector<Vec3> col(colored ? h.vertex_count : 0);

  if (h.binary) {
    for (std::size_t i = 0; i < h.vertex_count; ++i) {
      const std::size_t base = h.data_offset + i * h.stride;
      if (base + h.stride > text.size()) fail_offset(path, text.size(), "truncated vertex data (vertex " + std::to_string(i) + ")");
      const char* row = text.data() + base;
      for (int d = 0; d < 3; ++d) {
        const auto& p = h.props[static_cast<std::size_t>(h.xyz[d])];
        pos[i][d] = ply_read(p.type, row + p.offset);
        if (!std::isfinite(pos[i][d])) fail_offset(path, base + p.offset, "non-finite coordinate");
        if (colored) {
          const auto& c = h.props[static_cast<std::size_t>(h.rgb[d])];
          col[i][d] = ply_read(c.type, row + c.offset);
          if (!std::isfinite(col[i][d])) fail_offset(path, base + c.offset, "non-finite color");
        }
      }
    }
    return finish(path, std::move(pos), std::move(col), colored);
  }

  LineReader reader(text, h.data_offset, h.header_lines);
  std::string_view line;
  std::size_t i = 0;
  while (i < h.vertex_count) {
    if (!reader.next(line)) fail_line(path, reader.line() + 1, "truncated: expected " + std::to_string(h.vertex_count) + " vertices, got " + std::to_string(i));
    const auto tok = split(line, is_space);
    if (tok.empty()) continue;
    if (tok.size() < h.props.size()) fail_line(path, reader.line(), "too few values on vertex line");
    for (int d = 0; d < 3; ++d) {
      const auto v = to_double(tok[static_cast<std::size_t>(h.xyz[d])]);
      if (!v) fail_line(path, reader.line(), "bad number");
      if (!std::isfinite(*v)) fail_line(path, reader.line(), "non-finite coordinate");
      pos[i][d] = *v;
      if (colored) {
        const auto c = to_double(tok[static_cast<std::size_t>(h.rgb[d])]);
        if (!c || !std::isfinite(*c)) fail_line(path, reader.line(), "bad color value");
        col[i][d] = *c;
      }
    }
    ++i;
  }
  return finish(path, std::move(pos), std::move(col), colored);
}

// ---------------------------------------------------------------------------
// XYZ / CSV

PointCloud load_xyz(const std::filesystem::path& path, const std::string& text) {
  LineReader reader(text);
  std::string_view line;
  std::vector<Vec3> pos;
  std::vector<Vec3> col;
  std::optional<bool> colored;
  while (reader.next(line)) {
    const auto tok = split(line, is_space);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (!colored) colored = tok.size() >= 6;
    const std::size_t need = *colored ? 6 : 3;
    if (tok.size() < need) fail_line(path, reader.line(), "expected " + std::to_string(need) + " values");
    double v[6];
    for (std::size_t k = 0; k < need; ++k) {
      const auto d = to_double(tok[k]);
      if (!d) fail_line(path, reader.line(), "bad number '" + std::string(tok[k]) + "'");
      if (!std::isfinite(*d)) fail_line(path, reader.line(), "non-finite value");
      v[k] = *d;
    }
    pos.push_back({v[0], v[1], v[2]});
    if (*colored) col.push_back({v[3], v[4], v[5]});
  }
  return finish(path, std::move(pos), std::move(col), colored.value_or(false));
}

bool is_comma(char c) { return c == ','; }

std::string trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

PointCloud load_csv(const std::filesystem::path& path, const std::string& text) {
  LineReader reader(text);
  std::string_view line;
  std::vector<std::string> header;
  while (reader.next(line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    for (auto f : split(line, is_comma)) header.push_back(lower(trim(f)));
    break;
  }
  if (header.empty()) fail_line(path, reader.line(), "missing CSV header");
  auto find = [&](std::initializer_list<const char*> names) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      for (const char* n : names) {
        if (header[i] == n) return static_cast<int>(i);
      }
    }
    return -1;
  };
  const int xyz[3] = {find({"x"}), find({"y"}), find({"z"})};
  const int rgb[3] = {find({"red", "r"}), find({"green", "g"}), find({"blue", "b"})};
  for (int d = 0; d < 3; ++d) {
    if (xyz[d] < 0) fail_line(path, reader.line(), "CSV header lacks x, y or z");
  }
  const bool colored = rgb[0] >= 0 && rgb[1] >= 0 && rgb[2] >= 0;
  std::vector<Vec3> pos;
  std::vector<Vec3> col;
  while (reader.next(line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < header.size()) fail_line(path, reader.line(), "too few fields");
    auto get = [&](int idx, const char* what) {
      const auto d = to_double(fields[static_cast<std::size_t>(idx)]);
      if (!d) fail_line(path, reader.line(), std::string("bad ") + what);
      if (!std::isfinite(*d)) fail_line(path, reader.line(), std::string("non-finite ") + what);
      return *d;
    };
    pos.push_back({get(xyz[0], "coordinate"), get(xyz[1], "coordinate"), get(xyz[2], "coordinate")});
    if (colored) col.push_back({get(rgb[0], "color"), get(rgb[1], "color"), get(rgb[2], "color")});
  }
  return finish(path, std::move(pos), std::move(col), colored);
}

// ---------------------------------------------------------------------------
// Writers

bool colors_are_bytes(const PointCloud& cloud) {
  for (const auto& c : cloud.colors()) {
    for (double v : c) {
      if (v < 0.0 || v > 255.0 || std::floor(v) != v) return false;
    }
  }
  return true;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

template <typename T>
void append_le(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(b, sizeof(T));
}

std::string ply_text(const PointCloud& cloud, bool binary, std::string_view comment) {
  const bool colored = cloud.has_colors();
  const bool bytes = colored && colors_are_bytes(cloud);
  std::string out = "ply\n";
  out += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
  if (!comment.empty()) out += "comment " + std::string(comment) + "\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (colored) {
    const char* t = bytes ? "uchar" : "double";
    out += std::string("property ") + t + " red\nproperty " + t + " green\nproperty " + t + " blue\n";
  }
  out += "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    if (binary) {
      for (double v : p) append_le(out, v);
      if (colored) {
        for (double v : cloud.color(i)) {
          if (bytes) {
            append_le(out, static_cast<std::uint8_t>(v));
          } else {
            append_le(out, v);
          }
        }
      }
      continue;
    }
    for (int d = 0; d < 3; ++d) {
      if (d) out += ' ';
      append_number(out, p[d]);
    }
    if (colored) {
      for (double v : cloud.color(i)) {
        out += ' ';
        append_number(out, v);
      }
    }
    out += '\n';
  }
  return out;
}

std::string delimited_text(const PointCloud& cloud, char sep, bool header, std::string_view comment) {
  std::string out;
  if (!comment.empty()) out += "# " + std::string(comment) + "\n";
  if (header) out += cloud.has_colors() ? "x,y,z,red,green,blue\n" : "x,y,z\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    for (int d = 0; d < 3; ++d) {
      if (d) out += sep;
      append_number(out, p[d]);
    }
    if (cloud.has_colors()) {
      for (double v : cloud.color(i)) {
        out += sep;
        append_number(out, v);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

CloudFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".ply") return CloudFormat::ply_ascii;
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return CloudFormat::xyz;
  if (ext == ".csv") return CloudFormat::csv;
  throw ParseError("cannot infer cloud format from '" + path.string() + "'");
}

CloudFormat parse_format(std::string_view name) {
  if (name == "ply-ascii") return CloudFormat::ply_ascii;
  if (name == "ply-binary-le") return CloudFormat::ply_binary_le;
  if (name == "xyz") return CloudFormat::xyz;
  if (name == "csv") return CloudFormat::csv;
  throw ArgumentError("unknown cloud format '" + std::string(name) + "'");
}

std::string_view format_name(CloudFormat format) {
  switch (format) {
    case CloudFormat::ply_ascii: return "ply-ascii";
    case CloudFormat::ply_binary_le: return "ply-binary-le";
    case CloudFormat::xyz: return "xyz";
    case CloudFormat::csv: return "csv";
  }
  return "?";
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
  const std::string text = read_all(path);
  switch (format) {
    case CloudFormat::ply_ascii:
    case CloudFormat::ply_binary_le: return load_ply(path, text);
    case CloudFormat::xyz: return load_xyz(path, text);
    case CloudFormat::csv: return load_csv(path, text);
  }
  throw ArgumentError("unknown format");
}

PointCloud load_cloud(const std::filesystem::path& path) { return load_cloud(path, format_from_extension(path)); }

void save_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format,
                std::string_view comment) {
  switch (format) {
    case CloudFormat::ply_ascii: write_file_atomic(path, ply_text(cloud, false, comment)); return;
    case CloudFormat::ply_binary_le: write_file_atomic(path, ply_text(cloud, true, comment)); return;
    case CloudFormat::xyz: write_file_atomic(path, delimited_text(cloud, ' ', false, comment)); return;
    case CloudFormat::csv: write_file_atomic(path, delimited_text(cloud, ',', true, comment)); return;
  }
}

}  // namespace mped
