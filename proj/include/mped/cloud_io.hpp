#pragma once

#include <filesystem>
#include <string_view>

#include "mped/point_cloud.hpp"

namespace mped {

enum class CloudFormat {
  ply_ascii,
  ply_binary_le,
  xyz,
  csv,
};

/// Guess a format from the file extension. PLY files report `ply_ascii`;
/// the loader reads the actual encoding from the header.
CloudFormat format_from_extension(const std::filesystem::path& path);

CloudFormat parse_format(std::string_view name);
std::string_view format_name(CloudFormat format);

/// Load a cloud. For PLY the header decides ascii vs binary, so either PLY
/// enumerator may be passed. Colors are populated iff the file carries
/// red/green/blue (or r/g/b) vertex properties.
///
/// Throws ParseError naming the line (text formats) or byte offset (binary).
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
PointCloud load_cloud(const std::filesystem::path& path);

/// Write a cloud. ASCII writers emit 17 significant digits, so a save/load
/// round trip reproduces every finite double exactly. Colors that are all
/// integral in [0,255] are written as uchar, otherwise as double.
void save_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format,
                std::string_view comment = {});

/// Write `contents` to a sibling temporary file, then rename it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace mped
