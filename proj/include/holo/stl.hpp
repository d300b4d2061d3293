#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "holo/geometry.hpp"

namespace holo::stl {

/// Raw triangle soup from either encoding. Binary files are detected by the
/// 84 + 50*n size rule; anything else starting with "solid" is parsed as ASCII.
std::vector<Triangle> parse(std::span<const std::uint8_t> bytes);
std::vector<Triangle> read_file(const std::string& path);

std::vector<std::uint8_t> encode_binary(const SurfaceMesh& mesh);
std::string encode_ascii(const SurfaceMesh& mesh, const std::string& name = "holo");

void write_binary(const std::string& path, const SurfaceMesh& mesh);
void write_ascii(const std::string& path, const SurfaceMesh& mesh);

}  // namespace holo::stl
