#pragma once

#include <filesystem>

#include "oarseg/grid.hpp"

namespace oarseg::npy {

// Minimal reader/writer for 3-axis NumPy .npy arrays (format versions 1.0-3.0,
// little-endian, C order). Any integer, bool or float dtype is accepted on read.

Grid3<float> read_float(const std::filesystem::path& path);
Grid3<std::uint8_t> read_u8(const std::filesystem::path& path);

void write(const std::filesystem::path& path, const Grid3<float>& g);
void write(const std::filesystem::path& path, const Grid3<std::uint8_t>& g);

}  // namespace oarseg::npy
