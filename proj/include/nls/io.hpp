#pragma once

#include <string>

#include "nls/grid.hpp"

namespace nls {

// Binary field snapshot format "NLSF1":
//   16-byte header: 8-byte magic "NLSF1\0\0\0", u32 version = 1, u32 reserved = 0
//   u32 dims, u32 M, f64 L
//   M^N little-endian (f64 re, f64 im) pairs in row-major axis order.
void nlsf1_write(const std::string& path, const ComplexField& field);
ComplexField nlsf1_read(const std::string& path);

/// Write-to-temp-then-rename; the destination never holds a partial file.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

} // namespace nls
