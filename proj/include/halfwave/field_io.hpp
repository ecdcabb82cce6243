#pragma once

#include <filesystem>
#include <iosfwd>

#include "halfwave/spectral_grid.hpp"

namespace halfwave {

// Little-endian container: magic "HWF1", u32 d, u32 N, f64 L, u32 representation
// (0 physical, 1 spectral), then N*N row-major complex64 pairs (two float32).
void write_field_binary(std::ostream& out, const Field& f);
Field read_field_binary(std::istream& in);
void save_field(const std::filesystem::path& path, const Field& f);
Field load_field(const std::filesystem::path& path);

// Columns ix, iy, x (or xi_x), y (or xi_y), re, im. Refuses grids above N = 256.
void write_field_csv(std::ostream& out, const Field& f);

}  // namespace halfwave
