#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavefield/raster.hpp"

// On-disk formats shared by every command.
//
// F32R: "F32R", then little-endian uint32 width, height, channels, then
// width*height*channels little-endian IEEE-754 float32 values, row-major and
// channel-interleaved. File length is exactly 16 + 4*W*H*C bytes.
//
// PPM: binary P6 with maxval 255. Samples map to [0,1] as byte/255 and back
// as round(clamp(v)*255); no transfer function is applied.
namespace wf::app {

void write_f32r(const std::filesystem::path& path, const Raster& raster);
Raster read_f32r(const std::filesystem::path& path);

void write_ppm(const std::filesystem::path& path, const Raster& rgb);
Raster read_ppm(const std::filesystem::path& path);

/// 8-bit quantization used by write_ppm, exposed so callers can predict output.
unsigned char quantize_u8(double value);

/// Sorted list of regular files in `dir` whose names start with `prefix` and
/// end with `suffix`.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& prefix,
                                              const std::string& suffix);

/// Zero-padded three-digit frame name, e.g. ("frame_", 7, ".ppm") -> frame_007.ppm.
std::string indexed_name(const std::string& prefix, std::size_t index, const std::string& suffix);

}  // namespace wf::app
