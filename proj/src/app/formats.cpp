#include "wavefield/app/formats.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "wavefield/errors.hpp"

namespace wf::app {

namespace fs = std::filesystem;

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace

void write_f32r(const fs::path& path, const Raster& raster) {
  if (raster.data.size() != raster.width * raster.height * raster.channels) {
    throw ContractError("write_f32r: raster storage does not match its dimensions");
  }
  std::vector<unsigned char> bytes;
  bytes.reserve(16 + 4 * raster.data.size());
  for (char c : {'F', '3', '2', 'R'}) bytes.push_back(static_cast<unsigned char>(c));
  put_u32(bytes, static_cast<std::uint32_t>(raster.width));
  put_u32(bytes, static_cast<std::uint32_t>(raster.height));
  put_u32(bytes, static_cast<std::uint32_t>(raster.channels));
  for (double v : raster.data) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  dump(path, bytes);
}

Raster read_f32r(const fs::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < 16 || !std::equal(bytes.begin(), bytes.begin() + 4, "F32R")) {
    throw InputError(path.string() + ": not an F32R file");
  }
  Raster r;
  r.width = get_u32(bytes.data() + 4);
  r.height = get_u32(bytes.data() + 8);
  r.channels = get_u32(bytes.data() + 12);
  const std::size_t count = r.width * r.height * r.channels;
  if (bytes.size() != 16 + 4 * count) {
    throw InputError(path.string() + ": length " + std::to_string(bytes.size()) + " does not match header (expected " +
                     std::to_string(16 + 4 * count) + ")");
  }
  r.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    r.data[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i)));
  }
  return r;
}

unsigned char quantize_u8(double value) {
  const double clamped = std::clamp(value, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(clamped * 255.0));
}

void write_ppm(const fs::path& path, const Raster& rgb) {
  if (rgb.channels != 3) throw ContractError("write_ppm: raster must have 3 channels");
  const std::string header =
      "P6\n" + std::to_string(rgb.width) + " " + std::to_string(rgb.height) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.reserve(header.size() + rgb.data.size());
  for (double v : rgb.data) bytes.push_back(quantize_u8(v));
  dump(path, bytes);
}

Raster read_ppm(const fs::path& path) {
  const auto bytes = slurp(path);
  std::size_t pos = 0;
  // Header tokens are separated by whitespace; '#' starts a comment line.
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') tok.push_back(static_cast<char>(bytes[pos++]));
    return tok;
  };
  if (next_token() != "P6") throw InputError(path.string() + ": not a binary PPM (P6)");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(next_token());
    h = std::stoul(next_token());
    maxval = std::stoul(next_token());
  } catch (const std::exception&) {
    throw InputError(path.string() + ": malformed PPM header");
  }
  if (maxval != 255) throw InputError(path.string() + ": only maxval 255 is supported");
  ++pos;  // single whitespace byte before the raster
  if (w == 0 || h == 0 || bytes.size() < pos + w * h * 3) {
    throw InputError(path.string() + ": truncated PPM raster");
  }
  Raster r(w, h, 3);
  for (std::size_t i = 0; i < w * h * 3; ++i) r.data[i] = bytes[pos + i] / 255.0;
  return r;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& prefix, const std::string& suffix) {
  if (!fs::is_directory(dir)) throw InputError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() && name.starts_with(prefix) && name.ends_with(suffix)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string indexed_name(const std::string& prefix, std::size_t index, const std::string& suffix) {
  char digits[16];
  std::snprintf(digits, sizeof digits, "%03zu", index);
  return prefix + digits + suffix;
}

}  // namespace wf::app
