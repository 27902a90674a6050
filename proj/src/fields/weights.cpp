#include "wavefield/fields/weights.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wavefield/app/formats.hpp"
#include "wavefield/errors.hpp"

namespace wf::fields {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_net(const SirenNet& net, const fs::path& dir, const std::string& prefix, std::ostream& meta) {
  meta << "layers = " << net.layers().size() << "\n";
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& l = net.layers()[i];
    meta << "l" << i << "_omega = " << format_double(l.omega) << "\n";
    meta << "l" << i << "_sinusoidal = " << (l.sinusoidal ? 1 : 0) << "\n";
    Raster w(l.in_dim(), l.out_dim(), 1);
    w.data.assign(l.weight.values().begin(), l.weight.values().end());
    app::write_f32r(dir / (prefix + "_l" + std::to_string(i) + "_weight.f32r"), w);
    Raster b(l.out_dim(), 1, 1);
    b.data.assign(l.bias.values().begin(), l.bias.values().end());
    app::write_f32r(dir / (prefix + "_l" + std::to_string(i) + "_bias.f32r"), b);
  }
}

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

const std::string& require(const std::map<std::string, std::string>& meta, const std::string& key,
                           const fs::path& path) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw InputError(path.string() + ": missing key '" + key + "'");
  return it->second;
}

SirenNet load_net(const fs::path& dir, const std::string& prefix, const std::map<std::string, std::string>& meta,
                  const fs::path& meta_path) {
  const std::size_t count = std::stoul(require(meta, "layers", meta_path));
  std::vector<SirenLayer> layers;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string base = prefix + "_l" + std::to_string(i);
    const Raster w = app::read_f32r(dir / (base + "_weight.f32r"));
    const Raster b = app::read_f32r(dir / (base + "_bias.f32r"));
    if (w.channels != 1 || b.channels != 1 || b.width != w.height || b.height != 1) {
      throw InputError(base + ": weight/bias records have inconsistent shapes");
    }
    const std::string idx = "l" + std::to_string(i);
    layers.push_back({diff::Tensor::from({w.height, w.width}, w.data, true), diff::Tensor::from({b.width}, b.data, true),
                      std::stod(require(meta, idx + "_omega", meta_path)),
                      require(meta, idx + "_sinusoidal", meta_path) == "1"});
  }
  return SirenNet(std::move(layers));
}

}  // namespace

void save_height_field(const HeightField& field, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream meta;
  meta << "# height field h = offset + scale * net(x1, x2, t)\n";
  meta << "offset = " << format_double(field.offset()) << "\n";
  meta << "scale = " << format_double(field.scale()) << "\n";
  save_net(field.net(), dir, "height", meta);
  std::ofstream(dir / "height_field.txt") << meta.str();
}

HeightField load_height_field(const fs::path& dir) {
  const fs::path meta_path = dir / "height_field.txt";
  const auto meta = read_meta(meta_path);
  return HeightField(load_net(dir, "height", meta, meta_path), std::stod(require(meta, "offset", meta_path)),
                     std::stod(require(meta, "scale", meta_path)));
}

void save_image_field(const ImageField& field, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream meta;
  meta << "# image field rgb = sigmoid(net(fourier(x)))\n";
  meta << "fourier = " << (field.encoding() ? "on" : "off") << "\n";
  if (field.encoding()) {
    meta << "fourier_bandwidth = " << format_double(field.encoding()->bandwidth()) << "\n";
    Raster b(2, field.encoding()->frequencies(), 1);
    b.data = field.encoding()->matrix();
    app::write_f32r(dir / "image_fourier_B.f32r", b);
  }
  save_net(field.net(), dir, "image", meta);
  std::ofstream(dir / "image_field.txt") << meta.str();
}

ImageField load_image_field(const fs::path& dir) {
  const fs::path meta_path = dir / "image_field.txt";
  const auto meta = read_meta(meta_path);
  std::optional<FourierEncoding> enc;
  if (require(meta, "fourier", meta_path) == "on") {
    Raster b = app::read_f32r(dir / "image_fourier_B.f32r");
    if (b.width != 2 || b.channels != 1) throw InputError("image_fourier_B.f32r: expected an [m,2] record");
    enc.emplace(std::move(b.data), std::stod(require(meta, "fourier_bandwidth", meta_path)));
  }
  return ImageField(std::move(enc), load_net(dir, "image", meta, meta_path));
}

}  // namespace wf::fields
