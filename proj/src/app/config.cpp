#include "wavefield/app/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "wavefield/errors.hpp"

namespace wf::app {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) throw InputError("config: bad value '" + value + "' for " + key);
  return out;
}

using Setter = std::function<void(training::TrainConfig&, const std::string&, const std::string&)>;

template <typename T, typename Member>
Setter number(Member member) {
  return [member](training::TrainConfig& c, const std::string& key, const std::string& value) {
    c.*member = parse_number<T>(key, value);
  };
}

const std::map<std::string, Setter>& setters() {
  using C = training::TrainConfig;
  static const std::map<std::string, Setter> table = {
      {"seed", number<std::uint64_t>(&C::seed)},
      {"frames", number<std::size_t>(&C::frames)},
      {"iters_stage1", number<std::size_t>(&C::iters_stage1)},
      {"iters_stage2", number<std::size_t>(&C::iters_stage2)},
      {"lr_stage1", number<double>(&C::lr_stage1)},
      {"lr_stage2", number<double>(&C::lr_stage2)},
      {"n_refraction", number<double>(&C::n_refraction)},
      {"omega0", number<double>(&C::omega0)},
      {"height_hidden", number<std::size_t>(&C::height_hidden)},
      {"image_hidden", number<std::size_t>(&C::image_hidden)},
      {"fourier_m", number<std::size_t>(&C::fourier_m)},
      {"fourier_bandwidth", number<double>(&C::fourier_bandwidth)},
      {"height_offset", number<double>(&C::height_offset)},
      {"height_scale", number<double>(&C::height_scale)},
      {"loss_mode",
       [](C& c, const std::string& key, const std::string& value) {
         const auto mode = training::parse_loss_mode(value);
         if (!mode) throw InputError("config: " + key + " must be l1 or ndir3, got '" + value + "'");
         c.loss_mode = *mode;
       }},
      {"fourier",
       [](C& c, const std::string& key, const std::string& value) {
         if (value == "on") {
           c.fourier = true;
         } else if (value == "off") {
           c.fourier = false;
         } else {
           throw InputError("config: " + key + " must be on or off, got '" + value + "'");
         }
       }},
  };
  return table;
}

}  // namespace

training::TrainConfig parse_config(const std::string& text) {
  training::TrainConfig config;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw InputError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InputError("config line " + std::to_string(number) + ": repeated key '" + key + "'");
    it->second(config, key, value);
  }
  training::validate(config);
  return config;
}

training::TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const training::TrainConfig& c) {
  std::string out;
  char line[96];
  auto put_u = [&](const char* key, std::uint64_t v) {
    std::snprintf(line, sizeof line, "%s = %llu\n", key, static_cast<unsigned long long>(v));
    out += line;
  };
  auto put_d = [&](const char* key, double v) {
    std::snprintf(line, sizeof line, "%s = %.17g\n", key, v);
    out += line;
  };
  put_u("seed", c.seed);
  put_u("frames", c.frames);
  out += "loss_mode = " + training::to_string(c.loss_mode) + "\n";
  put_d("n_refraction", c.n_refraction);
  put_d("omega0", c.omega0);
  put_u("height_hidden", c.height_hidden);
  put_u("image_hidden", c.image_hidden);
  put_u("fourier_m", c.fourier_m);
  put_d("fourier_bandwidth", c.fourier_bandwidth);
  put_d("height_offset", c.height_offset);
  put_d("height_scale", c.height_scale);
  put_d("lr_stage1", c.lr_stage1);
  put_u("iters_stage1", c.iters_stage1);
  put_d("lr_stage2", c.lr_stage2);
  put_u("iters_stage2", c.iters_stage2);
  out += std::string("fourier = ") + (c.fourier ? "on" : "off") + "\n";
  return out;
}

}  // namespace wf::app
