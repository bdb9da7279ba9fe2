#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "common.hpp"
#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/postprocess.hpp"
#include "dynspeckle/presets.hpp"
#include "provenance.hpp"

namespace dynspeckle::cli {
namespace {

using json = nlohmann::json;

struct ChannelSource {
  fs::path map;    // precomputed map, or
  fs::path stack;  // stack plus descriptor
  DescriptorParams descriptor;
  DisplayParams display;
};

const json& member(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.is_object() || !obj.contains(key)) throw InvalidArgumentError("'" + key + "' missing", field);
  return obj.at(key);
}

std::string text(const json& obj, const std::string& key, const std::string& field) {
  const auto& v = member(obj, key, field);
  if (!v.is_string()) throw InvalidArgumentError("'" + key + "' must be a string", field);
  return v.get<std::string>();
}

double number(const json& obj, const std::string& key, const std::string& field, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InvalidArgumentError("'" + key + "' must be a number", field);
  return v.get<double>();
}

Normalization normalization(const json& obj, const std::string& field) {
  if (!obj.contains("norm")) return Normalization::min_max();
  try {
    return Normalization::parse(text(obj, "norm", field));
  } catch (const InvalidArgumentError& e) {
    throw InvalidArgumentError(e.what(), field);
  }
}

ChannelSource explicit_channel(const json& spec, const std::string& key, const fs::path& base) {
  const json& ch = member(spec, key, key);
  if (!ch.is_object()) throw InvalidArgumentError("channel must be an object", key);
  ChannelSource s;
  if (ch.contains("map")) {
    s.map = base / text(ch, "map", key);
  } else if (ch.contains("stack")) {
    s.stack = base / text(ch, "stack", key);
    s.descriptor.algorithm = parse_algorithm(ch.contains("algo") ? text(ch, "algo", key) : "avd");
    s.descriptor.phi_degrees = number(ch, "phi", key, 0.0);
    if (ch.contains("max_lag")) s.descriptor.max_lag = static_cast<std::uint32_t>(number(ch, "max_lag", key, 0));
  } else {
    throw InvalidArgumentError("channel needs 'map' or 'stack'", key);
  }
  s.display = {number(ch, "alpha", key, 1.0), normalization(ch, key)};
  return s;
}

ChannelSource preset_channel(const json& spec, const CompositePreset& preset, const std::string& key,
                             const fs::path& base) {
  const PresetChannel& pc = preset.channel(key[0]);
  ChannelSource s;
  s.display = {pc.alpha, normalization(spec, key)};
  if (spec.contains("maps")) {
    s.map = base / text(spec.at("maps"), key, key);
    return s;
  }
  s.descriptor.algorithm = pc.algorithm;
  s.descriptor.phi_degrees = pc.phi_degrees;
  if (spec.contains("stacks")) {
    s.stack = base / text(spec.at("stacks"), std::string(to_string(pc.illumination)), key);
  } else if (spec.contains("stack")) {
    s.stack = base / text(spec, "stack", key);
  } else {
    throw InvalidArgumentError("preset needs 'maps', 'stacks' or 'stack'", "preset");
  }
  return s;
}

}  // namespace

void run_compose(const ComposeOptions& o, std::ostream& out) {
  require_exists(o.spec);
  if (extension_of(o.output) != ".png") throw InvalidArgumentError("output must be a .png file", "output");
  std::ifstream in(o.spec);
  std::stringstream ss;
  ss << in.rdbuf();
  json spec;
  try {
    spec = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("cannot parse compose spec: ") + e.what(), "spec");
  }
  if (!spec.is_object()) throw InvalidArgumentError("compose spec must be a JSON object", "spec");
  const fs::path base = o.spec.parent_path();
  const char* keys[] = {"r", "g", "b"};

  std::vector<ChannelSource> sources;
  std::string preset_name;
  if (spec.contains("preset")) {
    preset_name = text(spec, "preset", "preset");
    const CompositePreset& preset = find_preset(preset_name);
    for (const char* k : keys) sources.push_back(preset_channel(spec, preset, k, base));
  } else {
    const json& channels = spec.contains("channels") ? spec.at("channels") : spec;
    for (const char* k : keys) sources.push_back(explicit_channel(channels, k, base));
  }
  for (const auto& s : sources) {
    s.display.validate();
    if (!s.stack.empty()) s.descriptor.validate();
  }

  EngineOptions engine;
  engine.threads = o.threads;
  std::map<fs::path, FrameStack> stacks;
  std::vector<RealImage> maps;
  json record = provenance_record("compose");
  if (!preset_name.empty()) record["preset"] = preset_name;
  json& channels = record["channels"];
  for (std::size_t i = 0; i < 3; ++i) {
    const ChannelSource& s = sources[i];
    json entry{{"alpha", s.display.alpha}, {"normalization", s.display.normalization.to_string()}};
    if (!s.map.empty()) {
      maps.push_back(load_map(s.map));
      entry["map"] = {{"path", s.map.generic_string()}, {"sha256", sha256_file(s.map)}};
    } else {
      auto it = stacks.find(s.stack);
      if (it == stacks.end()) it = stacks.emplace(s.stack, load_stack(s.stack)).first;
      const ActivityMap m = compute_descriptor(it->second, s.descriptor, engine);
      maps.push_back(m.image);
      entry["stack"] = {{"path", s.stack.generic_string()}, {"sha256", stack_digest(s.stack)}};
      entry["algorithm"] = std::string(to_string(s.descriptor.algorithm));
      entry["phi_degrees"] = s.descriptor.phi_degrees;
      if (s.descriptor.max_lag) entry["max_lag"] = *s.descriptor.max_lag;
      entry["degenerate_terms"] = m.degenerate_terms;
    }
    channels[keys[i]] = entry;
  }

  const RgbImage rgb = compose_rgb({{maps[0], sources[0].display},
                                    {maps[1], sources[1].display},
                                    {maps[2], sources[2].display}});
  write_png(rgb, o.output);
  record["width"] = rgb.width;
  record["height"] = rgb.height;
  record["output"] = o.output.filename().generic_string();
  write_sidecar(o.output, record);
  out << "wrote " << o.output.generic_string() << " (" << rgb.width << "x" << rgb.height << ")\n";
}

}  // namespace dynspeckle::cli
