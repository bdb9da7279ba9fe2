#include "tuning_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "dynspeckle/image_io.hpp"
#include "dynspeckle/presets.hpp"
#include "dynspeckle/stack_io.hpp"

namespace dynspeckle::service {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

json to_json(const StackHandle& h) {
  return {{"id", h.id},
          {"label", h.label},
          {"width", h.width},
          {"height", h.height},
          {"frames", h.frames},
          {"preview",
           {{"available", h.preview_available},
            {"width", h.preview_width},
            {"height", h.preview_height},
            {"frames", h.preview_frames}}}};
}

json to_json(const PresetChannel& c) {
  return {{"illumination", std::string(to_string(c.illumination))},
          {"wavelength_nm", wavelength_nm(c.illumination)},
          {"algo", std::string(to_string(c.algorithm))},
          {"phi", c.phi_degrees},
          {"alpha", c.alpha}};
}

double number_field(const json& body, const char* key, const char* field, double fallback) {
  if (!body.contains(key)) return fallback;
  const auto& v = body.at(key);
  if (!v.is_number()) throw InvalidArgumentError("must be a number", field);
  return v.get<double>();
}

std::string string_field(const json& body, const char* key, const char* field,
                         std::optional<std::string> fallback = {}) {
  if (!body.contains(key)) {
    if (fallback) return *fallback;
    throw InvalidArgumentError("is required", field);
  }
  const auto& v = body.at(key);
  if (!v.is_string()) throw InvalidArgumentError("must be a string", field);
  return v.get<std::string>();
}

std::optional<bool> bool_field(const json& body, const char* key) {
  if (!body.contains(key)) return std::nullopt;
  const auto& v = body.at(key);
  if (!v.is_boolean()) throw InvalidArgumentError("must be true or false", key);
  return v.get<bool>();
}

ChannelRequest parse_channel(const json& body, bool default_preview) {
  if (!body.is_object()) throw InvalidArgumentError("channel must be an object", "channels");
  ChannelRequest r;
  r.stack_id = string_field(body, "stack_id", "stack_id");
  r.descriptor.algorithm = parse_algorithm(string_field(body, "algo", "algo", "avd"));
  r.descriptor.phi_degrees = number_field(body, "phi", "phi_degrees", 0.0);
  if (body.contains("max_lag")) {
    const auto& v = body.at("max_lag");
    if (!v.is_number_unsigned()) throw InvalidArgumentError("must be a positive integer", "max_lag");
    r.descriptor.max_lag = v.get<std::uint32_t>();
  }
  r.display.alpha = number_field(body, "alpha", "alpha", 1.0);
  r.display.normalization = Normalization::parse(string_field(body, "norm", "norm", "minmax"));
  r.preview = bool_field(body, "preview").value_or(default_preview);
  return r;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& field = {}) {
  json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const UnknownStackError& e) {
    send_error(res, 404, e.what(), "stack_id");
  } catch (const InvalidArgumentError& e) {
    send_error(res, 422, e.what(), e.field());
  } catch (const InsufficientFramesError& e) {
    send_error(res, 422, e.what(), "frames");
  } catch (const CompositionError& e) {
    send_error(res, 422, e.what(), "channels");
  } catch (const DimensionMismatchError& e) {
    send_error(res, 422, e.what(), "channels");
  } catch (const Error& e) {
    send_error(res, 422, e.what(), "file");
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("malformed JSON: ") + e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

double snap_phi(double phi_degrees) {
  return std::clamp(std::round(phi_degrees / kPhiStep) * kPhiStep, 0.0, 180.0);
}

double snap_alpha(double alpha) {
  return std::max(kAlphaStep, std::round(alpha / kAlphaStep) * kAlphaStep);
}

TuningService::TuningService(ServiceOptions options) : options_(options) {
  if (options_.preview_factor == 0) throw InvalidArgumentError("must be positive", "preview_factor");
  if (options_.preview_max_frames == 0) {
    throw InvalidArgumentError("must be positive", "preview_max_frames");
  }
}

StackHandle TuningService::add_stack(FrameStack stack) {
  if (stack.empty()) throw InvalidArgumentError("stack has no frames", "file");
  auto e = std::make_unique<Entry>();
  e->full = std::make_shared<const FrameStack>(std::move(stack));
  const FrameStack& full = *e->full;

  std::uint32_t factor = options_.preview_factor;
  if (full.width() < factor || full.height() < factor) factor = 1;
  const std::uint32_t stride =
      (full.frame_count() + options_.preview_max_frames - 1) / options_.preview_max_frames;
  const std::uint32_t preview_frames = (full.frame_count() - 1) / stride + 1;
  const bool reduces = factor > 1 || stride > 1;
  if (reduces && preview_frames >= 3) {
    e->preview = std::make_shared<const FrameStack>(downsample(full, factor, stride));
  } else {
    e->preview = e->full;
  }

  StackHandle& h = e->handle;
  h.label = full.metadata().label;
  h.width = full.width();
  h.height = full.height();
  h.frames = full.frame_count();
  h.preview_available = e->preview != e->full;
  h.preview_width = e->preview->width();
  h.preview_height = e->preview->height();
  h.preview_frames = e->preview->frame_count();

  std::unique_lock lock(stacks_mutex_);
  h.id = "s" + std::to_string(stacks_.size() + 1);
  stacks_.push_back(std::move(e));
  return stacks_.back()->handle;
}

std::vector<StackHandle> TuningService::list_stacks() const {
  std::shared_lock lock(stacks_mutex_);
  std::vector<StackHandle> out;
  for (const auto& e : stacks_) out.push_back(e->handle);
  return out;
}

const TuningService::Entry& TuningService::entry(const std::string& id) const {
  std::shared_lock lock(stacks_mutex_);
  if (id.size() > 1 && id[0] == 's' &&
      std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const auto index = std::stoull(id.substr(1));
    if (index >= 1 && index <= stacks_.size()) return *stacks_[index - 1];
  }
  throw UnknownStackError(id);
}

StackHandle TuningService::handle(const std::string& id) const { return entry(id).handle; }

std::shared_ptr<const ActivityMap> TuningService::activity(const ChannelRequest& request, bool& hit) {
  const Entry& e = entry(request.stack_id);
  DescriptorParams params = request.descriptor;
  params.phi_degrees = params.algorithm == Algorithm::kGd ? 0.0 : snap_phi(params.phi_degrees);
  if (params.algorithm != Algorithm::kGd) params.max_lag.reset();
  const bool preview = request.preview && e.handle.preview_available;
  const CacheKey key{request.stack_id, static_cast<int>(params.algorithm), params.phi_degrees,
                     params.max_lag.value_or(0), preview};
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      hit = true;
      return it->second;
    }
  }
  hit = false;
  EngineOptions engine;
  engine.threads = options_.threads;
  auto map = std::make_shared<const ActivityMap>(
      compute_descriptor(preview ? *e.preview : *e.full, params, engine));
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(key, std::move(map)).first->second;
}

ComputeResult TuningService::compute(const ChannelRequest& request) {
  request.descriptor.validate();
  request.display.validate();
  const auto start = Clock::now();
  ComputeResult out;
  const auto map = activity(request, out.cache_hit);
  DisplayParams display = request.display;
  display.alpha = snap_alpha(display.alpha);
  out.image = render_gray(map->image, display);
  out.degenerate_terms = map->degenerate_terms;
  out.compute_ms = elapsed_ms(start);
  return out;
}

ComposeResult TuningService::compose(const ChannelRequest& red, const ChannelRequest& green,
                                     const ChannelRequest& blue) {
  if (red.preview != green.preview || red.preview != blue.preview) {
    throw InvalidArgumentError("channels mix preview and full resolution", "preview");
  }
  const ChannelRequest* channels[] = {&red, &green, &blue};
  for (const auto* c : channels) {
    c->descriptor.validate();
    c->display.validate();
  }
  const auto start = Clock::now();
  std::shared_ptr<const ActivityMap> maps[3];
  DisplayParams display[3];
  ComposeResult out;
  for (int i = 0; i < 3; ++i) {
    bool hit = false;
    maps[i] = activity(*channels[i], hit);
    display[i] = channels[i]->display;
    display[i].alpha = snap_alpha(display[i].alpha);
    out.degenerate_terms += maps[i]->degenerate_terms;
  }
  out.image = compose_rgb({{maps[0]->image, display[0]},
                           {maps[1]->image, display[1]},
                           {maps[2]->image, display[2]}});
  out.compute_ms = elapsed_ms(start);
  return out;
}

std::size_t TuningService::cache_size() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

void TuningService::mount(httplib::Server& server) {
  server.Get("/api/stacks", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& h : list_stacks()) list.push_back(to_json(h));
    res.set_content(list.dump(), "application/json");
  });

  server.Post("/api/stacks", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string label;
      std::string content;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("file")) throw InvalidArgumentError("multipart field 'file' missing", "file");
        const auto file = req.get_file_value("file");
        content = file.content;
        label = std::filesystem::path(file.filename).stem().string();
        if (req.has_file("label")) label = req.get_file_value("label").content;
      } else {
        content = req.body;
        if (req.has_param("label")) label = req.get_param_value("label");
      }
      const auto* bytes = reinterpret_cast<const std::uint8_t*>(content.data());
      const StackHandle h = add_stack(parse_stack({bytes, content.size()}, label));
      res.status = 201;
      res.set_content(to_json(h).dump(), "application/json");
    });
  });

  server.Post("/api/compute", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const ComputeResult r = compute(parse_channel(body, true));
      const auto png = encode_png(r.image);
      res.set_header("X-Compute-Ms", format_ms(r.compute_ms));
      res.set_header("X-Degenerate-Count", std::to_string(r.degenerate_terms));
      res.set_header("X-Cache", r.cache_hit ? "hit" : "miss");
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
  });

  server.Post("/api/compose", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const bool preview = bool_field(body, "preview").value_or(true);
      ChannelRequest ch[3];
      const char* keys[] = {"r", "g", "b"};
      if (body.contains("preset")) {
        const auto& preset = find_preset(string_field(body, "preset", "preset"));
        for (int i = 0; i < 3; ++i) {
          const PresetChannel& pc = preset.channel(keys[i][0]);
          if (body.contains("stacks")) {
            const auto& stacks = body.at("stacks");
            const std::string name(to_string(pc.illumination));
            if (!stacks.is_object() || !stacks.contains(name)) {
              throw InvalidArgumentError("no stack given for " + name + " illumination", "stacks");
            }
            ch[i].stack_id = string_field(stacks, name.c_str(), "stacks");
          } else {
            ch[i].stack_id = string_field(body, "stack_id", "stack_id");
          }
          ch[i].descriptor.algorithm = pc.algorithm;
          ch[i].descriptor.phi_degrees = pc.phi_degrees;
          ch[i].display.alpha = pc.alpha;
          ch[i].preview = preview;
        }
      } else {
        if (!body.contains("channels") || !body.at("channels").is_object()) {
          throw InvalidArgumentError("expected 'channels' with r, g and b", "channels");
        }
        const auto& channels = body.at("channels");
        for (int i = 0; i < 3; ++i) {
          if (!channels.contains(keys[i])) {
            throw InvalidArgumentError(std::string("channel '") + keys[i] + "' missing", "channels");
          }
          ch[i] = parse_channel(channels.at(keys[i]), preview);
        }
      }
      const ComposeResult r = compose(ch[0], ch[1], ch[2]);
      const auto png = encode_png(r.image);
      res.set_header("X-Compute-Ms", format_ms(r.compute_ms));
      res.set_header("X-Degenerate-Count", std::to_string(r.degenerate_terms));
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
  });

  server.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& p : composite_presets()) {
      list.push_back({{"name", std::string(p.name)},
                      {"description", std::string(p.description)},
                      {"channels", {{"r", to_json(p.red)}, {"g", to_json(p.green)}, {"b", to_json(p.blue)}}}});
    }
    res.set_content(list.dump(), "application/json");
  });
}

}  // namespace dynspeckle::service
