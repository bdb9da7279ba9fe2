#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/frame_stack.hpp"
#include "dynspeckle/postprocess.hpp"

namespace httplib {
class Server;
}

namespace dynspeckle::service {

class UnknownStackError : public Error {
 public:
  explicit UnknownStackError(const std::string& id) : Error("unknown stack: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

struct ServiceOptions {
  std::uint32_t preview_factor = 2;
  std::uint32_t preview_max_frames = 256;
  unsigned threads = 0;
};

struct StackHandle {
  std::string id;
  std::string label;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t frames = 0;
  bool preview_available = false;
  std::uint32_t preview_width = 0;
  std::uint32_t preview_height = 0;
  std::uint32_t preview_frames = 0;
};

struct ChannelRequest {
  std::string stack_id;
  DescriptorParams descriptor;
  DisplayParams display;
  bool preview = true;
};

struct ComputeResult {
  GrayImage image;
  double compute_ms = 0.0;
  std::uint64_t degenerate_terms = 0;
  bool cache_hit = false;
};

struct ComposeResult {
  RgbImage image;
  double compute_ms = 0.0;
  std::uint64_t degenerate_terms = 0;
};

/// Tuning angles snap to this step (degrees) and exponents to kAlphaStep
/// before computing, so nearby slider positions share cache entries.
inline constexpr double kPhiStep = 0.5;
inline constexpr double kAlphaStep = 0.01;

double snap_phi(double phi_degrees);
double snap_alpha(double alpha);

/// In-memory stacks with cached descriptor maps. Thread safe.
class TuningService {
 public:
  explicit TuningService(ServiceOptions options = {});

  StackHandle add_stack(FrameStack stack);
  std::vector<StackHandle> list_stacks() const;
  StackHandle handle(const std::string& id) const;

  ComputeResult compute(const ChannelRequest& request);
  /// All three channels must agree on the preview flag.
  ComposeResult compose(const ChannelRequest& red, const ChannelRequest& green,
                        const ChannelRequest& blue);

  std::size_t cache_size() const;

  /// Registers the HTTP API on `server`.
  void mount(httplib::Server& server);

 private:
  struct Entry {
    StackHandle handle;
    std::shared_ptr<const FrameStack> full;
    std::shared_ptr<const FrameStack> preview;
  };
  using CacheKey = std::tuple<std::string, int, double, std::uint32_t, bool>;

  std::shared_ptr<const ActivityMap> activity(const ChannelRequest& request, bool& hit);
  const Entry& entry(const std::string& id) const;

  ServiceOptions options_;
  mutable std::shared_mutex stacks_mutex_;
  std::vector<std::unique_ptr<Entry>> stacks_;
  mutable std::mutex cache_mutex_;
  std::map<CacheKey, std::shared_ptr<const ActivityMap>> cache_;
};

}  // namespace dynspeckle::service
