#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dynspeckle::cli {

namespace fs = std::filesystem;

struct ProcessOptions {
  fs::path input;
  fs::path output;
  std::string algo = "avd";
  double phi = 0.0;
  double alpha = 1.0;
  std::string norm = "minmax";
  std::optional<fs::path> lut;
  std::optional<std::uint32_t> max_lag;
  unsigned threads = 0;
};

struct SweepOptions {
  fs::path input;
  fs::path output_dir;
  std::vector<std::string> algos{"avd"};
  std::vector<double> phis{0.0};
  std::vector<double> alphas{1.0};
  std::string norm = "minmax";
  std::optional<std::uint32_t> max_lag;
  std::size_t columns = 0;
  unsigned threads = 0;
};

struct ComposeOptions {
  fs::path spec;
  fs::path output;
  unsigned threads = 0;
};

struct EdgesOptions {
  fs::path input;
  fs::path output;
  double threshold = 0.7;
  double sigma = 1.4;
  double low_ratio = 0.4;
};

struct SimulateOptions {
  fs::path output;
  std::optional<fs::path> truth;
  std::optional<std::string> glyph;
  std::optional<fs::path> field;
  std::uint32_t frames = 200;
  std::uint32_t size = 128;
  std::optional<std::uint32_t> width;
  std::optional<std::uint32_t> height;
  std::uint64_t seed = 1;
  double grain = 1.0;
  double mean = 80.0;
  double rho_in = 0.5;
  double rho_out = 0.99;
  unsigned threads = 0;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<fs::path> inputs;
  std::optional<fs::path> port_file;
  std::uint32_t preview_factor = 2;
  unsigned threads = 0;
};

void run_process(const ProcessOptions& options, std::ostream& out);
void run_sweep(const SweepOptions& options, std::ostream& out);
void run_compose(const ComposeOptions& options, std::ostream& out);
void run_edges(const EdgesOptions& options, std::ostream& out);
void run_simulate(const SimulateOptions& options, std::ostream& out);
/// Blocks until stop_serving() is called or the process is interrupted.
void run_serve(const ServeOptions& options, std::ostream& out);
void stop_serving();

}  // namespace dynspeckle::cli
