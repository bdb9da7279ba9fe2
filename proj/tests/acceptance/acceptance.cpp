// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failures.
#include <sys/resource.h>

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "commands.hpp"
#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/edges.hpp"
#include "dynspeckle/parallel.hpp"
#include "dynspeckle/presets.hpp"
#include "dynspeckle/simulator.hpp"
#include "dynspeckle/stack_io.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;
using namespace dynspeckle;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double peak_rss_mb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss / 1024.0;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Streaming AVD over a 300x300x4000 simulated stack read from disk.
Outcome throughput() {
  testing::TempDir dir;
  const fs::path path = dir / "paper_scale.spk";
  SimulationParams p;
  p.frames = 4000;
  p.seed = 5;
  const auto field = make_glyph_field(GlyphShape::kDisk, 300, 300, 0.5, 0.99);
  const auto g0 = Clock::now();
  generate_stack_to_file(field, p, path, 0);
  const double gen_s = seconds_since(g0);

  SpkFileSource source(path);
  const auto t0 = Clock::now();
  const auto map = avd_map(source, 5.0);
  const double secs = seconds_since(t0);
  const double rss = peak_rss_mb();
  const double auc = separation_score(map.image, field, 0.75);
  return {secs < 30.0 && rss < 200.0,
          fmt("AVD(phi=5) 300x300x4000 in %.2f s on %u threads, peak RSS %.1f MB "
              "(stack generation %.1f s, AUC %.4f)",
              secs, resolve_thread_count(0), rss, gen_s, auc)};
}

Outcome reduction_identities() {
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = oracle::random_stack(rng, 32, 32, 16);
    const auto avd = avd_map(s, 0.0).image;
    const auto fujii = fujii_map(s, 0.0).image;
    for (std::uint32_t y = 0; y < 32; ++y) {
      for (std::uint32_t x = 0; x < 32; ++x) {
        const auto I = oracle::series(s, x, y);
        const double wa = oracle::classic_avd(I), wf = oracle::classic_fujii(I);
        worst = std::max(worst, std::abs(avd.at(x, y) - wa) / std::max(1.0, std::abs(wa)));
        worst = std::max(worst, std::abs(fujii.at(x, y) - wf) / std::max(1.0, std::abs(wf)));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5.0, fmt("max rel error %.3g over 100 stacks in %.2f s", worst, secs)};
}

Outcome closed_forms() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  const std::uint32_t n = 16;
  for (int k = 0; k < 10; ++k) {
    const auto s = oracle::random_stack(rng, 8, 8, n, 1, 255);
    const auto m = fujii_map(s, 90.0).image;
    for (double v : m.values) worst = std::max(worst, std::abs(v - (n - 1)) / (n - 1));
  }
  for (int level : {1, 80, 255}) {
    const FrameStack s(4, 4, n, std::vector<std::uint8_t>(4 * 4 * n, static_cast<std::uint8_t>(level)));
    for (double phi : {10.0, 30.0, 45.0, 70.0, 90.0, 110.0, 170.0}) {
      const double want = (n - 2) * std::abs(std::tan(phi * std::numbers::pi / 360.0));
      const auto m = tau_map(s, phi);
      for (double v : m.image.values) worst = std::max(worst, std::abs(v - want) / std::max(1.0, want));
    }
  }
  const double per_triple = std::tan(35.0 * std::numbers::pi / 180.0);
  return {worst <= 1e-9 && std::abs(per_triple - 0.700208) < 5e-7,
          fmt("max rel error %.3g, per-triple tau(70) = %.6f", worst, per_triple)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  const std::vector<double> angles{0.0, 90.0, 180.0, 5.0, 37.5, 110.0};
  for (int k = 0; k < 50; ++k) {
    const auto s = oracle::random_stack(rng, 16, 16, 16);
    for (double phi : angles) {
      EngineOptions opt;
      opt.threads = 1 + k % 4;
      opt.block_bytes = 512;
      const auto a = avd_map(s, phi, opt).image;
      const auto f = fujii_map(s, phi, opt).image;
      const auto t = tau_map(s, phi, opt).image;
      for (std::uint32_t y = 0; y < 16; ++y) {
        for (std::uint32_t x = 0; x < 16; ++x) {
          const auto I = oracle::series(s, x, y);
          const double wa = oracle::avd(I, phi), wf = oracle::fujii(I, phi), wt = oracle::tau(I, phi);
          worst = std::max(worst, std::abs(a.at(x, y) - wa) / std::max(1.0, std::abs(wa)));
          worst = std::max(worst, std::abs(f.at(x, y) - wf) / std::max(1.0, std::abs(wf)));
          worst = std::max(worst, std::abs(t.at(x, y) - wt) / std::max(1.0, std::abs(wt)));
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("max rel error %.3g over 50 stacks x %zu angles", worst, angles.size())};
}

Outcome glyph_recovery() {
  const auto t0 = Clock::now();
  const auto field = make_glyph_field(GlyphShape::kDisk, 128, 128, 0.5, 0.99);
  SimulationParams p;
  p.frames = 200;
  p.seed = 1;
  const auto sim = generate_stack(field, p);
  const double auc = separation_score(avd_map(sim.stack, 0.0).image, field, 0.75);
  const double secs = seconds_since(t0);
  return {auc >= 0.95 && secs < 60.0, fmt("AUC %.4f in %.2f s", auc, secs)};
}

Outcome canny_fidelity() {
  RealImage step(64, 48);
  const std::uint32_t edge_col = 32;
  for (std::uint32_t y = 0; y < 48; ++y)
    for (std::uint32_t x = 0; x < 64; ++x) step.at(x, y) = x < edge_col ? 20.0 : 200.0;
  EdgeParams params;
  params.sigma = 1.0;
  params.high_threshold = 0.7;
  const auto edges = canny_edges(step, params);

  // Label 8-connected components and check column placement.
  std::vector<int> label(edges.pixels.size(), 0);
  int components = 0;
  bool placed = true;
  std::size_t count = 0;
  for (std::size_t i = 0; i < edges.pixels.size(); ++i) {
    if (!edges.pixels[i]) continue;
    ++count;
    const auto x = static_cast<std::int64_t>(i % 64);
    placed = placed && std::abs(x - static_cast<std::int64_t>(edge_col)) <= 1;
    if (label[i]) continue;
    ++components;
    std::vector<std::size_t> todo{i};
    label[i] = components;
    while (!todo.empty()) {
      const auto j = todo.back();
      todo.pop_back();
      const int jx = static_cast<int>(j % 64), jy = static_cast<int>(j / 64);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = jx + dx, ny = jy + dy;
          if (nx < 0 || ny < 0 || nx >= 64 || ny >= 48) continue;
          const std::size_t k = static_cast<std::size_t>(ny) * 64 + nx;
          if (edges.pixels[k] && !label[k]) {
            label[k] = components;
            todo.push_back(k);
          }
        }
      }
    }
  }
  bool spans = true;
  for (std::uint32_t y = 0; y < 48; ++y) {
    bool hit = false;
    for (std::uint32_t x = edge_col - 1; x <= edge_col + 1; ++x) hit = hit || edges.at(x, y);
    spans = spans && hit;
  }

  const RealImage flat(64, 48, 117.0);
  std::size_t flat_edges = 0;
  for (auto v : canny_edges(flat, params).pixels) flat_edges += v;

  return {components == 1 && placed && spans && flat_edges == 0,
          fmt("step: %d component(s), %zu px, within +-1 px: %s, spans all rows: %s; uniform: %zu px",
              components, count, placed ? "yes" : "no", spans ? "yes" : "no", flat_edges)};
}

Outcome preset_bindings() {
  // Golden preset bindings, one line per channel.
  const std::string golden =
      "fig4a r red avd 5 1\n"
      "fig4a g green avd 5 1\n"
      "fig4a b blue tau 80 1\n"
      "fig5a r infrared avd 0 1\n"
      "fig5a g infrared fujii 110 1\n"
      "fig5a b infrared tau 70 1\n"
      "fig6a r infrared avd 0 1\n"
      "fig6a g red avd 110 1\n"
      "fig6a b blue avd 70 1\n"
      "fig6b r infrared avd 5 2\n"
      "fig6b g infrared fujii 50 2\n"
      "fig6b b infrared tau 75 2\n";
  std::ostringstream got;
  for (const auto& p : composite_presets()) {
    for (char ch : {'r', 'g', 'b'}) {
      const auto& c = p.channel(ch);
      got << p.name << ' ' << ch << ' ' << to_string(c.illumination) << ' ' << to_string(c.algorithm) << ' '
          << c.phi_degrees << ' ' << c.alpha << '\n';
    }
  }
  return {got.str() == golden, got.str() == golden ? "4 presets, 12 bindings match" : "mismatch:\n" + got.str()};
}

using Snapshot = std::map<std::string, std::vector<std::uint8_t>>;

Snapshot snapshot(const fs::path& dir) {
  Snapshot files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file_bytes(e.path());
  }
  return files;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  if (code != 0) throw std::runtime_error("dynspeckle " + args[0] + ": " + err.str());
  return code;
}

Snapshot serve_session(const fs::path& stack, const fs::path& work) {
  const fs::path port_file = work / "port";
  fs::remove(port_file);
  std::thread server([&] {
    cli({"serve", "--port", "0", "--port-file", port_file.string(), "-i", stack.string()});
  });
  for (int i = 0; i < 400 && !fs::exists(port_file); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(25));
  int port = 0;
  std::ifstream(port_file) >> port;
  httplib::Client client("127.0.0.1", port);
  Snapshot responses;
  auto keep = [&](const std::string& name, const httplib::Result& res) {
    if (!res) return;
    std::string blob = std::to_string(res->status) + "\n" + res->get_header_value("X-Degenerate-Count") + "\n" +
                       res->get_header_value("Content-Type") + "\n" + res->body;
    responses[name] = {blob.begin(), blob.end()};
  };
  keep("stacks", client.Get("/api/stacks"));
  keep("presets", client.Get("/api/presets"));
  keep("compute",
       client.Post("/api/compute", R"({"stack_id":"s1","algo":"fujii","phi":50,"alpha":2})", "application/json"));
  keep("compute_full", client.Post("/api/compute", R"({"stack_id":"s1","algo":"tau","phi":70,"preview":false})",
                                   "application/json"));
  keep("compose", client.Post("/api/compose", R"({"preset":"fig6b","stack_id":"s1"})", "application/json"));
  cli::stop_serving();
  server.join();
  fs::remove(port_file);
  return responses;
}

Outcome determinism() {
  testing::TempDir dir;
  const fs::path out = dir / "out";
  const fs::path in = dir / "in";
  fs::create_directories(in);
  cli({"simulate", "-o", (in / "base.spk").string(), "--glyph", "strokes", "--size", "48", "--frames", "24",
       "--seed", "9"});
  {
    std::ofstream spec(in / "compose.json");
    spec << R"({"preset": "fig5a", "stack": "base.spk"})";
  }

  const std::vector<std::pair<std::string, std::function<Snapshot()>>> commands{
      {"simulate",
       [&] {
         cli({"simulate", "-o", (out / "sim.spk").string(), "--glyph", "disk", "--size", "40", "--frames", "30",
              "--seed", "42", "--threads", "3"});
         return snapshot(out);
       }},
      {"process",
       [&] {
         const auto s = (in / "base.spk").string();
         cli({"process", "-i", s, "-o", (out / "a.png").string(), "--algo", "avd", "--phi", "5", "--alpha", "2"});
         cli({"process", "-i", s, "-o", (out / "t.f32m").string(), "--algo", "tau", "--phi", "70"});
         cli({"process", "-i", s, "-o", (out / "g.pgm").string(), "--algo", "gd", "--max-lag", "4"});
         return snapshot(out);
       }},
      {"sweep",
       [&] {
         cli({"sweep", "-i", (in / "base.spk").string(), "-o", (out / "sweep").string(), "--algo", "avd,fujii,tau",
              "--phi", "0,50,110", "--alpha", "1,2"});
         return snapshot(out);
       }},
      {"compose",
       [&] {
         cli({"compose", "--spec", (in / "compose.json").string(), "-o", (out / "rgb.png").string()});
         return snapshot(out);
       }},
      {"edges",
       [&] {
         const auto map = (out / "map.pgm").string();
         cli({"process", "-i", (in / "base.spk").string(), "-o", map, "--phi", "0"});
         fs::remove(map + ".json");
         cli({"edges", "-i", map, "-o", (out / "edges.pgm").string(), "-t", "0.3", "--sigma", "1.2"});
         return snapshot(out);
       }},
      {"serve", [&] { return serve_session(in / "base.spk", out); }},
  };

  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const auto& [name, run] : commands) {
    fs::remove_all(out);
    fs::create_directories(out);
    const Snapshot first = run();
    fs::remove_all(out);
    fs::create_directories(out);
    const Snapshot second = run();
    files += first.size();
    if (first.empty() || first != second) differing.push_back(name);
  }
  std::string detail = fmt("6 subcommands, %zu outputs compared byte for byte", files);
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  // Throughput runs first so the peak RSS reading reflects only the streaming run.
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {5, throughput},      {1, reduction_identities}, {2, closed_forms},   {3, oracle_equivalence},
      {4, glyph_recovery},  {6, canny_fidelity},        {7, preset_bindings}, {8, determinism},
  };
  std::map<int, Outcome> results;
  for (const auto& [id, check] : criteria) {
    try {
      results[id] = check();
    } catch (const std::exception& e) {
      results[id] = {false, std::string("exception: ") + e.what()};
    }
  }
  int failures = 0;
  for (const auto& [id, r] : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << r.detail << '\n';
    failures += !r.pass;
  }
  return failures;
}
