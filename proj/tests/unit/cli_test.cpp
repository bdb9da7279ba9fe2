#include "cli.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/edges.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/postprocess.hpp"
#include "dynspeckle/presets.hpp"
#include "dynspeckle/simulator.hpp"
#include "dynspeckle/stack_io.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace dynspeckle {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

bool has_partial_files(const fs::path& dir) {
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().string().find(".partial") != std::string::npos) return true;
  }
  return false;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(101);
    stack_ = oracle::random_stack(rng, 12, 10, 8, 1, 255);
    write_stack(stack_, dir_ / "s.spk");
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  testing::TempDir dir_;
  FrameStack stack_;
};

TEST_F(CliTest, ProcessWritesRenderedMapAndSidecar) {
  const CliRun r = run({"process", "--algo", "avd", "--phi", "5", "--alpha", "2", "-i", path("s.spk"), "-o",
                     path("out.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const GrayImage img = read_pgm(dir_ / "out.pgm");
  EXPECT_EQ(img, render_gray(avd_map(stack_, 5.0).image, {2.0, Normalization::min_max()}));

  const json side = read_json(dir_ / "out.pgm.json");
  EXPECT_EQ(side["algorithm"], "avd");
  EXPECT_EQ(side["phi_degrees"], 5.0);
  EXPECT_EQ(side["alpha"], 2.0);
  EXPECT_EQ(side["normalization"], "minmax");
  EXPECT_EQ(side["frames"], 8);
  EXPECT_EQ(side["input"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(side["tool"], "dynspeckle");
}

TEST_F(CliTest, ProcessFormatsByExtension) {
  ASSERT_EQ(run({"process", "--algo", "tau", "--phi", "70", "-i", path("s.spk"), "-o", path("m.f32m")}).code, 0);
  const RealImage raw = read_f32m(dir_ / "m.f32m");
  const RealImage want = tau_map(stack_, 70.0).image;
  ASSERT_EQ(raw.size(), want.size());
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_FLOAT_EQ(raw.values[i], want.values[i]);

  std::string csv;
  for (int i = 0; i < 256; ++i) csv += std::to_string(i) + "," + std::to_string(i) + ",0," + std::to_string(255 - i) + "\n";
  write_text(dir_ / "lut.csv", csv);
  ASSERT_EQ(run({"process", "-i", path("s.spk"), "-o", path("c.png"), "--lut", path("lut.csv")}).code, 0);
  EXPECT_EQ(read_image(dir_ / "c.png").channels, 3u);
  EXPECT_EQ(run({"process", "-i", path("s.spk"), "-o", path("c.pgm"), "--lut", path("lut.csv")}).code, 2);

  ASSERT_EQ(run({"process", "--algo", "gd", "-i", path("s.spk"), "-o", path("g.png")}).code, 0);
  EXPECT_EQ(read_image(dir_ / "g.png").channels, 1u);
  EXPECT_EQ(run({"process", "-i", path("s.spk"), "-o", path("x.bmp")}).code, 2);
}

TEST_F(CliTest, ProcessReadsFrameDirectories) {
  fs::create_directories(dir_ / "frames");
  for (std::uint32_t k = 0; k < stack_.frame_count(); ++k) {
    GrayImage g(stack_.width(), stack_.height());
    std::copy(stack_.frame(k).begin(), stack_.frame(k).end(), g.pixels.begin());
    write_pgm(g, dir_ / "frames" / ("f" + std::to_string(k) + ".pgm"));
  }
  ASSERT_EQ(run({"process", "-i", path("frames"), "-o", path("a.pgm")}).code, 0);
  ASSERT_EQ(run({"process", "-i", path("s.spk"), "-o", path("b.pgm")}).code, 0);
  EXPECT_EQ(read_pgm(dir_ / "a.pgm"), read_pgm(dir_ / "b.pgm"));
  EXPECT_EQ(read_json(dir_ / "a.pgm.json")["input"]["sha256"], read_json(dir_ / "b.pgm.json")["input"]["sha256"]);
}

TEST_F(CliTest, FailuresExitTwoWithOneLineReason) {
  CliRun r = run({"process", "-i", path("missing.spk"), "-o", path("o.pgm")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.spk"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = run({"process", "--phi", "181", "-i", path("s.spk"), "-o", path("o.pgm")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("phi_degrees"), std::string::npos);

  EXPECT_EQ(run({"process", "--algo", "median", "-i", path("s.spk"), "-o", path("o.pgm")}).code, 2);
  EXPECT_EQ(run({"process", "-i", path("s.spk")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"process", "-i", path("s.spk"), "-o", path("nodir/o.pgm")}).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "o.pgm"));
  EXPECT_FALSE(has_partial_files(dir_.path()));
}

TEST_F(CliTest, HelpAndVersionSucceed) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"sweep", "--help"}).code, 0);
  const CliRun v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST_F(CliTest, SweepCardinalityAndIndex) {
  ASSERT_EQ(run({"sweep", "-i", path("s.spk"), "-o", path("sw"), "--algo", "avd", "--phi", "0,5", "--alpha",
                 "1"}).code,
            0);
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "avd_phi0_a1.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "avd_phi5_a1.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "avd_phi5_a1.pgm.json"));
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "contact_sheet.png"));
  EXPECT_FALSE(fs::exists(dir_ / "sw" / "contact_sheet_p2.png"));
  std::ifstream in(dir_ / "sw" / "index.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "algorithm,phi,alpha,file,page,tile");
  EXPECT_EQ(lines[2], "avd,5,1,avd_phi5_a1.pgm,contact_sheet.png,2");
  EXPECT_EQ(read_pgm(dir_ / "sw" / "avd_phi5_a1.pgm"), render_gray(avd_map(stack_, 5.0).image, {}));
}

TEST_F(CliTest, SweepCoversPublishedAnglesAndFractionalNames) {
  ASSERT_EQ(run({"sweep", "-i", path("s.spk"), "-o", path("sw"), "--algo", "tau,fujii", "--phi",
                 "0,5,50,70,75,80,110", "--alpha", "0.5,2"}).code,
            0);
  for (const char* algo : {"tau", "fujii"}) {
    for (const char* phi : {"0", "5", "50", "70", "75", "80", "110"}) {
      for (const char* a : {"0.5", "2"}) {
        EXPECT_TRUE(fs::exists(dir_ / "sw" / (std::string(algo) + "_phi" + phi + "_a" + a + ".pgm")));
      }
    }
  }
}

TEST_F(CliTest, SweepPagesAfterSixtyFourTiles) {
  std::string phis;
  for (int i = 0; i < 65; ++i) phis += (i ? "," : "") + std::to_string(i);
  ASSERT_EQ(run({"sweep", "-i", path("s.spk"), "-o", path("sw"), "--phi", phis}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "contact_sheet.png"));
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "contact_sheet_p2.png"));
  std::ifstream in(dir_ / "sw" / "index.csv");
  std::string line, last;
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(last, "avd,64,1,avd_phi64_a1.pgm,contact_sheet_p2.png,1");
}

TEST_F(CliTest, SweepRejectsEmptyAndDuplicateLists) {
  cli::SweepOptions o;
  o.input = dir_ / "s.spk";
  o.output_dir = dir_ / "sw";
  o.phis.clear();
  EXPECT_THROW(cli::run_sweep(o, std::cout), InvalidArgumentError);
  EXPECT_EQ(run({"sweep", "-i", path("s.spk"), "-o", path("sw"), "--phi", "5,5"}).code, 2);
  EXPECT_EQ(run({"sweep", "-i", path("s.spk"), "-o", path("sw"), "--alpha", "0"}).code, 2);
}

TEST_F(CliTest, SweepIsThreadInvariant) {
  const std::vector<std::string> base{"sweep", "-i", path("s.spk"), "--algo", "avd,fujii,tau,gd", "--phi", "0,45"};
  auto a = base, b = base;
  a.insert(a.end(), {"-o", path("a"), "--threads", "1"});
  b.insert(b.end(), {"-o", path("b"), "--threads", "3"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(read_file_bytes(e.path()), read_file_bytes(dir_ / "b" / e.path().filename()))
        << e.path().filename();
  }
}

TEST_F(CliTest, ComposePresetOverMaps) {
  for (const char* c : {"r", "g", "b"}) {
    ASSERT_EQ(run({"process", "-i", path("s.spk"), "-o", path(std::string(c) + ".f32m")}).code, 0);
  }
  write_text(dir_ / "spec.json", R"({"preset": "fig6b", "maps": {"r": "r.f32m", "g": "g.f32m", "b": "b.f32m"}})");
  const CliRun r = run({"compose", "-i", path("spec.json"), "-o", path("rgb.png")});
  ASSERT_EQ(r.code, 0) << r.err;
  const DecodedImage img = read_image(dir_ / "rgb.png");
  EXPECT_EQ(img.channels, 3u);
  const json side = read_json(dir_ / "rgb.png.json");
  EXPECT_EQ(side["preset"], "fig6b");
  EXPECT_EQ(side["channels"]["g"]["alpha"], 2.0);
}

TEST_F(CliTest, ComposeIdenticalSourcesGiveGray) {
  write_text(dir_ / "spec.json", R"({
    "r": {"stack": "s.spk", "algo": "avd", "phi": 5, "alpha": 1},
    "g": {"stack": "s.spk", "algo": "avd", "phi": 5, "alpha": 1},
    "b": {"stack": "s.spk", "algo": "avd", "phi": 5, "alpha": 1}})");
  ASSERT_EQ(run({"compose", "-i", path("spec.json"), "-o", path("gray.png")}).code, 0);
  const DecodedImage img = read_image(dir_ / "gray.png");
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    ASSERT_EQ(img.pixels[i], img.pixels[i + 1]);
    ASSERT_EQ(img.pixels[i], img.pixels[i + 2]);
  }
}

TEST_F(CliTest, ComposePresetComputesFromStacks) {
  write_text(dir_ / "spec.json", R"({"preset": "fig5a", "stacks": {"infrared": "s.spk"}})");
  ASSERT_EQ(run({"compose", "-i", path("spec.json"), "-o", path("p.png")}).code, 0);
  const json side = read_json(dir_ / "p.png.json");
  EXPECT_EQ(side["channels"]["g"]["algorithm"], "fujii");
  EXPECT_EQ(side["channels"]["g"]["phi_degrees"], 110.0);
  EXPECT_EQ(side["channels"]["b"]["algorithm"], "tau");

  const auto& preset = find_preset("fig5a");
  const RealImage r = avd_map(stack_, 0).image;
  const RealImage g = fujii_map(stack_, 110).image;
  const RealImage b = tau_map(stack_, 70).image;
  const auto want = compose_rgb({{r, {preset.red.alpha, {}}},
                                 {g, {preset.green.alpha, {}}},
                                 {b, {preset.blue.alpha, {}}}});
  EXPECT_EQ(read_image(dir_ / "p.png").pixels, want.pixels);

  write_text(dir_ / "bad.json", R"({"preset": "fig4a", "stacks": {"infrared": "s.spk"}})");
  EXPECT_EQ(run({"compose", "-i", path("bad.json"), "-o", path("q.png")}).code, 2);
}

TEST_F(CliTest, ComposeErrors) {
  write_text(dir_ / "two.json", R"({"r": {"map": "x.f32m"}, "g": {"map": "x.f32m"}})");
  CliRun r = run({"compose", "-i", path("two.json"), "-o", path("o.png")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("b:"), std::string::npos) << r.err;

  write_text(dir_ / "missing.json",
             R"({"r": {"map": "nope.f32m"}, "g": {"map": "nope.f32m"}, "b": {"map": "nope.f32m"}})");
  r = run({"compose", "-i", path("missing.json"), "-o", path("o.png")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.f32m"), std::string::npos);

  write_text(dir_ / "preset.json", R"({"preset": "fig9", "maps": {}})");
  EXPECT_EQ(run({"compose", "-i", path("preset.json"), "-o", path("o.png")}).code, 2);
  write_text(dir_ / "broken.json", "{ not json");
  EXPECT_EQ(run({"compose", "-i", path("broken.json"), "-o", path("o.png")}).code, 2);

  write_f32m(RealImage(2, 2, 1.0), dir_ / "small.f32m");
  write_f32m(RealImage(3, 3, 1.0), dir_ / "big.f32m");
  write_text(dir_ / "mismatch.json",
             R"({"r": {"map": "small.f32m"}, "g": {"map": "small.f32m"}, "b": {"map": "big.f32m"}})");
  EXPECT_EQ(run({"compose", "-i", path("mismatch.json"), "-o", path("o.png")}).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "o.png"));
}

TEST_F(CliTest, EdgesOnStepUniformAndColour) {
  GrayImage step(32, 32);
  for (std::uint32_t y = 0; y < 32; ++y)
    for (std::uint32_t x = 16; x < 32; ++x) step.at(x, y) = 255;
  write_pgm(step, dir_ / "step.pgm");
  ASSERT_EQ(run({"edges", "-t", "0.7", "--sigma", "1", "-i", path("step.pgm"), "-o", path("e.pgm")}).code, 0);
  const GrayImage e = read_pgm(dir_ / "e.pgm");
  EXPECT_EQ(e, edge_map_to_display(canny_edges(to_real(step), {1.0, 0.7, 0.4})));
  EXPECT_GT(std::count(e.pixels.begin(), e.pixels.end(), 255), 0);

  write_pgm(GrayImage(16, 16, 90), dir_ / "flat.pgm");
  ASSERT_EQ(run({"edges", "-i", path("flat.pgm"), "-o", path("f.pgm")}).code, 0);
  const GrayImage f = read_pgm(dir_ / "f.pgm");
  EXPECT_TRUE(std::all_of(f.pixels.begin(), f.pixels.end(), [](auto v) { return v == 0; }));

  RgbImage rgb(32, 32);
  for (std::uint32_t y = 0; y < 32; ++y)
    for (std::uint32_t x = 16; x < 32; ++x) rgb.set(x, y, {255, 255, 255});
  write_png(rgb, dir_ / "rgb.png");
  ASSERT_EQ(run({"edges", "--sigma", "1", "-i", path("rgb.png"), "-o", path("c.pgm")}).code, 0);
  EXPECT_EQ(read_pgm(dir_ / "c.pgm"), e);

  EXPECT_EQ(run({"edges", "-t", "0", "-i", path("step.pgm"), "-o", path("z.pgm")}).code, 2);
  EXPECT_EQ(run({"edges", "-i", path("step.pgm"), "-o", path("z.png")}).code, 2);
}

TEST_F(CliTest, SimulateDeterministicBySeed) {
  const std::vector<std::string> base{"simulate", "--glyph", "disk", "--frames", "20", "--size", "24"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"-o", path("a.spk"), "--seed", "1"});
  b.insert(b.end(), {"-o", path("b.spk"), "--seed", "1"});
  c.insert(c.end(), {"-o", path("c.spk"), "--seed", "2"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  ASSERT_EQ(run(c).code, 0);
  EXPECT_EQ(read_file_bytes(dir_ / "a.spk"), read_file_bytes(dir_ / "b.spk"));
  EXPECT_NE(read_file_bytes(dir_ / "a.spk"), read_file_bytes(dir_ / "c.spk"));
  EXPECT_EQ(read_file_bytes(dir_ / "a.truth.f32m"), read_file_bytes(dir_ / "b.truth.f32m"));

  const FrameStack s = read_stack(dir_ / "a.spk");
  EXPECT_EQ(s.width(), 24u);
  EXPECT_EQ(s.frame_count(), 20u);
  const auto truth = ActivityField::from_image(read_f32m(dir_ / "a.truth.f32m"));
  const auto glyph = make_glyph_field(GlyphShape::kDisk, 24, 24, 0.5, 0.99);
  ASSERT_EQ(truth.rho.size(), glyph.rho.size());
  for (std::size_t i = 0; i < glyph.rho.size(); ++i) EXPECT_FLOAT_EQ(truth.rho[i], glyph.rho[i]);
}

TEST_F(CliTest, SimulateFromFieldFileAndErrors) {
  RealImage rho(10, 6, 0.9);
  rho.at(3, 3) = 0.0;
  write_f32m(rho, dir_ / "field.f32m");
  ASSERT_EQ(run({"simulate", "--field", path("field.f32m"), "--frames", "5", "-o", path("f.spk"), "--truth",
                 path("t.f32m")}).code,
            0);
  EXPECT_EQ(read_stack(dir_ / "f.spk").width(), 10u);
  EXPECT_TRUE(fs::exists(dir_ / "t.f32m"));

  CliRun r = run({"simulate", "--frames", "1", "-o", path("x.spk")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("frames"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--glyph", "hexagon", "-o", path("x.spk")}).code, 2);
  EXPECT_EQ(run({"simulate", "--field", path("nope.f32m"), "-o", path("x.spk")}).code, 2);
  EXPECT_EQ(run({"simulate", "--rho-in", "1.5", "-o", path("x.spk")}).code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "x.spk"));
  EXPECT_FALSE(has_partial_files(dir_.path()));
}

TEST_F(CliTest, ServeAnswersAndStops) {
  CliRun result{};
  std::thread server([&] {
    result = run({"serve", "--port", "0", "--port-file", path("port"), "-i", path("s.spk"), "--threads", "1"});
  });
  for (int i = 0; i < 200 && !fs::exists(dir_ / "port"); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  ASSERT_TRUE(fs::exists(dir_ / "port"));
  int port = 0;
  std::ifstream(dir_ / "port") >> port;
  httplib::Client client("127.0.0.1", port);
  const auto res = client.Get("/api/stacks");
  cli::stop_serving();
  server.join();
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json list = json::parse(res->body);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["id"], "s1");
  EXPECT_EQ(list[0]["frames"], 8);
  EXPECT_EQ(result.code, 0) << result.err;

  EXPECT_EQ(run({"serve", "--host", "0.0.0.0"}).code, 2);
}

}  // namespace
}  // namespace dynspeckle
