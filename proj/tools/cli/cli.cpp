#include "cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "commands.hpp"
#include "dynspeckle/version.hpp"

namespace dynspeckle::cli {
namespace {

constexpr int kFailure = 2;

void add_common(CLI::App* cmd, unsigned& threads) {
  cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic speckle activity maps, composites and tuning service", "dynspeckle"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ProcessOptions process;
  auto* p = app.add_subcommand("process", "Compute one activity map and render it");
  p->add_option("-i,--input", process.input, "SPK stack or frame directory")->required();
  p->add_option("-o,--output", process.output, "Output .pgm, .png or .f32m")->required();
  p->add_option("--algo", process.algo, "avd | fujii | tau | gd")->capture_default_str();
  p->add_option("--phi", process.phi, "Tuning angle in degrees")->capture_default_str();
  p->add_option("--alpha", process.alpha, "Display exponent")->capture_default_str();
  p->add_option("--norm", process.norm, "minmax | fixed:lo:hi")->capture_default_str();
  p->add_option("--lut", process.lut, "Pseudocolor LUT CSV (PNG output)");
  p->add_option("--max-lag", process.max_lag, "GD frame distance limit");
  add_common(p, process.threads);

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "Render a grid of descriptor settings with contact sheets");
  s->add_option("-i,--input", sweep.input, "SPK stack or frame directory")->required();
  s->add_option("-o,--output", sweep.output_dir, "Output directory")->required();
  s->add_option("--algo", sweep.algos, "Algorithms, comma separated")->delimiter(',');
  s->add_option("--phi", sweep.phis, "Tuning angles, comma separated")->delimiter(',');
  s->add_option("--alpha", sweep.alphas, "Exponents, comma separated")->delimiter(',');
  s->add_option("--norm", sweep.norm, "minmax | fixed:lo:hi")->capture_default_str();
  s->add_option("--max-lag", sweep.max_lag, "GD frame distance limit");
  s->add_option("--columns", sweep.columns, "Contact sheet columns (0 = square)");
  add_common(s, sweep.threads);

  ComposeOptions compose;
  auto* c = app.add_subcommand("compose", "Fuse three maps into an RGB image");
  c->add_option("-i,--input,--spec", compose.spec, "Compose spec JSON")->required();
  c->add_option("-o,--output", compose.output, "Output .png")->required();
  add_common(c, compose.threads);

  EdgesOptions edges;
  auto* e = app.add_subcommand("edges", "Canny edge detection");
  e->add_option("-i,--input", edges.input, "PGM or PNG image")->required();
  e->add_option("-o,--output", edges.output, "Output .pgm")->required();
  e->add_option("-t,--threshold", edges.threshold, "High threshold, fraction of max gradient")
      ->capture_default_str();
  e->add_option("--sigma", edges.sigma, "Gaussian sigma in pixels")->capture_default_str();
  e->add_option("--low-ratio", edges.low_ratio, "Low threshold as fraction of high")->capture_default_str();

  SimulateOptions sim;
  auto* m = app.add_subcommand("simulate", "Generate a synthetic speckle stack with ground truth");
  m->add_option("-o,--output", sim.output, "Output .spk")->required();
  m->add_option("--truth", sim.truth, "Ground-truth .f32m (default <stem>.truth.f32m)");
  m->add_option("--glyph", sim.glyph, "disk | rect | strokes");
  m->add_option("--field", sim.field, "Activity field as .f32m");
  m->add_option("--frames", sim.frames)->capture_default_str();
  m->add_option("--size", sim.size, "Square size when width/height are not given")->capture_default_str();
  m->add_option("--width", sim.width);
  m->add_option("--height", sim.height);
  m->add_option("--seed", sim.seed)->capture_default_str();
  m->add_option("--grain", sim.grain, "Speckle grain size in pixels")->capture_default_str();
  m->add_option("--mean", sim.mean, "Mean gray level")->capture_default_str();
  m->add_option("--rho-in", sim.rho_in, "Correlation inside the glyph")->capture_default_str();
  m->add_option("--rho-out", sim.rho_out, "Correlation outside the glyph")->capture_default_str();
  add_common(m, sim.threads);

  ServeOptions serve;
  auto* v = app.add_subcommand("serve", "Run the local tuning service");
  v->add_option("-i,--input", serve.inputs, "Stacks to preload");
  v->add_option("--host", serve.host)->capture_default_str();
  v->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
  v->add_option("--port-file", serve.port_file, "Write the bound port here once listening");
  v->add_option("--preview-factor", serve.preview_factor)->capture_default_str();
  add_common(v, serve.threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kFailure;
  }

  try {
    if (*p) run_process(process, out);
    else if (*s) run_sweep(sweep, out);
    else if (*c) run_compose(compose, out);
    else if (*e) run_edges(edges, out);
    else if (*m) run_simulate(sim, out);
    else if (*v) run_serve(serve, out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kFailure;
  }
  return 0;
}

}  // namespace dynspeckle::cli
