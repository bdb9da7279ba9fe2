#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/postprocess.hpp"
#include "dynspeckle/stack_io.hpp"
#include "provenance.hpp"

namespace dynspeckle::cli {

void run_process(const ProcessOptions& o, std::ostream& out) {
  const DescriptorParams params{parse_algorithm(o.algo), o.phi, o.max_lag};
  params.validate();
  const DisplayParams display{o.alpha, Normalization::parse(o.norm)};
  display.validate();

  const std::string ext = extension_of(o.output);
  if (ext != ".pgm" && ext != ".png" && ext != ".f32m") {
    throw InvalidArgumentError("output must end in .pgm, .png or .f32m", "output");
  }
  std::optional<PseudocolorLut> lut;
  if (o.lut) {
    if (ext != ".png") throw InvalidArgumentError("a pseudocolor LUT needs a .png output", "lut");
    lut = load_lut_csv(*o.lut);
  }
  require_exists(o.input);

  EngineOptions engine;
  engine.threads = o.threads;
  ActivityMap map;
  std::uint32_t frames = 0;
  if (fs::is_directory(o.input)) {
    const FrameStack stack = import_frame_dir(o.input);
    frames = stack.frame_count();
    map = compute_descriptor(stack, params, engine);
  } else {
    SpkFileSource source(o.input);
    frames = source.frame_count();
    map = compute_descriptor(source, params, engine);
  }

  if (ext == ".f32m") {
    write_f32m(map.image, o.output);
  } else if (lut) {
    const RealImage unit = apply_exponent(normalize_map(map.image, display.normalization), display.alpha);
    write_png(apply_pseudocolor(unit, *lut), o.output);
  } else {
    write_gray_image(render_gray(map.image, display), o.output);
  }

  auto record = provenance_record("process");
  record["input"] = {{"path", o.input.generic_string()}, {"sha256", stack_digest(o.input)}};
  record["algorithm"] = std::string(to_string(params.algorithm));
  record["phi_degrees"] = params.phi_degrees;
  if (params.max_lag) record["max_lag"] = *params.max_lag;
  record["alpha"] = display.alpha;
  record["normalization"] = display.normalization.to_string();
  if (o.lut) record["lut"] = {{"path", o.lut->generic_string()}, {"sha256", sha256_file(*o.lut)}};
  record["width"] = map.width();
  record["height"] = map.height();
  record["frames"] = frames;
  record["degenerate_terms"] = map.degenerate_terms;
  record["output"] = o.output.filename().generic_string();
  write_sidecar(o.output, record);

  out << "wrote " << o.output.generic_string() << " (" << map.width() << "x" << map.height()
      << ", " << to_string(params.algorithm) << ")\n";
}

}  // namespace dynspeckle::cli
