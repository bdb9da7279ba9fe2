#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/simulator.hpp"
#include "provenance.hpp"

namespace dynspeckle::cli {

void run_simulate(const SimulateOptions& o, std::ostream& out) {
  SimulationParams params;
  params.frames = o.frames;
  params.grain_size = o.grain;
  params.seed = o.seed;
  params.mean_intensity = o.mean;
  params.validate();
  if (extension_of(o.output) != ".spk") throw InvalidArgumentError("output must be a .spk file", "output");
  if (o.glyph && o.field) throw InvalidArgumentError("give either --glyph or --field", "field");

  ActivityField field;
  if (o.field) {
    require_exists(*o.field);
    field = ActivityField::from_image(read_f32m(*o.field));
  } else {
    const std::uint32_t w = o.width.value_or(o.size);
    const std::uint32_t h = o.height.value_or(o.size);
    if (w == 0 || h == 0) throw InvalidArgumentError("dimensions must be positive", "size");
    field = make_glyph_field(parse_glyph(o.glyph.value_or("disk")), w, h, o.rho_in, o.rho_out);
  }
  field.validate();

  fs::path truth = o.truth.value_or(fs::path(o.output).replace_extension(".truth.f32m"));
  generate_stack_to_file(field, params, o.output, o.threads);
  write_f32m(field.to_image(), truth);

  auto record = provenance_record("simulate");
  if (o.field) {
    record["field"] = {{"path", o.field->generic_string()}, {"sha256", sha256_file(*o.field)}};
  } else {
    record["glyph"] = o.glyph.value_or("disk");
    record["rho_inside"] = o.rho_in;
    record["rho_outside"] = o.rho_out;
  }
  record["width"] = field.width;
  record["height"] = field.height;
  record["frames"] = params.frames;
  record["grain_size"] = params.grain_size;
  record["seed"] = params.seed;
  record["mean_intensity"] = params.mean_intensity;
  record["output"] = o.output.filename().generic_string();
  record["truth"] = truth.filename().generic_string();
  write_sidecar(o.output, record);
  out << "wrote " << o.output.generic_string() << " and " << truth.generic_string() << "\n";
}

}  // namespace dynspeckle::cli
