#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "dynspeckle/edges.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "provenance.hpp"

namespace dynspeckle::cli {

void run_edges(const EdgesOptions& o, std::ostream& out) {
  const EdgeParams params{o.sigma, o.threshold, o.low_ratio};
  params.validate();
  if (extension_of(o.output) != ".pgm") throw InvalidArgumentError("output must be a .pgm file", "output");
  require_exists(o.input);

  const DecodedImage img = read_image(o.input);
  RealImage gray(img.width, img.height);
  if (img.channels == 1) {
    for (std::size_t i = 0; i < gray.size(); ++i) gray.values[i] = img.pixels[i];
  } else {
    RgbImage rgb(img.width, img.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) rgb.pixels[3 * i + c] = img.pixels[img.channels * i + c];
    }
    gray = to_luminance(rgb);
  }
  const GrayImage edges = canny_edges(gray, params);
  write_pgm(edge_map_to_display(edges), o.output);

  const auto count = std::count(edges.pixels.begin(), edges.pixels.end(), 1);
  auto record = provenance_record("edges");
  record["input"] = {{"path", o.input.generic_string()}, {"sha256", sha256_file(o.input)}};
  record["sigma"] = params.sigma;
  record["threshold"] = params.high_threshold;
  record["low_ratio"] = params.low_ratio;
  record["width"] = edges.width;
  record["height"] = edges.height;
  record["edge_pixels"] = count;
  record["output"] = o.output.filename().generic_string();
  write_sidecar(o.output, record);
  out << "wrote " << o.output.generic_string() << " (" << count << " edge pixels)\n";
}

}  // namespace dynspeckle::cli
