#include <algorithm>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "contact_sheet.hpp"
#include "dynspeckle/descriptors.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/format.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/parallel.hpp"
#include "dynspeckle/postprocess.hpp"
#include "dynspeckle/stack_io.hpp"
#include "provenance.hpp"

namespace dynspeckle::cli {
namespace {

template <class T>
void require_unique(std::vector<T> values, const char* field) {
  if (values.empty()) throw InvalidArgumentError("sweep list is empty", field);
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw InvalidArgumentError("sweep list has duplicates", field);
  }
}

std::string sheet_name(std::size_t page) {
  return page == 1 ? "contact_sheet.png" : "contact_sheet_p" + std::to_string(page) + ".png";
}

}  // namespace

void run_sweep(const SweepOptions& o, std::ostream& out) {
  std::vector<Algorithm> algos;
  for (const auto& a : o.algos) algos.push_back(parse_algorithm(a));
  require_unique(algos, "algo");
  require_unique(o.phis, "phi");
  require_unique(o.alphas, "alpha");
  const Normalization norm = Normalization::parse(o.norm);

  struct Job {
    DescriptorParams params;
    ActivityMap map;
  };
  std::vector<Job> jobs;
  for (Algorithm a : algos) {
    for (double phi : o.phis) {
      DescriptorParams p{a, phi, a == Algorithm::kGd ? o.max_lag : std::nullopt};
      p.validate();
      jobs.push_back({p, {}});
    }
  }
  for (double alpha : o.alphas) DisplayParams{alpha, norm}.validate();

  const FrameStack stack = load_stack(o.input);
  for (const auto& j : jobs) {
    if (stack.frame_count() < min_frames(j.params.algorithm)) {
      throw InsufficientFramesError(min_frames(j.params.algorithm), stack.frame_count());
    }
  }
  const std::string digest = stack_digest(o.input);

  EngineOptions engine;
  engine.threads = 1;
  parallel_for(0, jobs.size(), resolve_thread_count(o.threads), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) jobs[i].map = compute_descriptor(stack, jobs[i].params, engine);
  });

  fs::create_directories(o.output_dir);
  std::vector<Tile> tiles;
  std::ostringstream index;
  index << "algorithm,phi,alpha,file,page,tile\n";
  std::size_t count = 0;
  for (const auto& job : jobs) {
    const std::string algo(to_string(job.params.algorithm));
    for (double alpha : o.alphas) {
      const std::string phi_text = format_number(job.params.phi_degrees);
      const std::string alpha_text = format_number(alpha);
      const std::string file = algo + "_phi" + phi_text + "_a" + alpha_text + ".pgm";
      const GrayImage img = render_gray(job.map.image, {alpha, norm});
      write_pgm(img, o.output_dir / file);

      auto record = provenance_record("sweep");
      record["input"] = {{"path", o.input.generic_string()}, {"sha256", digest}};
      record["algorithm"] = algo;
      record["phi_degrees"] = job.params.phi_degrees;
      if (job.params.max_lag) record["max_lag"] = *job.params.max_lag;
      record["alpha"] = alpha;
      record["normalization"] = norm.to_string();
      record["width"] = img.width;
      record["height"] = img.height;
      record["frames"] = stack.frame_count();
      record["degenerate_terms"] = job.map.degenerate_terms;
      record["output"] = file;
      write_sidecar(o.output_dir / file, record);

      const std::size_t page = count / kTilesPerPage + 1;
      const std::size_t tile = count % kTilesPerPage + 1;
      index << algo << ',' << phi_text << ',' << alpha_text << ',' << file << ',' << sheet_name(page)
            << ',' << tile << '\n';
      tiles.push_back({img, algo + " phi=" + phi_text + " a=" + alpha_text});
      ++count;
    }
  }

  std::size_t pages = 0;
  for (std::size_t start = 0; start < tiles.size(); start += kTilesPerPage) {
    const std::vector<Tile> page(tiles.begin() + start,
                                 tiles.begin() + std::min(tiles.size(), start + kTilesPerPage));
    write_png(render_contact_sheet(page, o.columns), o.output_dir / sheet_name(++pages));
  }
  const std::string csv = index.str();
  write_file_atomic(o.output_dir / "index.csv",
                    {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});

  out << "wrote " << count << " images, " << pages << " contact sheet page(s) to "
      << o.output_dir.generic_string() << "\n";
}

}  // namespace dynspeckle::cli
