#include "somqe/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bench.hpp"
#include "somqe/errors.hpp"
#include "somqe/imaging.hpp"
#include "somqe/parallel.hpp"
#include "somqe/pipeline.hpp"
#include "somqe/synth.hpp"

namespace somqe::cli {
namespace {

namespace fs = std::filesystem;

struct TrainFlags {
  std::size_t rows = 4;
  std::size_t cols = 4;
  int radius = 1;
  std::uint64_t iterations = 10'000;
  double alpha_start = 0.5;
  double alpha_end = 0.01;
  std::uint64_t seed = 42;
  InitMode init_mode = InitMode::UniformRandom;
  std::optional<std::size_t> target_width;
  std::optional<std::size_t> target_height;
  ColorMode color = ColorMode::AsIs;
  bool match_contrast = false;
  std::string threads;
  std::string kernel = "auto";
};

void add_train_flags(CLI::App& cmd, TrainFlags& f) {
  cmd.add_option("--rows", f.rows, "Lattice rows")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--cols", f.cols, "Lattice columns")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--radius", f.radius, "Constant neighborhood radius (Chebyshev)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd.add_option("--iterations", f.iterations, "Training steps")->capture_default_str();
  cmd.add_option("--alpha-start", f.alpha_start, "Initial learning rate")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_option("--alpha-end", f.alpha_end, "Final learning rate")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_option("--seed", f.seed, "RNG seed")->capture_default_str();
  cmd.add_option("--init-mode", f.init_mode, "Weight initialization")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InitMode>{{"sample-pixels", InitMode::SamplePixels},
                                          {"uniform-random", InitMode::UniformRandom}}));
  cmd.add_option("--target-width", f.target_width, "Resize width (default: reference width)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--target-height", f.target_height, "Resize height (default: reference height)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--color-mode", f.color, "as-is or gray")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ColorMode>{{"as-is", ColorMode::AsIs}, {"gray", ColorMode::ForceGray}}));
  cmd.add_flag("--match-contrast", f.match_contrast,
               "Match each image's per-channel mean/std to the reference");
  cmd.add_option("--threads", f.threads, "Worker count or 'auto' (env: SOMQE_THREADS)");
  cmd.add_option("--kernel", f.kernel, "Nearest-neuron kernel: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))->capture_default_str();
}

PipelineOptions to_pipeline(const TrainFlags& f) {
  PipelineOptions p;
  p.rows = f.rows;
  p.cols = f.cols;
  p.train.iterations = f.iterations;
  p.train.alpha_start = f.alpha_start;
  p.train.alpha_end = f.alpha_end;
  p.train.radius = f.radius;
  p.train.seed = f.seed;
  p.train.init_mode = f.init_mode;
  p.target_width = f.target_width;
  p.target_height = f.target_height;
  p.color = f.color;
  p.match_contrast = f.match_contrast;
  p.qe.threads = resolve_threads(f.threads);
  if (f.kernel != "auto") {
    const auto kind = kernels::parse(f.kernel);
    if (!kind || !kernels::supported(*kind))
      throw ConfigError(fmt::format("kernel '{}' is not available on this CPU", f.kernel));
    p.qe.kernel = kind;
  }
  p.train.validate();
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
}

void dump_preprocessed(const std::vector<ImageGrid>& images, const fs::path& dir) {
  ensure_dir(dir);
  for (const auto& img : images)
    save_pnm(img, dir / (img.id() + (img.channels() == 1 ? ".pgm" : ".ppm")));
}

void print_table(const ClassificationReport& report, bool descending, std::ostream& out) {
  out << fmt::format("reference: {}\nlattice:   {}\n", report.reference_id, report.lattice_summary);
  out << fmt::format("{:>5}  {:<32}  {:>20}  {:>3}\n", "rank", "image_id", "qe", "dir");
  auto row = [&](const QeScore& s) {
    out << fmt::format("{:>5}  {:<32}  {:>20.12f}  {:>+3}\n", s.rank, s.image_id, s.qe, s.direction);
  };
  if (descending)
    std::for_each(report.scores.rbegin(), report.scores.rend(), row);
  else
    std::for_each(report.scores.begin(), report.scores.end(), row);
  out << fmt::format("train {:.1f} ms, score {:.1f} ms\n", report.timings.train_ms,
                     report.timings.score_ms);
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw ConfigError(fmt::format("bad fraction '{}'", item));
    values.push_back(v);
    pos = comma + 1;
  }
  return values;
}

}  // namespace

unsigned resolve_threads(const std::string& value) {
  std::string text = value;
  if (text.empty()) {
    const char* env = std::getenv("SOMQE_THREADS");
    text = env ? env : "auto";
  }
  if (text == "auto") return hardware_threads();
  unsigned n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || ptr != text.data() + text.size() || n == 0)
    throw ConfigError(fmt::format("threads must be a positive integer or 'auto', got '{}'", text));
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank image series by self-organizing map quantization error", "somqe"};
  app.require_subcommand(1);

  // synth
  SynthSpec synth_spec = SynthSpec::defaults(SynthMode::Grayscale);
  std::string synth_mode = "gray", synth_placement = "scattered", synth_fractions;
  fs::path synth_out = "out";
  auto* synth_cmd = app.add_subcommand("synth", "Write a ground-truth synthetic series");
  synth_cmd->add_option("--mode", synth_mode, "gray or blue-yellow")
      ->check(CLI::IsMember({"gray", "blue-yellow"}))->capture_default_str();
  synth_cmd->add_option("--width", synth_spec.width)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--height", synth_spec.height)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--fractions", synth_fractions,
                        "Comma-separated altered fractions (default 0,0.025,...,0.4)");
  synth_cmd->add_option("--noise", synth_spec.texture_noise, "Uniform jitter amplitude")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--placement", synth_placement, "scattered or blobs")
      ->check(CLI::IsMember({"scattered", "blobs"}))->capture_default_str();
  synth_cmd->add_option("--seed", synth_spec.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output directory")->capture_default_str();

  // train
  TrainFlags train_flags;
  fs::path train_image, train_out = "out";
  auto* train_cmd = app.add_subcommand("train", "Train a lattice on one image and write lattice.json");
  train_cmd->add_option("--image", train_image, "Training image")->required();
  train_cmd->add_option("--out", train_out, "Output directory")->capture_default_str();
  add_train_flags(*train_cmd, train_flags);

  // classify
  TrainFlags classify_flags;
  fs::path classify_input, classify_out = "out";
  std::optional<fs::path> classify_lattice;
  std::string reference = "first";
  bool descending = false, dump = false;
  auto* classify_cmd = app.add_subcommand("classify", "Train on a reference and rank a series by QE");
  classify_cmd->add_option("--input", classify_input, "Directory of PNG/PGM/PPM images")->required();
  classify_cmd->add_option("--out", classify_out, "Output directory")->capture_default_str();
  classify_cmd->add_option("--reference", reference, "Reference image id or 'first'")->capture_default_str();
  classify_cmd->add_option("--lattice", classify_lattice, "Use a trained lattice.json instead of training");
  classify_cmd->add_flag("--descending", descending, "Print the table in descending QE order");
  classify_cmd->add_flag("--dump-preprocessed", dump, "Write preprocessed images as PGM/PPM");
  add_train_flags(*classify_cmd, classify_flags);

  // bench
  TrainFlags bench_flags;
  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time training and scoring against the budgets");
  bench_cmd->add_option("--input", bench.input, "Directory of images (default: synthetic corpus)");
  bench_cmd->add_option("--out", bench.out_dir, "Output directory")->capture_default_str();
  bench_cmd->add_option("--images", bench.images, "Synthetic corpus size")
      ->check(CLI::Range(2, 10000))->capture_default_str();
  bench_cmd->add_option("--size", bench.size, "Synthetic image side length")
      ->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--reps", bench.repetitions, "Repetitions (median reported)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  add_train_flags(*bench_cmd, bench_flags);

  std::vector<const char*> argv{"somqe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (synth_cmd->parsed()) {
      synth_spec.mode = synth_mode == "gray" ? SynthMode::Grayscale : SynthMode::BlueYellow;
      if (synth_spec.mode == SynthMode::BlueYellow) {
        const auto d = SynthSpec::defaults(SynthMode::BlueYellow);
        synth_spec.base_value = d.base_value;
        synth_spec.altered_value = d.altered_value;
      }
      synth_spec.placement = synth_placement == "blobs" ? Placement::Blobs : Placement::Scattered;
      if (!synth_fractions.empty()) synth_spec.fractions = parse_fractions(synth_fractions);
      try {
        synth_spec.validate();
      } catch (const ContractError& e) {
        throw ConfigError(e.what());
      }
      ensure_dir(synth_out);
      const auto manifest = synth_manifest(synth_spec);
      for (std::size_t k = 0; k < synth_spec.fractions.size(); ++k) {
        const ImageGrid img = generate_image(synth_spec, k);
        save_pnm(img, synth_out / manifest["images"][k]["file"].get<std::string>());
      }
      write_text(synth_out / "manifest.json", manifest.dump(2) + "\n");
      out << fmt::format("wrote {} images to {}\n", synth_spec.fractions.size(), synth_out.string());
    } else if (train_cmd->parsed()) {
      const PipelineOptions options = to_pipeline(train_flags);
      ImageGrid img = load_image(train_image);
      const std::vector<ImageGrid> one{std::move(img)};
      const auto prepared = preprocess(one, 0, options);
      const SomLattice lattice = train_on(prepared[0], options);
      ensure_dir(train_out);
      save_lattice(lattice, train_out / "lattice.json");
      out << fmt::format("trained {} on {}, wrote {}\n", lattice_summary(lattice, options.train),
                         prepared[0].id(), (train_out / "lattice.json").string());
    } else if (classify_cmd->parsed()) {
      PipelineOptions options = to_pipeline(classify_flags);
      options.reference = reference;
      std::optional<SomLattice> lattice;
      if (classify_lattice) lattice = load_lattice(*classify_lattice);
      const auto images = load_series(classify_input, options.qe.threads);
      std::vector<ImageGrid> prepared;
      const auto report = classify_series(images, options, lattice ? &*lattice : nullptr,
                                          dump ? &prepared : nullptr);
      ensure_dir(classify_out);
      write_text(classify_out / "report.csv", emit_report(report, ReportFormat::Csv));
      write_text(classify_out / "report.json", emit_report(report, ReportFormat::Json));
      if (dump) dump_preprocessed(prepared, classify_out / "preprocessed");
      print_table(report, descending, out);
    } else if (bench_cmd->parsed()) {
      bench.pipeline = to_pipeline(bench_flags);
      run_bench(bench, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "decode error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace somqe::cli
