#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "somqe/errors.hpp"
#include "somqe/synth.hpp"

namespace somqe::cli {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
double median_ms(int reps, Fn&& fn) {
  std::vector<double> samples;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    fn();
    samples.push_back(ms_since(start));
  }
  return median(std::move(samples));
}

std::vector<ImageGrid> synthetic_corpus(std::size_t count, std::size_t width, std::size_t height) {
  SynthSpec spec = SynthSpec::defaults(SynthMode::Grayscale);
  spec.width = width;
  spec.height = height;
  spec.fractions.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    spec.fractions[k] = 0.4 * static_cast<double>(k) / static_cast<double>(count);
  return generate_series(spec);
}

}  // namespace

void run_bench(const BenchOptions& options, std::ostream& out) {
  const PipelineOptions& pipeline = options.pipeline;
  std::vector<ImageGrid> corpus = options.input
                                      ? load_series(*options.input, pipeline.qe.threads)
                                      : synthetic_corpus(options.images, options.size, options.size);
  if (corpus.size() < 2) throw ConfigError("need at least 2 images");
  const std::size_t ref = select_reference(corpus, pipeline.reference);
  corpus = preprocess(corpus, ref, pipeline);
  const ImageGrid& reference = corpus[ref];
  const kernels::Kind kernel = pipeline.qe.kernel.value_or(kernels::preferred());

  std::optional<SomLattice> lattice;
  const double train_ms = median_ms(options.repetitions, [&] { lattice = train_on(reference, pipeline); });

  auto score_all = [&](const QeOptions& qe) {
    return median_ms(options.repetitions, [&] { score_series(*lattice, corpus, reference.id(), qe); });
  };
  const double score_ms = score_all(pipeline.qe);

  nlohmann::json per_kernel = nlohmann::json::object();
  for (const auto kind : {kernels::Kind::Scalar, kernels::Kind::Avx2}) {
    if (!kernels::supported(kind)) continue;
    QeOptions qe = pipeline.qe;
    qe.kernel = kind;
    per_kernel[std::string(kernels::name(kind))] = score_all(qe);
  }

  const std::size_t e2e_count = std::min<std::size_t>(17, corpus.size());
  const std::vector<ImageGrid> series(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(e2e_count));
  PipelineOptions e2e_options = pipeline;
  e2e_options.reference = "first";
  const double e2e_ms = median_ms(options.repetitions, [&] { classify_series(series, e2e_options); });

  // Per-image score cost at the reference size and at twice the pixel count.
  const auto single = synthetic_corpus(1, reference.width(), reference.height());
  const auto doubled = synthetic_corpus(1, reference.width(), 2 * reference.height());
  const SomLattice gray_lattice = train_on(single[0], pipeline);
  const int scaling_reps = std::max(options.repetitions, 7);
  const double single_ms = median_ms(scaling_reps, [&] { quantization_error(gray_lattice, single[0], pipeline.qe); });
  const double doubled_ms = median_ms(scaling_reps, [&] { quantization_error(gray_lattice, doubled[0], pipeline.qe); });

  const bool train_ok = train_ms <= kTrainBudgetMs;
  const bool score_ok = score_ms <= kScore20BudgetMs;
  const bool e2e_ok = e2e_ms <= kEndToEnd17BudgetMs;
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

  out << fmt::format("corpus: {} images {}x{}x{}, kernel {}, threads {}, median of {}\n",
                     corpus.size(), reference.width(), reference.height(), reference.channels(),
                     kernels::name(kernel), pipeline.qe.threads, options.repetitions);
  out << fmt::format("{:<34} {:>12} {:>12}  {}\n", "measure", "ms", "budget ms", "verdict");
  out << fmt::format("{:<34} {:>12.2f} {:>12.0f}  {}\n", "train one image", train_ms, kTrainBudgetMs, verdict(train_ok));
  out << fmt::format("{:<34} {:>12.2f} {:>12.0f}  {}\n", fmt::format("score {} images", corpus.size()),
                     score_ms, kScore20BudgetMs, verdict(score_ok));
  out << fmt::format("{:<34} {:>12.2f} {:>12.0f}  {}\n", fmt::format("train+classify {} images", e2e_count),
                     e2e_ms, kEndToEnd17BudgetMs, verdict(e2e_ok));
  out << fmt::format("{:<34} {:>12.3f}\n", "score per image", score_ms / static_cast<double>(corpus.size()));
  for (const auto& [name, ms] : per_kernel.items())
    out << fmt::format("{:<34} {:>12.2f}\n", fmt::format("score all ({})", name), ms.get<double>());
  out << fmt::format("{:<34} {:>12.3f}\n", "score 2x pixels / 1x pixels", doubled_ms / single_ms);

  nlohmann::json doc = {
      {"schema_version", 1},
      {"images", corpus.size()},
      {"width", reference.width()},
      {"height", reference.height()},
      {"channels", reference.channels()},
      {"kernel", kernels::name(kernel)},
      {"threads", pipeline.qe.threads},
      {"repetitions", options.repetitions},
      {"lattice", lattice_summary(*lattice, pipeline.train)},
      {"train_ms", train_ms},
      {"score_total_ms", score_ms},
      {"score_per_image_ms", score_ms / static_cast<double>(corpus.size())},
      {"score_total_ms_by_kernel", per_kernel},
      {"end_to_end_images", e2e_count},
      {"end_to_end_ms", e2e_ms},
      {"scaling", {{"single_ms", single_ms}, {"doubled_ms", doubled_ms}, {"ratio", doubled_ms / single_ms}}},
      {"budgets",
       {{"train_ms", {{"budget", kTrainBudgetMs}, {"pass", train_ok}}},
        {"score_total_ms", {{"budget", kScore20BudgetMs}, {"pass", score_ok}}},
        {"end_to_end_ms", {{"budget", kEndToEnd17BudgetMs}, {"pass", e2e_ok}}}}}};

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}", options.out_dir.string()));
  std::ofstream file(options.out_dir / "bench.json");
  file << doc.dump(2) << '\n';
  if (!file) throw IoError(fmt::format("cannot write {}", (options.out_dir / "bench.json").string()));
}

}  // namespace somqe::cli
