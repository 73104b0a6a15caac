// Acceptance suite: one PASS/FAIL line per criterion. Timing budgets are
// reported but never fail the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "somqe/classify.hpp"
#include "somqe/cli.hpp"
#include "somqe/parallel.hpp"
#include "somqe/pipeline.hpp"
#include "somqe/synth.hpp"
#include "support/oracles.hpp"
#include "support/test_images.hpp"

using namespace somqe;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kSide = 512;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

struct OrderingResult {
  double tau;
  std::size_t inversions;
  bool ranked_in_fraction_order;
  double seconds;
};

// Generate the series, train on its f=0 image and classify; compare the
// resulting order against the planted fractions.
OrderingResult ordering(SynthMode mode, std::uint64_t seed) {
  const auto start = Clock::now();
  SynthSpec spec = SynthSpec::defaults(mode);
  spec.width = spec.height = kSide;
  spec.seed = seed;
  const auto series = generate_series(spec);

  PipelineOptions options;
  options.train.seed = seed;
  options.reference = synth_id(0.0);
  options.qe.threads = hardware_threads();
  const auto report = classify_series(series, options);
  const double secs = seconds_since(start);

  std::map<std::string, double> fraction_of;
  for (double f : spec.fractions) fraction_of[synth_id(f)] = f;
  std::vector<double> fractions, qes;
  for (const auto& s : report.scores) {
    fractions.push_back(fraction_of.at(s.image_id));
    qes.push_back(s.qe);
  }
  const bool in_order = std::is_sorted(fractions.begin(), fractions.end()) &&
                        std::adjacent_find(qes.begin(), qes.end(), std::greater_equal<>()) == qes.end();
  return {kendall_tau(fractions, qes), inversions(fractions, qes), in_order, secs};
}

Outcome perfect_ordering(SynthMode mode) {
  const auto r = ordering(mode, 1);
  const bool pass = r.tau == 1.0 && r.inversions == 0 && r.ranked_in_fraction_order && r.seconds < 10.0;
  return {pass, fmt::format("tau={:.6f} inversions={} runtime={:.2f}s (limit 10s)", r.tau, r.inversions,
                            r.seconds)};
}

Outcome seed_robustness() {
  std::string detail;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = ordering(SynthMode::Grayscale, seed);
    const bool ok = r.tau == 1.0 && r.inversions == 0 && r.ranked_in_fraction_order && r.seconds < 10.0;
    pass = pass && ok;
    detail += fmt::format("{}{}:{}", seed == 1 ? "seeds " : " ", seed, ok ? "ok" : "FAIL");
  }
  return {pass, detail};
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<std::size_t> side(1, 64), lattice_side(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t qe_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 ? 3 : 1;
    const auto img = testing_support::random_image(gen, side(gen), side(gen), dim);
    const std::size_t rows = lattice_side(gen), cols = lattice_side(gen);
    std::vector<double> w(rows * cols * dim);
    for (auto& v : w) v = u(gen);
    const SomLattice lattice(rows, cols, dim, 1, w);
    const double expected = oracle::naive_qe({img.data().begin(), img.data().end()}, w, dim);
    for (const auto kind : {kernels::Kind::Scalar, kernels::Kind::Avx2}) {
      if (!kernels::supported(kind)) continue;
      const double actual = quantization_error(lattice, img, {1, kind});
      const double rel = std::abs(actual - expected) / expected;
      worst = std::max(worst, rel);
      if (!(rel <= 1e-12)) ++qe_failures;
    }
  }
  std::size_t bmu_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = trial % 2 ? 3 : 1;
    const std::size_t rows = lattice_side(gen), cols = lattice_side(gen);
    std::vector<double> w(rows * cols * dim);
    for (auto& v : w) v = u(gen);
    const SomLattice lattice(rows, cols, dim, 1, w);
    double x[3] = {u(gen), u(gen), u(gen)};
    if (bmu(lattice, std::span<const double>(x, dim)) != oracle::argmin(w, dim, x)) ++bmu_failures;
  }
  return {qe_failures == 0 && bmu_failures == 0,
          fmt::format("qe: 100 pairs, worst rel err {:.3g} (limit 1e-12), {} failures; bmu: 1000 inputs, {} mismatches",
                      worst, qe_failures, bmu_failures)};
}

Outcome trivial_zero() {
  bool pass = true;
  std::string detail;
  const std::vector<std::vector<double>> values{{0.3}, {0.1, 0.6, 0.9}};
  for (const auto& v : values) {
    const auto img = ImageGrid::filled(64, 64, v);
    std::vector<double> w;
    for (int k = 0; k < 16; ++k) {
      for (double c : v) w.push_back(k == 9 ? c : std::fmod(c + 0.05 * (k + 1), 1.0));
    }
    const SomLattice lattice(4, 4, static_cast<int>(v.size()), 1, w);
    for (const auto kind : {kernels::Kind::Scalar, kernels::Kind::Avx2}) {
      if (!kernels::supported(kind)) continue;
      const double qe = quantization_error(lattice, img, {1, kind});
      pass = pass && qe == 0.0;
      detail += fmt::format("dim{}/{}: qe={} ", v.size(), kernels::name(kind), qe);
    }
  }
  return {pass, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  testing_support::TempDir dir("acceptance_det");
  std::ostringstream sink;
  const std::string corpus = (dir / "corpus").string();
  if (cli::run({"synth", "--out", corpus}, sink, sink) != 0) return {false, "synth failed"};

  auto classify = [&](const std::string& out, unsigned threads) {
    return cli::run({"classify", "--input", corpus, "--out", (dir / out).string(), "--seed", "42",
                     "--threads", std::to_string(threads)},
                    sink, sink);
  };
  if (classify("run1", 1) != 0 || classify("run2", 1) != 0) return {false, "classify failed"};
  const std::string first = slurp(dir / "run1" / "report.csv");
  const bool identical = !first.empty() && first == slurp(dir / "run2" / "report.csv");

  // Core count on this machine may be 1; exercise several workers anyway.
  const unsigned max_threads = std::max(hardware_threads(), 8u);
  bool threads_stable = true;
  for (unsigned t = 2; t <= max_threads; ++t) {
    const std::string name = fmt::format("threads{}", t);
    if (classify(name, t) != 0 || slurp(dir / name / "report.csv") != first) threads_stable = false;
  }
  return {identical && threads_stable,
          fmt::format("repeat run byte-identical: {}; qe unchanged for threads 1..{}: {}", identical,
                      max_threads, threads_stable)};
}

Outcome convergence() {
  SynthSpec spec = SynthSpec::defaults(SynthMode::Grayscale);
  spec.width = spec.height = kSide;
  const auto base = generate_image(spec, 0);
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    const auto initial = init_lattice(4, 4, base, cfg);
    const auto trained = train(initial, base, cfg);
    const double before = quantization_error(initial, base);
    const double after = quantization_error(trained, base);
    pass = pass && after <= before;
    if (seed <= 3) detail += fmt::format("seed {}: {:.5f}->{:.5f}; ", seed, before, after);
  }
  return {pass, detail + "seeds 1..10 checked"};
}

// Reported only.
std::string timing_budgets() {
  SynthSpec spec = SynthSpec::defaults(SynthMode::Grayscale);
  spec.width = spec.height = kSide;
  spec.fractions.resize(20);
  for (std::size_t k = 0; k < 20; ++k) spec.fractions[k] = 0.02 * static_cast<double>(k);
  const auto series = generate_series(spec);
  PipelineOptions options;
  options.qe.threads = hardware_threads();

  auto t = Clock::now();
  const auto lattice = train_on(series[0], options);
  const double train_s = seconds_since(t);

  t = Clock::now();
  score_series(lattice, series, series[0].id(), options.qe);
  const double score_s = seconds_since(t);

  const std::vector<ImageGrid> seventeen(series.begin(), series.begin() + 17);
  t = Clock::now();
  classify_series(seventeen, options);
  const double e2e_s = seconds_since(t);

  auto verdict = [](double v, double limit) { return v <= limit ? "within" : "OVER"; };
  return fmt::format("train 512x512 {:.3f}s ({} 2s); score 20 images {:.3f}s ({} 3s); "
                     "train+classify 17 {:.3f}s ({} 5s)",
                     train_s, verdict(train_s, 2.0), score_s, verdict(score_s, 3.0), e2e_s,
                     verdict(e2e_s, 5.0));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"C1 perfect ordering, grayscale", [] { return perfect_ordering(SynthMode::Grayscale); }},
      {"C2 perfect ordering, blue/yellow", [] { return perfect_ordering(SynthMode::BlueYellow); }},
      {"C3 seed robustness", seed_robustness},
      {"C4 oracle equivalence", oracle_equivalence},
      {"C5 trivial zero", trivial_zero},
      {"C6 determinism", determinism},
      {"C7 convergence", convergence},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", c.name, o.detail);
  }
  try {
    std::cout << fmt::format("[INFO] C8 timing budgets (reported, not enforced): {}\n", timing_budgets());
  } catch (const std::exception& e) {
    std::cout << fmt::format("[INFO] C8 timing budgets: could not measure: {}\n", e.what());
  }
  std::cout << fmt::format("{} of {} enforced criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
