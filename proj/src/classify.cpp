#include "somqe/classify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "somqe/errors.hpp"

namespace somqe {
namespace {

int change_direction(double qe, double qe_ref) {
  const double delta = qe - qe_ref;
  if (std::abs(delta) <= kDirectionTolerance) return 0;
  return delta > 0 ? 1 : -1;
}

}  // namespace

std::vector<QeScore> score_series(const SomLattice& lattice,
                                  std::span<const ImageGrid> images,
                                  std::string_view reference_id,
                                  const QeOptions& options,
                                  std::vector<double>* per_image_ms) {
  const auto ref = std::find_if(images.begin(), images.end(),
                                [&](const ImageGrid& img) { return img.id() == reference_id; });
  if (ref == images.end())
    throw ContractError(fmt::format("reference image '{}' is not in the series", reference_id));
  for (const auto& img : images) {
    if (img.channels() != lattice.dim())
      throw ContractError(fmt::format("image '{}' has {} channels, lattice expects {}",
                                      img.id(), img.channels(), lattice.dim()));
  }

  std::vector<QeScore> scores;
  scores.reserve(images.size());
  if (per_image_ms) per_image_ms->clear();
  for (const auto& img : images) {
    const auto start = std::chrono::steady_clock::now();
    scores.push_back({img.id(), quantization_error(lattice, img, options), 0, 0});
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;
    if (per_image_ms) per_image_ms->push_back(elapsed.count());
  }

  const double qe_ref = scores[static_cast<std::size_t>(ref - images.begin())].qe;
  for (auto& s : scores) s.direction = change_direction(s.qe, qe_ref);
  return scores;
}

ClassificationReport rank(std::vector<QeScore> scores) {
  if (scores.empty()) throw ContractError("cannot rank an empty series");
  for (const auto& s : scores) {
    if (!std::isfinite(s.qe)) throw ContractError(fmt::format("non-finite qe for '{}'", s.image_id));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const QeScore& a, const QeScore& b) {
    if (a.qe != b.qe) return a.qe < b.qe;
    return a.image_id < b.image_id;
  });
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;

  ClassificationReport report;
  report.scores = std::move(scores);
  return report;
}

std::string emit_report(const ClassificationReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::string out = "rank,image_id,qe,direction\n";
    for (const auto& s : report.scores)
      out += fmt::format("{},{},{:.17g},{}\n", s.rank, s.image_id, s.qe, s.direction);
    return out;
  }

  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"rank", s.rank},
                      {"image_id", s.image_id},
                      {"qe", s.qe},
                      {"direction", s.direction}});
  }
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["reference_id"] = report.reference_id;
  doc["lattice_summary"] = report.lattice_summary;
  doc["scores"] = std::move(scores);
  doc["timings"] = {{"train_ms", report.timings.train_ms},
                    {"score_ms", report.timings.score_ms},
                    {"per_image_ms", report.timings.per_image_ms}};
  return doc.dump(2) + "\n";
}

std::string lattice_summary(const SomLattice& lattice, const TrainConfig& config) {
  return fmt::format("{}x{} dim={} radius={} iterations={} alpha={}->{} seed={} init={}",
                     lattice.rows(), lattice.cols(), lattice.dim(), lattice.radius(),
                     config.iterations, config.alpha_start, config.alpha_end, config.seed,
                     config.init_mode == InitMode::SamplePixels ? "sample-pixels"
                                                                : "uniform-random");
}

std::size_t inversions(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("sequences differ in length");
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] - a[j]) * (b[i] - b[j]) < 0) ++discordant;
    }
  }
  return discordant;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("sequences differ in length");
  if (a.size() < 2) return 1.0;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  }
  const double pairs = static_cast<double>(a.size() * (a.size() - 1) / 2);
  return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace somqe
