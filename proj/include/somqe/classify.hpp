#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "somqe/image.hpp"
#include "somqe/som.hpp"

namespace somqe {

/// |qe - qe_ref| at or below this counts as "no change".
inline constexpr double kDirectionTolerance = 1e-12;

struct QeScore {
  std::string image_id;
  double qe = 0.0;
  int direction = 0;      // sign of qe - qe_ref
  std::size_t rank = 0;   // 0 until rank() assigns 1..n

  friend bool operator==(const QeScore&, const QeScore&) = default;
};

struct Timings {
  double train_ms = 0.0;
  double score_ms = 0.0;
  std::vector<double> per_image_ms;  // parallel to the scored input order
};

struct ClassificationReport {
  std::string reference_id;
  std::string lattice_summary;
  std::vector<QeScore> scores;  // ascending qe, rank i+1 at position i
  Timings timings;
};

/// One score per image in input order. Throws ContractError if
/// `reference_id` is not among the images or channel counts disagree.
/// When `per_image_ms` is non-null it receives the wall time of each score.
std::vector<QeScore> score_series(const SomLattice& lattice,
                                  std::span<const ImageGrid> images,
                                  std::string_view reference_id,
                                  const QeOptions& options = {},
                                  std::vector<double>* per_image_ms = nullptr);

/// Sorts ascending by qe (ties: image_id) and assigns ranks 1..n.
/// Throws ContractError on empty input or non-finite qe.
ClassificationReport rank(std::vector<QeScore> scores);

enum class ReportFormat { Csv, Json };

inline constexpr int kReportSchemaVersion = 1;

/// CSV: header `rank,image_id,qe,direction`, LF endings, qe as %.17g.
/// JSON: the full report including timings and `schema_version`.
std::string emit_report(const ClassificationReport& report, ReportFormat format);

std::string lattice_summary(const SomLattice& lattice, const TrainConfig& config);

/// Kendall rank correlation (tau-a) between two equally long sequences.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Number of discordant pairs between two equally long sequences.
std::size_t inversions(std::span<const double> a, std::span<const double> b);

}  // namespace somqe
