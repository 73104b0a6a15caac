#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "somqe/pipeline.hpp"

namespace somqe::cli {

struct BenchOptions {
  PipelineOptions pipeline;
  std::optional<std::filesystem::path> input;
  std::filesystem::path out_dir = "out";
  std::size_t images = 20;
  std::size_t size = 512;
  int repetitions = 5;
};

// Budgets in milliseconds.
inline constexpr double kTrainBudgetMs = 2000.0;
inline constexpr double kScore20BudgetMs = 3000.0;
inline constexpr double kEndToEnd17BudgetMs = 5000.0;

void run_bench(const BenchOptions& options, std::ostream& out);

}  // namespace somqe::cli
