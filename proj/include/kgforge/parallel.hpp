// Copyright 2026 The kgforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch kernels. Each has a serial reference and an OpenMP version that
// must produce identical results; tests and benchmarks compare the two.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "kgforge/eval_metrics.hpp"
#include "kgforge/kg_store.hpp"
#include "kgforge/query_engine.hpp"

namespace kgforge::parallel {

std::vector<query::AnswerSet> answer_batch_serial(const kg::KnowledgeGraph& kg,
                                                  std::span<const query::GroundedQuery> queries);
std::vector<query::AnswerSet> answer_batch(const kg::KnowledgeGraph& kg,
                                           std::span<const query::GroundedQuery> queries);

/// Cosine of `query` against each row of the row-major `matrix` (rows of
/// query.size() values, precomputed `norms`). Zero norms give 0.
std::vector<double> cosine_scan_serial(std::span<const double> matrix, std::span<const double> norms,
                                       std::span<const double> query);
std::vector<double> cosine_scan(std::span<const double> matrix, std::span<const double> norms,
                                std::span<const double> query);

struct ScoringJob {
  const std::vector<std::string>* extracted = nullptr;
  const std::vector<std::string>* gold = nullptr;
};

std::vector<metrics::PrecisionOutcome> score_batch_serial(std::span<const ScoringJob> jobs,
                                                          const metrics::MatchConfig& config);
std::vector<metrics::PrecisionOutcome> score_batch(std::span<const ScoringJob> jobs,
                                                   const metrics::MatchConfig& config);

}  // namespace kgforge::parallel
