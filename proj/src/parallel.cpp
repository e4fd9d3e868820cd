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

#include "kgforge/parallel.hpp"

#include <cmath>
#include <exception>

namespace kgforge::parallel {

namespace {

// Exceptions must not escape an OpenMP region; keep the first and rethrow.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::exception_ptr first;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(kgforge_parallel_error)
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

double row_cosine(std::span<const double> matrix, std::span<const double> norms, std::span<const double> q,
                  double q_norm, std::size_t row) {
  const std::size_t d = q.size();
  if (q_norm == 0.0 || norms[row] == 0.0) return 0.0;
  const double* r = matrix.data() + row * d;
  double dot = 0.0;
  for (std::size_t j = 0; j < d; ++j) dot += r[j] * q[j];
  return dot / (norms[row] * q_norm);
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<query::AnswerSet> answer_batch_serial(const kg::KnowledgeGraph& kg,
                                                  std::span<const query::GroundedQuery> queries) {
  std::vector<query::AnswerSet> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(query::answer(kg, q));
  return out;
}

std::vector<query::AnswerSet> answer_batch(const kg::KnowledgeGraph& kg,
                                           std::span<const query::GroundedQuery> queries) {
  std::vector<query::AnswerSet> out(queries.size());
  parallel_for(static_cast<std::ptrdiff_t>(queries.size()),
               [&](std::size_t i) { out[i] = query::answer(kg, queries[i]); });
  return out;
}

std::vector<double> cosine_scan_serial(std::span<const double> matrix, std::span<const double> norms,
                                       std::span<const double> query) {
  const double qn = norm_of(query);
  std::vector<double> out(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) out[i] = row_cosine(matrix, norms, query, qn, i);
  return out;
}

std::vector<double> cosine_scan(std::span<const double> matrix, std::span<const double> norms,
                                std::span<const double> query) {
  const double qn = norm_of(query);
  std::vector<double> out(norms.size());
  const auto n = static_cast<std::ptrdiff_t>(norms.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = row_cosine(matrix, norms, query, qn, static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<metrics::PrecisionOutcome> score_batch_serial(std::span<const ScoringJob> jobs,
                                                          const metrics::MatchConfig& config) {
  std::vector<metrics::PrecisionOutcome> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(metrics::precision_at_10(*job.extracted, *job.gold, config));
  return out;
}

std::vector<metrics::PrecisionOutcome> score_batch(std::span<const ScoringJob> jobs,
                                                   const metrics::MatchConfig& config) {
  std::vector<metrics::PrecisionOutcome> out(jobs.size());
  parallel_for(static_cast<std::ptrdiff_t>(jobs.size()), [&](std::size_t i) {
    out[i] = metrics::precision_at_10(*jobs[i].extracted, *jobs[i].gold, config);
  });
  return out;
}

}  // namespace kgforge::parallel
