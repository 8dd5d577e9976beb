// Copyright 2026 The collabtopm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLABTOPM_INSTANCE_HPP_
#define COLLABTOPM_INSTANCE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace collabtopm {

using ArmId = std::size_t;

// Bernoulli arms with means strictly inside (0, 1).
class Instance {
 public:
  explicit Instance(std::vector<double> means);

  std::size_t size() const { return means_.size(); }
  double mean(ArmId arm) const { return means_[arm]; }
  std::span<const double> means() const { return means_; }

  // Every reward x replaced by 1 - x.
  Instance flipped() const;

 private:
  std::vector<double> means_;
};

struct Problem {
  Instance instance;
  std::size_t m;
};

// Arm ids by decreasing mean; equal means ordered by smaller id.
std::vector<ArmId> rank_order(std::span<const double> means);

// theta_[j], 1-based.
double order_stat(std::span<const double> means, std::size_t j);

// Throws DegeneratePivot unless theta_[m] > theta_[m+1]; InvalidParams
// unless 1 <= m <= n-1.
void check_pivot(std::span<const double> means, std::size_t m);

double gap(std::span<const double> means, ArmId i, std::size_t m);
std::vector<double> gaps(std::span<const double> means, std::size_t m);

double complexity_h(std::span<const double> means, std::size_t m);
double complexity_h_trunc(std::span<const double> means, std::size_t m,
                          double eps);
double complexity_h_bar(std::span<const double> means, std::size_t m);

std::vector<ArmId> true_top_m(std::span<const double> means, std::size_t m);

// Predicates on a subset V given by arm ids; i must belong to V.
bool is_eps_top(std::span<const double> means, std::span<const ArmId> subset,
                ArmId i, double eps, std::size_t j);
bool is_eps_bottom(std::span<const double> means,
                   std::span<const ArmId> subset, ArmId i, double eps,
                   std::size_t j);

// Means of the listed arms, in list order.
std::vector<double> restrict_means(std::span<const double> means,
                                   std::span<const ArmId> arms);

struct ComplexityReport {
  std::size_t m = 0;
  std::vector<double> gaps;
  double h = 0.0;
  std::optional<double> eps;
  std::optional<double> h_eps;
  std::optional<double> h_bar;
};

ComplexityReport complexity_report(const Instance& instance, std::size_t m,
                                   std::optional<double> eps = std::nullopt);

// {"means":[...],"m":int}
std::string problem_to_json(const Problem& problem);
Problem problem_from_json(const std::string& text);
Problem read_problem(const std::string& path);
void write_problem(const std::string& path, const Problem& problem);

}  // namespace collabtopm

#endif  // COLLABTOPM_INSTANCE_HPP_
