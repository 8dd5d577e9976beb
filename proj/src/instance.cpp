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

#include "collabtopm/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "collabtopm/errors.hpp"
#include "json.hpp"

namespace collabtopm {

namespace {

constexpr double kBoundaryTol = 1e-12;

// theta_[m] and theta_[m+1] without a full sort.
std::pair<double, double> pivot_pair(std::span<const double> means,
                                     std::size_t m) {
  std::vector<double> v(means.begin(), means.end());
  auto nth = v.begin() + static_cast<std::ptrdiff_t>(m - 1);
  std::nth_element(v.begin(), nth, v.end(), std::greater<>());
  const double upper = *nth;
  const double lower = *std::max_element(nth + 1, v.end());
  return {upper, lower};
}

}  // namespace

Instance::Instance(std::vector<double> means) : means_(std::move(means)) {
  if (means_.size() < 2) throw InvalidParams("instance needs at least 2 arms");
  for (double mu : means_) {
    if (!(mu > kBoundaryTol && mu < 1.0 - kBoundaryTol)) {
      throw InvalidParams("arm mean outside (0,1): " + std::to_string(mu));
    }
  }
}

Instance Instance::flipped() const {
  std::vector<double> out(means_.size());
  std::transform(means_.begin(), means_.end(), out.begin(),
                 [](double mu) { return 1.0 - mu; });
  return Instance(std::move(out));
}

std::vector<ArmId> rank_order(std::span<const double> means) {
  std::vector<ArmId> ids(means.size());
  std::iota(ids.begin(), ids.end(), ArmId{0});
  std::stable_sort(ids.begin(), ids.end(), [&](ArmId a, ArmId b) {
    return means[a] > means[b];
  });
  return ids;
}

double order_stat(std::span<const double> means, std::size_t j) {
  if (j < 1 || j > means.size()) throw InvalidParams("order statistic index");
  std::vector<double> v(means.begin(), means.end());
  auto nth = v.begin() + static_cast<std::ptrdiff_t>(j - 1);
  std::nth_element(v.begin(), nth, v.end(), std::greater<>());
  return *nth;
}

void check_pivot(std::span<const double> means, std::size_t m) {
  if (m < 1 || m + 1 > means.size()) {
    throw InvalidParams("pivot m must satisfy 1 <= m <= n-1");
  }
  auto [upper, lower] = pivot_pair(means, m);
  if (!(upper > lower)) throw DegeneratePivot("theta_[m] == theta_[m+1]");
}

double gap(std::span<const double> means, ArmId i, std::size_t m) {
  check_pivot(means, m);
  if (i >= means.size()) throw InvalidParams("arm index out of range");
  auto [upper, lower] = pivot_pair(means, m);
  return means[i] >= upper ? means[i] - lower : upper - means[i];
}

std::vector<double> gaps(std::span<const double> means, std::size_t m) {
  check_pivot(means, m);
  auto [upper, lower] = pivot_pair(means, m);
  std::vector<double> out(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    out[i] = means[i] >= upper ? means[i] - lower : upper - means[i];
  }
  return out;
}

double complexity_h(std::span<const double> means, std::size_t m) {
  double h = 0.0;
  for (double d : gaps(means, m)) h += 1.0 / (d * d);
  return h;
}

double complexity_h_trunc(std::span<const double> means, std::size_t m,
                          double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParams("eps must be in (0,1]");
  double h = 0.0;
  for (double d : gaps(means, m)) {
    const double e = std::max(d, eps);
    h += 1.0 / (e * e);
  }
  return h;
}

double complexity_h_bar(std::span<const double> means, std::size_t m) {
  const std::size_t n = means.size();
  if (m < 1 || m > n) throw InvalidParams("selection index out of range");
  const double pivot = order_stat(means, m);
  std::size_t ties = 0;
  double h = 0.0;
  for (double mu : means) {
    if (mu == pivot) {
      ++ties;
      continue;
    }
    const double d = mu - pivot;
    h += 1.0 / (d * d);
  }
  if (ties != 1) throw DegeneratePivot("m-th mean ties a neighbour");
  return h;
}

std::vector<ArmId> true_top_m(std::span<const double> means, std::size_t m) {
  check_pivot(means, m);
  std::vector<ArmId> order = rank_order(means);
  order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<double> restrict_means(std::span<const double> means,
                                   std::span<const ArmId> arms) {
  std::vector<double> out;
  out.reserve(arms.size());
  for (ArmId a : arms) {
    if (a >= means.size()) throw InvalidParams("arm index out of range");
    out.push_back(means[a]);
  }
  return out;
}

namespace {

void check_member(std::span<const double> means, std::span<const ArmId> subset,
                  ArmId i, std::size_t j) {
  if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
    throw InvalidParams("arm is not in the subset");
  }
  if (j < 1 || j > subset.size()) throw InvalidParams("rank j out of range");
  (void)means;
}

}  // namespace

bool is_eps_top(std::span<const double> means, std::span<const ArmId> subset,
                ArmId i, double eps, std::size_t j) {
  check_member(means, subset, i, j);
  const std::vector<double> sub = restrict_means(means, subset);
  return means[i] >= order_stat(sub, j) - eps;
}

bool is_eps_bottom(std::span<const double> means,
                   std::span<const ArmId> subset, ArmId i, double eps,
                   std::size_t j) {
  check_member(means, subset, i, j);
  const std::vector<double> sub = restrict_means(means, subset);
  return means[i] <= order_stat(sub, subset.size() + 1 - j) + eps;
}

ComplexityReport complexity_report(const Instance& instance, std::size_t m,
                                   std::optional<double> eps) {
  ComplexityReport r;
  r.m = m;
  r.gaps = gaps(instance.means(), m);
  for (double d : r.gaps) r.h += 1.0 / (d * d);
  if (eps) {
    r.eps = eps;
    r.h_eps = complexity_h_trunc(instance.means(), m, *eps);
  }
  try {
    r.h_bar = complexity_h_bar(instance.means(), m);
  } catch (const DegeneratePivot&) {
  }
  return r;
}

std::string problem_to_json(const Problem& problem) {
  nlohmann::ordered_json j;
  j["means"] = std::vector<double>(problem.instance.means().begin(),
                                   problem.instance.means().end());
  j["m"] = problem.m;
  return j.dump();
}

Problem problem_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return Problem{Instance(j.at("means").get<std::vector<double>>()),
                   j.at("m").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParams(std::string("bad instance json: ") + e.what());
  }
}

Problem read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

void write_problem(const std::string& path, const Problem& problem) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot write " + path);
  out << problem_to_json(problem) << '\n';
}

}  // namespace collabtopm
