// Copyright 2026 The Authors.
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

// Independent reference computations used as test oracles. None of these
// call the library routine they check.
#ifndef CGCD_TESTS_SUPPORT_ORACLES_H_
#define CGCD_TESTS_SUPPORT_ORACLES_H_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cgcd/matrix.h"
#include "cgcd/reduction.h"

namespace cgcd::testing {

using Vec = std::vector<double>;

std::vector<double> central_differences(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h = 1e-5);

// A coordinate agrees when |a - n| <= rel_tol * max(|a|, |n|) or
// |a - n| <= abs_tol.
struct GradientCheck {
  std::size_t coordinates = 0;
  std::size_t failures = 0;
  double max_relative_error = 0.0;  // over coordinates with |grad| >= 1e-6
  std::string first_failure;
  bool ok() const { return failures == 0; }
};
GradientCheck compare_gradients(std::span<const double> analytic,
                                std::span<const double> numeric,
                                double rel_tol = 1e-4, double abs_tol = 1e-8);

// Proxy-anchor loss written term by term with cosine similarity. With
// all_negatives false, only proxies of classes absent from the batch form
// the negative set.
double literal_pa_loss(const std::vector<Vec>& z, const std::vector<int>& labels,
                       const std::vector<Vec>& proxies,
                       const std::vector<int>& proxy_classes, double alpha,
                       double delta, bool all_negatives);

struct ShapeScale {
  double shape;
  double scale;
};
double literal_evt_loss(const std::vector<Vec>& z, const std::vector<int>& labels,
                        const std::vector<Vec>& proxies,
                        const std::vector<int>& proxy_classes,
                        const std::vector<ShapeScale>& weibulls,
                        bool all_negatives);

double literal_kd_loss(const std::vector<Vec>& old_z, const std::vector<Vec>& new_z);

// Best agreement over every injective relabeling of predicted ids onto
// truth ids, by enumerating permutations.
double brute_force_accuracy(const std::vector<int>& predicted,
                            const std::vector<int>& truth);

// Size of the smallest sub-collection of sets covering the universe, by
// subset enumeration.
std::size_t brute_force_min_cover(const CoverInstance& instance);

double harmonic(std::size_t n);

std::map<int, double> brute_force_recall(const RowMatrix& z,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& ks);

// Inverse-CDF draws scale * (-ln U)^(1/shape).
std::vector<double> weibull_samples(double shape, double scale, std::size_t n,
                                    std::uint64_t seed);

Vec random_unit(std::size_t dim, std::mt19937_64& rng);
Vec unit_axis(std::size_t dim, std::size_t axis, double sign = 1.0);
double plain_dot(const Vec& a, const Vec& b);
Vec plain_normalize(const Vec& v);

RowMatrix rows_to_matrix(const std::vector<Vec>& rows);

}  // namespace cgcd::testing

#endif  // CGCD_TESTS_SUPPORT_ORACLES_H_
