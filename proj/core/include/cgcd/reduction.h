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

#ifndef CGCD_REDUCTION_H_
#define CGCD_REDUCTION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cgcd/embedding.h"
#include "cgcd/evt.h"

namespace cgcd {

// Set-cover instance over newly discovered proxies. sets[i] lists the
// universe members covered by universe[i], i.e. the proxies j with
// psi(p_i, p_j; w_i) >= zeta. Every set contains its own proxy.
struct CoverInstance {
  std::vector<std::size_t> universe;          // proxy indices
  std::vector<std::vector<std::size_t>> sets;  // parallel to universe
  double zeta = 0.999;
};

struct CoverSolution {
  std::vector<std::size_t> kept;  // proxy indices, in selection order
  // For each universe member (parallel to CoverInstance::universe), the
  // kept proxy whose set first covered it.
  std::vector<std::size_t> covered_by;
};

CoverInstance coverage_sets(const ProxySet& proxies,
                            std::span<const WeibullParams> weibulls,
                            std::span<const std::size_t> new_proxy_ids,
                            double zeta);

// Greedy cover: repeatedly keep the set with the most uncovered members,
// lowest proxy index on ties, until the universe is covered.
CoverSolution greedy_set_cover(const CoverInstance& instance);

// True if every universe member lies in the set of some kept proxy.
bool satisfies_cover(const CoverInstance& instance,
                     std::span<const std::size_t> kept);

struct ReductionResult {
  ProxySet proxies;
  std::vector<WeibullParams> weibulls;
  std::vector<int> labels;       // remapped pseudo-labels
  std::vector<int> class_remap;  // old class id -> new class id
  std::size_t kept_new_proxies = 0;
  std::size_t removed_proxies = 0;
};

// Removes redundant new proxies, merging each removed proxy's class into the
// class of the kept proxy that first covered it, and recompacts class ids.
// Proxies outside `new_proxy_ids` keep their class ids.
ReductionResult reduce_model(const ProxySet& proxies,
                             std::span<const WeibullParams> weibulls,
                             std::span<const std::size_t> new_proxy_ids,
                             double zeta, std::span<const int> pseudo_labels);

}  // namespace cgcd

#endif  // CGCD_REDUCTION_H_
