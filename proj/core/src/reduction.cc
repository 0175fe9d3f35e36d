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

#include "cgcd/reduction.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cgcd {

CoverInstance coverage_sets(const ProxySet& proxies,
                            std::span<const WeibullParams> weibulls,
                            std::span<const std::size_t> new_proxy_ids,
                            double zeta) {
  if (weibulls.size() != proxies.size()) {
    throw std::invalid_argument("coverage_sets: missing Weibull parameters");
  }
  CoverInstance inst;
  inst.zeta = zeta;
  inst.universe.assign(new_proxy_ids.begin(), new_proxy_ids.end());
  std::sort(inst.universe.begin(), inst.universe.end());
  inst.universe.erase(std::unique(inst.universe.begin(), inst.universe.end()),
                      inst.universe.end());
  for (std::size_t id : inst.universe) {
    if (id >= proxies.size()) {
      throw std::out_of_range("coverage_sets: proxy id out of range");
    }
  }
  for (std::size_t i : inst.universe) {
    std::vector<std::size_t> covered;
    for (std::size_t j : inst.universe) {
      // A proxy always covers itself (psi at distance 0 is 1).
      if (i == j || psi(proxies.proxies[i].vector, proxies.proxies[j].vector,
                        weibulls[i]) >= zeta) {
        covered.push_back(j);
      }
    }
    inst.sets.push_back(std::move(covered));
  }
  return inst;
}

CoverSolution greedy_set_cover(const CoverInstance& instance) {
  if (instance.sets.size() != instance.universe.size()) {
    throw std::invalid_argument("greedy_set_cover: sets/universe mismatch");
  }
  std::map<std::size_t, std::size_t> position;
  for (std::size_t p = 0; p < instance.universe.size(); ++p) {
    position[instance.universe[p]] = p;
  }
  const std::size_t n = instance.universe.size();
  CoverSolution sol;
  sol.covered_by.assign(n, 0);
  std::vector<bool> covered(n, false);
  std::vector<bool> chosen(n, false);
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t x, std::size_t y) {
    return instance.universe[x] < instance.universe[y];
  });
  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t best = n;
    std::size_t best_gain = 0;
    for (std::size_t p : by_id) {
      if (chosen[p]) continue;
      std::size_t gain = 0;
      for (std::size_t member : instance.sets[p]) {
        if (!covered[position.at(member)]) ++gain;
      }
      // Scanning by ascending id, the first maximizer wins ties.
      if (gain > best_gain) {
        best = p;
        best_gain = gain;
      }
    }
    if (best == n) {
      throw std::logic_error("greedy_set_cover: universe cannot be covered");
    }
    chosen[best] = true;
    sol.kept.push_back(instance.universe[best]);
    for (std::size_t member : instance.sets[best]) {
      const std::size_t q = position.at(member);
      if (!covered[q]) {
        covered[q] = true;
        sol.covered_by[q] = instance.universe[best];
        --remaining;
      }
    }
  }
  return sol;
}

bool satisfies_cover(const CoverInstance& instance,
                     std::span<const std::size_t> kept) {
  std::set<std::size_t> covered;
  for (std::size_t k : kept) {
    const auto it =
        std::find(instance.universe.begin(), instance.universe.end(), k);
    if (it == instance.universe.end()) return false;
    const auto& set = instance.sets[static_cast<std::size_t>(
        it - instance.universe.begin())];
    covered.insert(set.begin(), set.end());
  }
  for (std::size_t u : instance.universe) {
    if (!covered.contains(u)) return false;
  }
  return true;
}

ReductionResult reduce_model(const ProxySet& proxies,
                             std::span<const WeibullParams> weibulls,
                             std::span<const std::size_t> new_proxy_ids,
                             double zeta, std::span<const int> pseudo_labels) {
  const CoverInstance inst =
      coverage_sets(proxies, weibulls, new_proxy_ids, zeta);
  const CoverSolution sol = greedy_set_cover(inst);
  const std::set<std::size_t> kept(sol.kept.begin(), sol.kept.end());

  // Removed proxy -> kept proxy that first covered it.
  std::map<std::size_t, std::size_t> merge_into;
  for (std::size_t p = 0; p < inst.universe.size(); ++p) {
    if (!kept.contains(inst.universe[p])) {
      merge_into[inst.universe[p]] = sol.covered_by[p];
    }
  }

  std::set<int> surviving_classes;
  for (std::size_t i = 0; i < proxies.size(); ++i) {
    if (!merge_into.contains(i)) {
      surviving_classes.insert(proxies.proxies[i].class_id);
    }
  }
  std::map<int, int> compact;
  for (int c : surviving_classes) {
    compact[c] = static_cast<int>(compact.size());
  }

  ReductionResult out;
  out.class_remap.assign(static_cast<std::size_t>(proxies.class_count), -1);
  for (int c : surviving_classes) {
    out.class_remap[static_cast<std::size_t>(c)] = compact.at(c);
  }
  for (const auto& [removed, target] : merge_into) {
    const int c = proxies.proxies[removed].class_id;
    auto& slot = out.class_remap[static_cast<std::size_t>(c)];
    if (slot < 0) slot = compact.at(proxies.proxies[target].class_id);
  }

  for (std::size_t i = 0; i < proxies.size(); ++i) {
    if (merge_into.contains(i)) continue;
    Proxy p = proxies.proxies[i];
    p.class_id = out.class_remap[static_cast<std::size_t>(p.class_id)];
    out.proxies.proxies.push_back(std::move(p));
    out.weibulls.push_back(weibulls[i]);
  }
  out.proxies.class_count = static_cast<int>(surviving_classes.size());
  out.kept_new_proxies = sol.kept.size();
  out.removed_proxies = merge_into.size();

  out.labels.reserve(pseudo_labels.size());
  for (int l : pseudo_labels) {
    if (l < 0 || l >= proxies.class_count) {
      throw std::out_of_range("reduce_model: pseudo-label out of range");
    }
    out.labels.push_back(out.class_remap[static_cast<std::size_t>(l)]);
  }
  return out;
}

}  // namespace cgcd
