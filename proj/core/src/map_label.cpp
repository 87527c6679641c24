#include "symtensor/map_label.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>
#include <set>
#include <stdexcept>

#include "symtensor/combinatorics.hpp"

namespace symtensor {

int LabelledDiagram::num_labels() const {
  std::set<int> ids;
  for (const Spider& s : spiders) {
    if (s.label != kNoLabel) ids.insert(s.label);
  }
  return static_cast<int>(ids.size());
}

bool LabelledDiagram::fully_labelled() const {
  return std::all_of(spiders.begin(), spiders.end(),
                     [](const Spider& s) { return s.label != kNoLabel; });
}

void LabelledDiagram::canonicalize() {
  std::sort(spiders.begin(), spiders.end(), [](const Spider& a, const Spider& b) {
    const bool la = a.label != kNoLabel;
    const bool lb = b.label != kNoLabel;
    if (la != lb) return la;
    if (la) return a.label < b.label;
    if (a.y != b.y) return a.y > b.y;
    return a.x > b.x;
  });
}

std::vector<int> LabelledDiagram::output_pattern() const {
  LabelledDiagram copy = *this;
  copy.canonicalize();
  std::vector<int> pattern;
  for (const Spider& s : copy.spiders) {
    if (s.label != kNoLabel) pattern.insert(pattern.end(), s.y, s.label);
  }
  return pattern;
}

bool LabelledDiagram::merge_equal_labels() {
  std::vector<Spider> merged;
  bool changed = false;
  for (const Spider& s : spiders) {
    if (s.label == kNoLabel) {
      merged.push_back(s);
      continue;
    }
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Spider& m) { return m.label == s.label; });
    if (it == merged.end()) {
      merged.push_back(s);
    } else {
      it->x += s.x;
      it->y += s.y;
      changed = true;
    }
  }
  spiders = std::move(merged);
  return changed;
}

namespace {

// ---- multiset machinery ---------------------------------------------------

// All distinct sub-multisets of the given size from a sorted pool, each
// paired with the sorted remainder.
void submultisets_rec(const std::vector<int>& pool, std::size_t pos, int want,
                      std::vector<int>& chosen, std::vector<int>& rest,
                      std::vector<std::pair<std::vector<int>, std::vector<int>>>& out) {
  if (want == 0) {
    std::vector<int> remainder = rest;
    remainder.insert(remainder.end(), pool.begin() + pos, pool.end());
    out.emplace_back(chosen, std::move(remainder));
    return;
  }
  if (pool.size() - pos < static_cast<std::size_t>(want)) return;
  // take one or more copies of pool[pos], or skip the whole run
  std::size_t run_end = pos;
  while (run_end < pool.size() && pool[run_end] == pool[pos]) ++run_end;
  const int run = static_cast<int>(run_end - pos);
  for (int take = std::min(run, want); take >= 0; --take) {
    const std::size_t chosen_size = chosen.size();
    const std::size_t rest_size = rest.size();
    chosen.insert(chosen.end(), take, pool[pos]);
    rest.insert(rest.end(), run - take, pool[pos]);
    submultisets_rec(pool, run_end, want - take, chosen, rest, out);
    chosen.resize(chosen_size);
    rest.resize(rest_size);
  }
}

// All distinct ways to split a sorted multiset into ordered groups of the
// prescribed sizes; every group comes out sorted.
void distributions_rec(const std::vector<int>& pool, const std::vector<int>& sizes,
                       std::size_t g, std::vector<std::vector<int>>& acc,
                       std::vector<std::vector<std::vector<int>>>& out) {
  if (g == sizes.size()) {
    out.push_back(acc);
    return;
  }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> picks;
  std::vector<int> chosen, rest;
  submultisets_rec(pool, 0, sizes[g], chosen, rest, picks);
  for (auto& [part, remainder] : picks) {
    acc.push_back(part);
    distributions_rec(remainder, sizes, g + 1, acc, out);
    acc.pop_back();
  }
}

std::vector<std::vector<std::vector<int>>> multiset_distributions(
    std::vector<int> pool, const std::vector<int>& sizes) {
  std::sort(pool.begin(), pool.end());
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> acc;
  distributions_rec(pool, sizes, 0, acc, out);
  return out;
}

// Canonical form of a group assignment under bijective relabelling of the
// ids in `renameable` (other ids are pinned): the lexicographically smallest
// relabelled form. Only relabellings that preserve each id's multiplicity in
// `pool` are bijections of the multiset being distributed, so only those are
// applied. Small id counts; brute force over the admissible permutations.
std::vector<std::vector<int>> relabel_min(const std::vector<std::vector<int>>& groups,
                                          const std::vector<int>& pool,
                                          std::vector<int> renameable) {
  std::sort(renameable.begin(), renameable.end());
  std::map<int, int> mult;
  for (int v : pool) ++mult[v];

  std::vector<std::vector<int>> best = groups;
  for (auto& grp : best) std::sort(grp.begin(), grp.end());

  std::vector<int> perm = renameable;
  do {
    bool admissible = true;
    for (std::size_t i = 0; i < renameable.size(); ++i) {
      if (mult[renameable[i]] != mult[perm[i]]) { admissible = false; break; }
    }
    if (!admissible) continue;
    std::vector<std::vector<int>> relabelled = groups;
    for (auto& grp : relabelled) {
      for (int& v : grp) {
        auto it = std::lower_bound(renameable.begin(), renameable.end(), v);
        if (it != renameable.end() && *it == v) v = perm[it - renameable.begin()];
      }
      std::sort(grp.begin(), grp.end());
    }
    if (relabelled < best) best = std::move(relabelled);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Canonical form of a diagram under bijective relabelling of free ids
// (>= num_fixed). Fixed labels stay pinned.
LabelledDiagram canonical_modulo_free(const LabelledDiagram& d, int num_fixed) {
  std::set<int> frees;
  for (const Spider& s : d.spiders) {
    if (s.label >= num_fixed) frees.insert(s.label);
  }
  std::vector<int> ids(frees.begin(), frees.end());
  LabelledDiagram best;
  std::vector<int> perm = ids;
  bool first = true;
  do {
    LabelledDiagram relabelled = d;
    for (Spider& s : relabelled.spiders) {
      if (s.label >= num_fixed) {
        auto it = std::lower_bound(ids.begin(), ids.end(), s.label);
        s.label = perm[it - ids.begin()];
      }
    }
    relabelled.canonicalize();
    if (first || relabelled < best) {
      best = std::move(relabelled);
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---- Subprocedure I internals ---------------------------------------------

struct OutputGrouping {
  std::vector<Spider> sorted;              // output spiders, (y desc, x desc)
  std::vector<int> group_sizes;            // runs of equal y
  std::vector<std::vector<int>> sub_sizes; // per group: runs of equal x
};

OutputGrouping output_grouping(const std::vector<Spider>& spiders) {
  OutputGrouping g;
  for (const Spider& s : spiders) {
    if (s.y > 0) g.sorted.push_back(s);
  }
  std::sort(g.sorted.begin(), g.sorted.end(), [](const Spider& a, const Spider& b) {
    if (a.y != b.y) return a.y > b.y;
    return a.x > b.x;
  });
  std::size_t i = 0;
  while (i < g.sorted.size()) {
    std::size_t j = i;
    while (j < g.sorted.size() && g.sorted[j].y == g.sorted[i].y) ++j;
    g.group_sizes.push_back(static_cast<int>(j - i));
    std::vector<int> subs;
    std::size_t p = i;
    while (p < j) {
      std::size_t q = p;
      while (q < j && g.sorted[q].x == g.sorted[p].x) ++q;
      subs.push_back(static_cast<int>(q - p));
      p = q;
    }
    g.sub_sizes.push_back(std::move(subs));
    i = j;
  }
  return g;
}

// All label tuples for the grouped shape: per group, every split of its label
// multiset by the input-count sub-structure, groups combined by Cartesian
// product. Tuple order matches the sorted spider order.
std::vector<std::vector<int>> grouping_tuples(const OutputGrouping& g,
                                              const std::vector<std::vector<int>>& per_group_labels) {
  std::vector<std::vector<std::vector<int>>> per_group_tuples(g.group_sizes.size());
  for (std::size_t b = 0; b < g.group_sizes.size(); ++b) {
    std::set<std::vector<int>> tuples;
    for (const auto& split : multiset_distributions(per_group_labels[b], g.sub_sizes[b])) {
      std::vector<int> tuple;
      for (const auto& part : split) tuple.insert(tuple.end(), part.begin(), part.end());
      tuples.insert(std::move(tuple));
    }
    per_group_tuples[b].assign(tuples.begin(), tuples.end());
  }
  std::vector<std::vector<int>> out;
  std::vector<int> acc;
  auto rec = [&](auto&& self, std::size_t b) -> void {
    if (b == per_group_tuples.size()) {
      out.push_back(acc);
      return;
    }
    for (const auto& tuple : per_group_tuples[b]) {
      const std::size_t sz = acc.size();
      acc.insert(acc.end(), tuple.begin(), tuple.end());
      self(self, b + 1);
      acc.resize(sz);
    }
  };
  rec(rec, 0);
  return out;
}

// Merge fixed point: a labelled assignment may fuse spiders; fused shapes are
// re-enumerated with the labels kept inside their new output groups, and the
// results merged again until stable.
void process_assignment(LabelledDiagram diagram, const std::vector<Spider>& passive,
                        std::set<LabelledDiagram>& final_set) {
  if (!diagram.merge_equal_labels()) {
    LabelledDiagram full = diagram;
    full.spiders.insert(full.spiders.end(), passive.begin(), passive.end());
    full.canonicalize();
    final_set.insert(std::move(full));
    return;
  }
  const OutputGrouping g = output_grouping(diagram.spiders);
  // labels of the merged diagram collected per new output group
  std::vector<std::vector<int>> per_group_labels;
  {
    std::size_t off = 0;
    for (int size : g.group_sizes) {
      std::vector<int> labels;
      for (int i = 0; i < size; ++i) labels.push_back(g.sorted[off + i].label);
      std::sort(labels.begin(), labels.end());
      per_group_labels.push_back(std::move(labels));
      off += size;
    }
  }
  for (const auto& tuple : grouping_tuples(g, per_group_labels)) {
    LabelledDiagram relabelled;
    relabelled.spiders = g.sorted;
    for (std::size_t i = 0; i < tuple.size(); ++i) relabelled.spiders[i].label = tuple[i];
    process_assignment(std::move(relabelled), passive, final_set);
  }
}

}  // namespace

std::map<GroupedOutput, std::vector<LabelledDiagram>> subprocedure_I(const Bipartition& d) {
  std::vector<Spider> output_spiders;
  std::vector<Spider> passive;  // spiders without output wires stay unlabelled
  for (const Block& blk : d.blocks()) {
    Spider s{blk.x, blk.y, kNoLabel};
    (blk.y > 0 ? output_spiders : passive).push_back(s);
  }
  const OutputGrouping grouping = output_grouping(output_spiders);
  const int t = static_cast<int>(grouping.sorted.size());

  std::set<LabelledDiagram> final_set;
  if (t == 0) {
    LabelledDiagram bare;
    bare.spiders = passive;
    bare.canonicalize();
    final_set.insert(std::move(bare));
  } else {
    for (const IntegerPartition& lambda : integer_partitions(t, t)) {
      std::vector<int> multiset;
      int label = 0;
      for (int part : lambda.parts) {
        if (part == 0) break;
        multiset.insert(multiset.end(), part, label++);
      }
      // distributions of the label multiset over the output-count groups,
      // modulo relabelling
      std::set<std::vector<std::vector<int>>> assignments;
      std::vector<int> ids(label);
      std::iota(ids.begin(), ids.end(), 0);
      for (const auto& dist : multiset_distributions(multiset, grouping.group_sizes)) {
        assignments.insert(relabel_min(dist, multiset, ids));
      }
      for (const auto& assignment : assignments) {
        for (const auto& tuple : grouping_tuples(grouping, assignment)) {
          LabelledDiagram diagram;
          diagram.spiders = grouping.sorted;
          for (std::size_t i = 0; i < tuple.size(); ++i) diagram.spiders[i].label = tuple[i];
          process_assignment(std::move(diagram), passive, final_set);
        }
      }
    }
  }

  std::map<GroupedOutput, std::vector<LabelledDiagram>> out;
  for (const LabelledDiagram& diagram : final_set) {
    out[diagram.output_pattern()].push_back(diagram);
  }
  return out;
}

FullLabellings subprocedure_II(const LabelledDiagram& partial) {
  LabelledDiagram base = partial;
  base.canonicalize();

  std::vector<int> fixed_ids;
  std::vector<Spider> unlabelled;
  for (const Spider& s : base.spiders) {
    if (s.label != kNoLabel) {
      fixed_ids.push_back(s.label);
    } else {
      unlabelled.push_back(s);
    }
  }
  std::sort(fixed_ids.begin(), fixed_ids.end());
  const int num_fixed = static_cast<int>(fixed_ids.size());
  const int free_base = fixed_ids.empty() ? 0 : fixed_ids.back() + 1;
  const int s = static_cast<int>(unlabelled.size());

  FullLabellings result;
  std::set<LabelledDiagram> final_set;
  if (s == 0) {
    result.raw_count = 1;
    final_set.insert(base);
  }

  // unlabelled spiders grouped by input count (already x desc from canonicalize)
  std::vector<int> group_sizes;
  std::vector<std::size_t> group_offsets;
  {
    std::size_t i = 0;
    while (i < unlabelled.size()) {
      std::size_t j = i;
      while (j < unlabelled.size() && unlabelled[j].x == unlabelled[i].x) ++j;
      group_offsets.push_back(i);
      group_sizes.push_back(static_cast<int>(j - i));
      i = j;
    }
  }

  for (int c = 0; c <= s && s > 0; ++c) {
    // structural splits: which groups hold how many fixed/free slots
    std::vector<int> xf_pool;
    xf_pool.insert(xf_pool.end(), c, 1);       // 1 = fixed slot
    xf_pool.insert(xf_pool.end(), s - c, 0);   // 0 = free slot
    const auto splits = multiset_distributions(xf_pool, group_sizes);

    // fixed label multisets of size c
    std::vector<std::vector<int>> fixed_multisets;
    {
      std::vector<int> acc;
      auto rec = [&](auto&& self, int pos, int want) -> void {
        if (want == 0) {
          fixed_multisets.push_back(acc);
          return;
        }
        for (int i = pos; i < num_fixed; ++i) {
          acc.push_back(fixed_ids[i]);
          self(self, i, want - 1);
          acc.pop_back();
        }
      };
      rec(rec, 0, c);
    }
    if (fixed_multisets.empty()) continue;  // c > 0 with no fixed labels available

    // free label multisets of size s-c, one per integer partition shape
    std::vector<std::vector<int>> free_multisets;
    if (s - c == 0) {
      free_multisets.push_back({});
    } else {
      for (const IntegerPartition& p : integer_partitions(s - c, s - c)) {
        std::vector<int> fs;
        int next = free_base;
        for (int part : p.parts) {
          if (part == 0) break;
          fs.insert(fs.end(), part, next++);
        }
        free_multisets.push_back(std::move(fs));
      }
    }

    for (const auto& split : splits) {
      std::vector<int> x_sizes, f_sizes;
      for (const auto& grp : split) {
        x_sizes.push_back(static_cast<int>(std::count(grp.begin(), grp.end(), 1)));
        f_sizes.push_back(static_cast<int>(std::count(grp.begin(), grp.end(), 0)));
      }
      for (const auto& fm : fixed_multisets) {
        for (const auto& fs : free_multisets) {
          std::vector<int> frees_present(fs.begin(), fs.end());
          std::sort(frees_present.begin(), frees_present.end());
          frees_present.erase(std::unique(frees_present.begin(), frees_present.end()),
                              frees_present.end());
          std::set<std::vector<std::vector<int>>> assignments;
          for (const auto& dx : multiset_distributions(fm, x_sizes)) {
            for (const auto& df : multiset_distributions(fs, f_sizes)) {
              std::vector<std::vector<int>> groups(group_sizes.size());
              for (std::size_t g = 0; g < groups.size(); ++g) {
                groups[g] = dx[g];
                groups[g].insert(groups[g].end(), df[g].begin(), df[g].end());
                std::sort(groups[g].begin(), groups[g].end());
              }
              assignments.insert(relabel_min(groups, fs, frees_present));
            }
          }
          result.raw_count += static_cast<int>(assignments.size());
          for (const auto& assignment : assignments) {
            LabelledDiagram full = base;
            // rebuild: labelled spiders plus freshly labelled copies
            full.spiders.clear();
            for (const Spider& sp : base.spiders) {
              if (sp.label != kNoLabel) full.spiders.push_back(sp);
            }
            for (std::size_t g = 0; g < group_sizes.size(); ++g) {
              for (int i = 0; i < group_sizes[g]; ++i) {
                Spider sp = unlabelled[group_offsets[g] + i];
                sp.label = assignment[g][i];
                full.spiders.push_back(sp);
              }
            }
            full.merge_equal_labels();
            final_set.insert(canonical_modulo_free(full, num_fixed));
          }
        }
      }
    }
  }

  result.diagrams.assign(final_set.begin(), final_set.end());
  return result;
}

GroupedMapLabel subprocedure_III(const LabelledDiagram& full) {
  if (!full.fully_labelled())
    throw std::invalid_argument("subprocedure_III: diagram is not fully labelled");
  LabelledDiagram d = full;
  d.canonicalize();

  // normalize ids: output-bearing labels to 0.., the rest after
  std::vector<int> fixed, frees;
  for (const Spider& s : d.spiders) (s.y > 0 ? fixed : frees).push_back(s.label);
  std::sort(fixed.begin(), fixed.end());
  std::sort(frees.begin(), frees.end());
  std::map<int, int> remap;
  for (int id : fixed) remap[id] = static_cast<int>(remap.size());
  for (int id : frees) remap[id] = static_cast<int>(remap.size());
  for (Spider& s : d.spiders) s.label = remap.at(s.label);
  d.canonicalize();

  GroupedMapLabel g;
  g.num_fixed = static_cast<int>(fixed.size());
  g.num_free = static_cast<int>(frees.size());
  for (const Spider& s : d.spiders) {
    g.lhs.insert(g.lhs.end(), s.y, s.label);
    g.rhs.insert(g.rhs.end(), s.x, s.label);
  }
  return g;
}

namespace {

// First-occurrence renaming of free ids only; fixed ids stay.
std::vector<int> canonical_free_tuple(const std::vector<int>& tuple, int num_fixed) {
  std::vector<int> out = tuple;
  std::map<int, int> remap;
  for (int& v : out) {
    if (v < num_fixed) continue;
    auto [it, inserted] = remap.emplace(v, num_fixed + static_cast<int>(remap.size()));
    v = it->second;
  }
  return out;
}

}  // namespace

LeftGroupedMapLabel subprocedure_IV(const GroupedMapLabel& g) {
  LeftGroupedMapLabel out;
  out.lhs = g.lhs;
  out.num_fixed = g.num_fixed;

  std::vector<int> tuple = g.rhs;
  std::sort(tuple.begin(), tuple.end());
  std::set<std::vector<int>> seen;
  do {
    seen.insert(canonical_free_tuple(tuple, g.num_fixed));
  } while (std::next_permutation(tuple.begin(), tuple.end()));

  for (const auto& term_tuple : seen) {
    Term term;
    term.coef = 1;
    term.tuple = term_tuple;
    term.num_free = g.num_free;
    term.distinct = true;
    out.terms.push_back(std::move(term));
  }
  return out;
}

std::vector<MapLabel> subprocedure_V(const LeftGroupedMapLabel& lg) {
  const int t = lg.num_fixed;
  std::vector<int> mult(t, 0);
  for (int id : lg.lhs) ++mult[id];

  // relabellings that permute only equal-multiplicity labels
  std::vector<std::vector<int>> relabellings;
  {
    std::vector<int> rho(t);
    std::iota(rho.begin(), rho.end(), 0);
    do {
      bool ok = true;
      for (int i = 0; i < t; ++i) {
        if (mult[rho[i]] != mult[i]) { ok = false; break; }
      }
      if (ok) relabellings.push_back(rho);
    } while (std::next_permutation(rho.begin(), rho.end()));
  }

  std::vector<int> pattern = lg.lhs;
  std::sort(pattern.begin(), pattern.end());
  std::set<std::vector<int>> reps;
  if (pattern.empty()) {
    reps.insert(std::vector<int>{});
  } else {
    do {
      std::vector<int> best = pattern;
      for (const auto& rho : relabellings) {
        std::vector<int> mapped(pattern.size());
        for (std::size_t i = 0; i < pattern.size(); ++i) mapped[i] = rho[pattern[i]];
        if (mapped < best) best = std::move(mapped);
      }
      reps.insert(std::move(best));
    } while (std::next_permutation(pattern.begin(), pattern.end()));
  }

  std::vector<MapLabel> out;
  for (const auto& rep : reps) {
    MapLabel label;
    label.lhs = rep;
    label.terms = lg.terms;
    label.min_spiders = t;
    out.push_back(std::move(label));
  }
  return out;
}

Kernel compile_kernel(const Bipartition& d, std::optional<int> n_filter) {
  Kernel ker;
  ker.diagram = d;
  ker.k = d.k();
  ker.l = d.l();
  ker.simplified = false;

  for (const auto& [pattern, partials] : subprocedure_I(d)) {
    std::set<LabelledDiagram> fulls;
    for (const LabelledDiagram& partial : partials) {
      const auto labelled = subprocedure_II(partial);
      fulls.insert(labelled.diagrams.begin(), labelled.diagrams.end());
    }
    if (n_filter) {
      std::erase_if(fulls, [&](const LabelledDiagram& f) {
        return static_cast<int>(f.spiders.size()) > *n_filter;
      });
      if (fulls.empty()) continue;
    }
    LeftGroupedMapLabel combined;
    combined.lhs = pattern;
    combined.num_fixed = static_cast<int>(std::set<int>(pattern.begin(), pattern.end()).size());
    for (const LabelledDiagram& full : fulls) {
      const LeftGroupedMapLabel lg = subprocedure_IV(subprocedure_III(full));
      combined.terms.insert(combined.terms.end(), lg.terms.begin(), lg.terms.end());
    }
    std::sort(combined.terms.begin(), combined.terms.end());
    for (MapLabel& label : subprocedure_V(combined)) {
      ker.labels.push_back(std::move(label));
    }
  }
  std::sort(ker.labels.begin(), ker.labels.end(),
            [](const MapLabel& a, const MapLabel& b) { return a.lhs < b.lhs; });
  return ker;
}

namespace {

// Rewrites one all-distinct term into unconstrained sums: repeatedly trade the
// last constrained free label x for (x unrestricted) minus (x merged into each
// remaining label).
void eliminate_distinct(std::int64_t coef, std::vector<int> tuple, int num_fixed,
                        int num_constrained,
                        std::vector<std::pair<std::int64_t, std::vector<int>>>& out) {
  if (num_constrained == 0) {
    out.emplace_back(coef, std::move(tuple));
    return;
  }
  const int x = num_fixed + num_constrained - 1;
  eliminate_distinct(coef, tuple, num_fixed, num_constrained - 1, out);
  for (int y = 0; y < x; ++y) {
    std::vector<int> merged = tuple;
    for (int& v : merged) {
      if (v == x) v = y;
    }
    eliminate_distinct(-coef, std::move(merged), num_fixed, num_constrained - 1, out);
  }
}

// Canonical unconstrained term: slot order normalised to ascending label id
// (sound on symmetric tensors), free ids renumbered by descending multiplicity.
std::pair<std::vector<int>, int> canonical_unconstrained(const std::vector<int>& tuple,
                                                         int num_fixed) {
  std::map<int, int> mult;
  for (int v : tuple) ++mult[v];
  std::vector<std::pair<int, int>> frees;  // (mult, original id)
  for (const auto& [id, m] : mult) {
    if (id >= num_fixed) frees.emplace_back(m, id);
  }
  std::sort(frees.begin(), frees.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  for (const auto& [id, m] : mult) {
    if (id < num_fixed) out.insert(out.end(), m, id);
  }
  int next = num_fixed;
  for (const auto& [m, id] : frees) out.insert(out.end(), m, next++);
  return {out, static_cast<int>(frees.size())};
}

}  // namespace

Kernel simplify_kernel(const Kernel& ker) {
  Kernel out = ker;
  out.simplified = true;
  out.labels.clear();
  for (const MapLabel& label : ker.labels) {
    const int t = label.min_spiders;
    std::map<std::vector<int>, std::pair<std::int64_t, int>> collected;
    for (const Term& term : label.terms) {
      std::vector<std::pair<std::int64_t, std::vector<int>>> pieces;
      if (term.distinct) {
        eliminate_distinct(term.coef, term.tuple, t, term.num_free, pieces);
      } else {
        pieces.emplace_back(term.coef, term.tuple);
      }
      for (auto& [coef, tuple] : pieces) {
        auto [canon, num_free] = canonical_unconstrained(tuple, t);
        auto [it, inserted] = collected.emplace(canon, std::make_pair(coef, num_free));
        if (!inserted) it->second.first += coef;
      }
    }
    MapLabel simplified;
    simplified.lhs = label.lhs;
    simplified.min_spiders = label.min_spiders;
    for (const auto& [tuple, entry] : collected) {
      if (entry.first == 0) continue;
      Term term;
      term.coef = entry.first;
      term.tuple = tuple;
      term.num_free = entry.second;
      term.distinct = false;
      simplified.terms.push_back(std::move(term));
    }
    if (!simplified.terms.empty()) out.labels.push_back(std::move(simplified));
  }
  return out;
}

namespace {
// Sum of one term over its free labels for fixed lhs values. vals holds
// positions for all label ids (lhs filled in, frees written here); inst is a
// scratch buffer of tuple size.
double term_free_sum(const Term& term, int num_fixed, std::vector<int>& vals,
                     std::vector<int>& inst, const SymmetricTensor& t, int depth) {
  const int n = t.n();
  if (depth == term.num_free) {
    for (std::size_t i = 0; i < term.tuple.size(); ++i) inst[i] = vals[term.tuple[i]];
    std::sort(inst.begin(), inst.end());
    return t.value_at_rank(t.space().rank(inst));
  }
  const int id = num_fixed + depth;
  double acc = 0.0;
  for (int v = 0; v < n; ++v) {
    if (term.distinct) {
      bool used = false;
      for (int j = 0; j < id; ++j) {
        if (vals[j] == v) { used = true; break; }
      }
      if (used) continue;
    }
    vals[id] = v;
    acc += term_free_sum(term, num_fixed, vals, inst, t, depth + 1);
  }
  return acc;
}

// ---- pooled evaluation of unconstrained terms -----------------------------
//
// An unconstrained term is a sum over its free labels of tensor entries whose
// index multiset is (used lhs values with fixed multiplicities) + (free
// values). Summed over all free assignments, each compressed entry
// contributes a fixed count per used-value tuple. Those (entry, tuple, count)
// triples depend only on (n, k, multiplicity signature), so they are built
// once and cached; evaluating a term is then one pass over the entries.

struct PlanEntry {
  std::int64_t rank;
  std::int32_t flat;   // row-major index of the used-value tuple
  std::int32_t count;
};

using PlanKey = std::tuple<int, int, std::vector<int>, std::vector<int>>;

// Ordered free assignments (w_1..w_f) with multiplicities free_mults whose
// combined multiset equals rem.
int free_match_count(std::vector<std::pair<int, int>>& rem,
                     const std::vector<int>& free_mults, std::size_t fi) {
  if (fi == free_mults.size()) {
    for (const auto& [value, mult] : rem) {
      if (mult != 0) return 0;
    }
    return 1;
  }
  int total = 0;
  for (auto& [value, mult] : rem) {
    if (mult < free_mults[fi]) continue;
    mult -= free_mults[fi];
    total += free_match_count(rem, free_mults, fi + 1);
    mult += free_mults[fi];
  }
  return total;
}

std::vector<PlanEntry> build_plan(int n, int k, const std::vector<int>& used_mults,
                                  const std::vector<int>& free_mults) {
  const int u = static_cast<int>(used_mults.size());
  IndexSpace space(n, k);
  std::vector<PlanEntry> plan;
  const auto indices = space.all();
  std::vector<std::pair<int, int>> support;  // (value, multiplicity)
  std::vector<int> chosen(u);
  for (std::int64_t r = 0; r < space.size(); ++r) {
    support.clear();
    for (int v : indices[r]) {
      if (!support.empty() && support.back().first == v) {
        ++support.back().second;
      } else {
        support.emplace_back(v, 1);
      }
    }
    // assign distinct support values to the used labels, then match frees
    auto rec = [&](auto&& self, int j) -> void {
      if (j == u) {
        const int count = free_match_count(support, free_mults, 0);
        if (count > 0) {
          std::int32_t flat = 0;
          for (int i = 0; i < u; ++i) flat = flat * n + chosen[i];
          plan.push_back(PlanEntry{r, flat, count});
        }
        return;
      }
      for (auto& [value, mult] : support) {
        if (mult < used_mults[j]) continue;
        bool taken = false;
        for (int i = 0; i < j; ++i) {
          if (chosen[i] == value) { taken = true; break; }
        }
        if (taken) continue;
        mult -= used_mults[j];
        chosen[j] = value;
        self(self, j + 1);
        mult += used_mults[j];
      }
    };
    rec(rec, 0);
  }
  return plan;
}

const std::vector<PlanEntry>& pooled_plan(int n, int k, const std::vector<int>& used_mults,
                                          const std::vector<int>& free_mults) {
  static std::mutex mutex;
  static std::map<PlanKey, std::vector<PlanEntry>> cache;
  const PlanKey key{n, k, used_mults, free_mults};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, build_plan(n, k, used_mults, free_mults)).first;
  }
  return it->second;
}

}  // namespace

std::vector<double> evaluate_kernel_unrolled(const Kernel& ker, const SymmetricTensor& t) {
  if (t.k() != ker.k)
    throw std::invalid_argument("evaluate_kernel_unrolled: tensor order mismatch");
  const int n = t.n();
  std::int64_t out_size = 1;
  for (int i = 0; i < ker.l; ++i) out_size *= n;
  std::vector<double> out(out_size, 0.0);

  for (const MapLabel& label : ker.labels) {
    const int tl = label.min_spiders;
    if (tl > n) continue;
    int max_free = 0;
    std::size_t max_tuple = 0;
    for (const Term& term : label.terms) {
      max_free = std::max(max_free, term.num_free);
      max_tuple = std::max(max_tuple, term.tuple.size());
    }
    std::vector<int> vals(tl + max_free + 1, -1);
    std::vector<int> inst_buf(max_tuple);
    std::vector<int> lhs_inst(label.lhs.size());
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self, int depth) -> void {
      if (depth == tl) {
        for (std::size_t i = 0; i < label.lhs.size(); ++i) lhs_inst[i] = vals[label.lhs[i]];
        double acc = 0.0;
        for (const Term& term : label.terms) {
          acc += static_cast<double>(term.coef) *
                 term_free_sum(term, tl, vals, inst_buf, t, 0);
        }
        out[unrolled_offset(lhs_inst, n)] += acc;
        return;
      }
      for (int v = 0; v < n; ++v) {
        if (used[v]) continue;
        used[v] = true;
        vals[depth] = v;
        self(self, depth + 1);
        used[v] = false;
      }
    };
    rec(rec, 0);
  }
  return out;
}

KernelEvaluator::KernelEvaluator(const Kernel& ker, int n) : kernel_(&ker), n_(n) {
  for (const MapLabel& label : ker.labels) {
    if (label.min_spiders > n) continue;

    // Only assignments whose lhs instantiation is already sorted write into
    // compressed storage; they exist exactly when no label recurs after an
    // intervening different label.
    LabelPlan lp;
    lp.label = &label;
    for (int id : label.lhs) {
      if (lp.chain.empty() || lp.chain.back() != id) lp.chain.push_back(id);
    }
    {
      std::set<int> seen(lp.chain.begin(), lp.chain.end());
      if (seen.size() != lp.chain.size()) continue;
    }

    for (const Term& term : label.terms) {
      TermPlan tp;
      tp.term = &term;
      lp.max_free = std::max(lp.max_free, term.num_free);
      lp.max_tuple = std::max(lp.max_tuple, term.tuple.size());
      if ((term.distinct && term.num_free > 0) || term.num_free == 0) {
        tp.pooled = false;
      } else {
        tp.pooled = true;
        std::vector<int> used_mults, free_mults;
        std::map<int, int> mult;
        for (int id : term.tuple) ++mult[id];
        for (const auto& [id, m] : mult) {
          if (id < label.min_spiders) {
            tp.used_ids.push_back(id);
            used_mults.push_back(m);
          } else {
            free_mults.push_back(m);
          }
        }
        std::sort(free_mults.begin(), free_mults.end(), std::greater<int>());
        tp.plan = &pooled_plan(n, ker.k, used_mults, free_mults);
        tp.table_size = 1;
        for (std::size_t i = 0; i < tp.used_ids.size(); ++i) tp.table_size *= n;
      }
      lp.terms.push_back(std::move(tp));
    }
    labels_.push_back(std::move(lp));
  }
}

SymmetricTensor KernelEvaluator::apply(const SymmetricTensor& t) const {
  if (t.k() != kernel_->k || t.n() != n_)
    throw std::invalid_argument("KernelEvaluator::apply: tensor shape mismatch");
  const int n = n_;
  SymmetricTensor out(n, kernel_->l);

  std::size_t max_vals = 1, max_tuple = 1, max_lhs = 1, max_chain = 1, max_tables = 1;
  for (const LabelPlan& lp : labels_) {
    max_vals = std::max(max_vals, static_cast<std::size_t>(lp.label->min_spiders + lp.max_free + 1));
    max_tuple = std::max(max_tuple, lp.max_tuple);
    max_lhs = std::max(max_lhs, lp.label->lhs.size());
    max_chain = std::max(max_chain, lp.chain.size());
    std::size_t tables = 0;
    for (const TermPlan& tp : lp.terms) {
      if (tp.pooled) tables += static_cast<std::size_t>(tp.table_size);
    }
    max_tables = std::max(max_tables, tables);
  }
  std::vector<double> tables(max_tables);
  std::vector<std::int64_t> table_offsets;
  std::vector<int> vals(max_vals, -1);
  std::vector<int> inst_buf(max_tuple);
  std::vector<int> lhs_inst(max_lhs);
  std::vector<int> chain_vals(max_chain);

  for (const LabelPlan& lp : labels_) {
    const MapLabel& label = *lp.label;
    const int tl = label.min_spiders;

    table_offsets.clear();
    std::int64_t used_tables = 0;
    for (const TermPlan& tp : lp.terms) {
      table_offsets.push_back(used_tables);
      if (!tp.pooled) continue;
      double* table = tables.data() + used_tables;
      std::fill(table, table + tp.table_size, 0.0);
      used_tables += tp.table_size;
      const double coef = static_cast<double>(tp.term->coef);
      const auto& plan = *static_cast<const std::vector<PlanEntry>*>(tp.plan);
      for (const PlanEntry& entry : plan) {
        table[entry.flat] += coef * static_cast<double>(entry.count) * t.value_at_rank(entry.rank);
      }
    }

    auto rec = [&](auto&& self, std::size_t depth, int min_val) -> void {
      if (depth == lp.chain.size()) {
        for (std::size_t i = 0; i < lp.chain.size(); ++i) vals[lp.chain[i]] = chain_vals[i];
        double acc = 0.0;
        for (std::size_t ti = 0; ti < lp.terms.size(); ++ti) {
          const TermPlan& tp = lp.terms[ti];
          if (tp.pooled) {
            std::int64_t flat = 0;
            for (int id : tp.used_ids) flat = flat * n + vals[id];
            acc += tables[table_offsets[ti] + flat];
          } else {
            acc += static_cast<double>(tp.term->coef) *
                   term_free_sum(*tp.term, tl, vals, inst_buf, t, 0);
          }
        }
        for (std::size_t i = 0; i < label.lhs.size(); ++i) lhs_inst[i] = vals[label.lhs[i]];
        std::span<const int> inst(lhs_inst.data(), label.lhs.size());
        out.at_sorted(inst) += acc;
        return;
      }
      for (int v = min_val; v < n; ++v) {
        chain_vals[depth] = v;
        self(self, depth + 1, v + 1);
      }
    };
    rec(rec, 0, 0);
  }
  return out;
}

SymmetricTensor evaluate_kernel(const Kernel& ker, const SymmetricTensor& t) {
  return KernelEvaluator(ker, t.n()).apply(t);
}

}  // namespace symtensor
