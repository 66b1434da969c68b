#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "handover/errors.hpp"
#include "handover/mln.hpp"

namespace handover::mln {

namespace {

struct LocalClause {
  double weight = 0.0;
  std::vector<std::pair<std::size_t, bool>> literals;  // (local atom, negated)
};

// Exact lexicographically-smallest argmax over one connected component.
class BranchAndBound {
 public:
  BranchAndBound(std::size_t n_atoms, std::vector<LocalClause> clauses, double tol)
      : n_(n_atoms), clauses_(std::move(clauses)), tol_(tol), incidence_(n_atoms),
        true_count_(clauses_.size(), 0), remaining_(clauses_.size(), 0), assign_(n_atoms, 0) {
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      for (const auto& [atom, neg] : clauses_[c].literals) incidence_[atom].push_back({c, neg});
      remaining_[c] = clauses_[c].literals.size();
    }
  }

  std::vector<std::uint8_t> solve() {
    best_ = greedy();
    best_score_ = score_of(best_);
    score_ = 0.0;
    optimistic_ = 0.0;
    for (const auto& c : clauses_) optimistic_ += std::max(c.weight, 0.0);
    search(0);
    return best_;
  }

 private:
  struct Incidence {
    std::size_t clause;
    bool negated;
  };

  double score_of(const std::vector<std::uint8_t>& x) const {
    double s = 0.0;
    for (const auto& c : clauses_) {
      for (const auto& [atom, neg] : c.literals) {
        if ((x[atom] != 0) != neg) {
          s += c.weight;
          break;
        }
      }
    }
    return s;
  }

  std::vector<std::uint8_t> greedy() const {
    std::vector<std::uint8_t> x(n_, 0);
    double cur = score_of(x);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t i = 0; i < n_; ++i) {
        x[i] ^= 1;
        const double s = score_of(x);
        if (s > cur + tol_) {
          cur = s;
          improved = true;
        } else {
          x[i] ^= 1;
        }
      }
    }
    return x;
  }

  void assign(std::size_t atom, std::uint8_t v) {
    assign_[atom] = v;
    for (const auto& inc : incidence_[atom]) {
      const double gain = std::max(clauses_[inc.clause].weight, 0.0);
      if ((v != 0) != inc.negated && true_count_[inc.clause]++ == 0) {
        score_ += clauses_[inc.clause].weight;
        optimistic_ -= gain;
      }
      if (--remaining_[inc.clause] == 0 && true_count_[inc.clause] == 0) optimistic_ -= gain;
    }
  }

  void unassign(std::size_t atom) {
    const std::uint8_t v = assign_[atom];
    for (auto it = incidence_[atom].rbegin(); it != incidence_[atom].rend(); ++it) {
      const double gain = std::max(clauses_[it->clause].weight, 0.0);
      if (remaining_[it->clause]++ == 0 && true_count_[it->clause] == 0) optimistic_ += gain;
      if ((v != 0) != it->negated && --true_count_[it->clause] == 0) {
        score_ -= clauses_[it->clause].weight;
        optimistic_ += gain;
      }
    }
  }

  // -1, 0, 1 comparing assign_[0..depth) with the incumbent prefix.
  int compare_prefix(std::size_t depth) const {
    for (std::size_t i = 0; i < depth; ++i) {
      if (assign_[i] != best_[i]) return assign_[i] < best_[i] ? -1 : 1;
    }
    return 0;
  }

  void search(std::size_t depth) {
    if (depth == n_) {
      if (score_ > best_score_ + tol_ ||
          (score_ >= best_score_ - tol_ && compare_prefix(n_) < 0)) {
        best_ = assign_;
        best_score_ = score_;
      }
      return;
    }
    for (std::uint8_t v = 0; v <= 1; ++v) {
      assign(depth, v);
      const double bound = score_ + optimistic_;
      bool prune = bound < best_score_ - tol_;
      if (!prune && bound <= best_score_ + tol_) prune = compare_prefix(depth + 1) > 0;
      if (!prune) search(depth + 1);
      unassign(depth);
    }
  }

  std::size_t n_;
  std::vector<LocalClause> clauses_;
  double tol_;
  std::vector<std::vector<Incidence>> incidence_;
  std::vector<std::size_t> true_count_;
  std::vector<std::size_t> remaining_;
  std::vector<std::uint8_t> assign_;
  std::vector<std::uint8_t> best_;
  double best_score_ = 0.0;
  double score_ = 0.0;
  double optimistic_ = 0.0;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

MapResult map_infer(const GroundModel& gm, const Evidence& evidence, const MapOptions& opts) {
  const std::size_t n = gm.atoms.size();
  if (evidence.size() != n) throw std::invalid_argument("evidence size does not match atom count");
  World world(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    if (evidence[a] == Truth::Unknown) {
      if (!gm.query_atom[a]) {
        throw std::invalid_argument("non-query atom " + gm.atoms.name(a) + " has no evidence");
      }
    } else {
      world[a] = evidence[a] == Truth::True ? 1 : 0;
    }
  }

  // Reduce clauses by evidence; only clauses with unknown atoms and no true fixed literal remain.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < gm.clauses.size(); ++c) {
    const auto& lits = gm.clauses[c].literals;
    const bool decided = std::any_of(lits.begin(), lits.end(), [&](const GroundLiteral& l) {
      return evidence[l.atom] != Truth::Unknown && (evidence[l.atom] == Truth::True) != l.negated;
    });
    if (decided) continue;
    std::size_t first_free = SIZE_MAX;
    for (const auto& l : lits) {
      if (evidence[l.atom] != Truth::Unknown) continue;
      if (first_free == SIZE_MAX) {
        first_free = l.atom;
      } else {
        parent[find_root(parent, l.atom)] = find_root(parent, first_free);
      }
    }
    if (first_free != SIZE_MAX) active.push_back(c);
  }

  std::map<std::size_t, std::vector<std::size_t>> components;  // root -> atoms (ascending)
  std::vector<bool> touched(n, false);
  for (std::size_t c : active) {
    for (const auto& l : gm.clauses[c].literals) {
      if (evidence[l.atom] == Truth::Unknown) touched[l.atom] = true;
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (touched[a]) components[find_root(parent, a)].push_back(a);
  }
  for (const auto& [root, atoms] : components) {
    if (atoms.size() > opts.max_free_atoms) {
      throw TooLarge(std::to_string(atoms.size()) + " interacting free atoms exceed the MAP cap of " +
                     std::to_string(opts.max_free_atoms));
    }
  }

  std::map<std::size_t, std::vector<LocalClause>> comp_clauses;
  std::vector<std::size_t> local(n, SIZE_MAX);
  for (const auto& [root, atoms] : components) {
    for (std::size_t i = 0; i < atoms.size(); ++i) local[atoms[i]] = i;
  }
  for (std::size_t c : active) {
    LocalClause lc;
    lc.weight = gm.weights[gm.clauses[c].formula];
    std::size_t root = SIZE_MAX;
    for (const auto& l : gm.clauses[c].literals) {
      if (evidence[l.atom] != Truth::Unknown) continue;
      lc.literals.push_back({local[l.atom], l.negated});
      root = find_root(parent, l.atom);
    }
    comp_clauses[root].push_back(std::move(lc));
  }

  for (auto& [root, atoms] : components) {
    BranchAndBound bb(atoms.size(), std::move(comp_clauses[root]), opts.tolerance);
    const auto x = bb.solve();
    for (std::size_t i = 0; i < atoms.size(); ++i) world[atoms[i]] = x[i];
  }

  MapResult res;
  res.score = world_score(gm, gm.weights, world);
  res.world = std::move(world);
  return res;
}

}  // namespace handover::mln
