#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "handover/errors.hpp"
#include "handover/mln.hpp"

namespace handover::mln {

namespace {

std::string atom_name(const std::string& pred, const std::vector<std::string>& args) {
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    const bool bare = !args[i].empty() &&
                      std::all_of(args[i].begin(), args[i].end(), [](unsigned char c) {
                        return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':';
                      });
    s += bare ? args[i] : "\"" + args[i] + "\"";
  }
  return s + ")";
}

}  // namespace

// --- model ---------------------------------------------------------------

const Predicate* MlnModel::find_predicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<double> MlnModel::weights() const {
  std::vector<double> w;
  w.reserve(formulas.size());
  for (const auto& f : formulas) w.push_back(f.weight);
  return w;
}

void MlnModel::set_weights(const std::vector<double>& weights) {
  if (weights.size() != formulas.size()) {
    throw std::invalid_argument("weight vector size does not match formula count");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) formulas[i].weight = weights[i];
}

void MlnModel::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    const auto& p = predicates[i];
    const std::string path = "predicates[" + std::to_string(i) + "]";
    if (p.name.empty()) throw ValidationError(path + ".name", "empty predicate name");
    if (!names.insert(p.name).second) throw ValidationError(path + ".name", "duplicate predicate '" + p.name + "'");
    if (p.arg_domains.empty()) throw ValidationError(path + ".args", "arity must be >= 1");
    for (const auto& d : p.arg_domains) {
      if (!domains.count(d)) throw DomainMissing("predicate '" + p.name + "' uses undeclared domain '" + d + "'");
    }
  }
  for (const auto& q : query_predicates) {
    if (!find_predicate(q)) throw ValidationError("query_predicates", "unknown predicate '" + q + "'");
  }
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const std::string path = "formulas[" + std::to_string(i) + "]";
    const auto& f = formulas[i];
    if (f.literals.empty()) throw ValidationError(path + ".clause", "empty clause");
    if (!std::isfinite(f.weight)) throw ValidationError(path + ".weight", "weight must be finite");
    std::map<std::string, std::string> var_domain;
    for (const auto& lit : f.literals) {
      const Predicate* p = find_predicate(lit.predicate);
      if (!p) throw ValidationError(path + ".clause", "unknown predicate '" + lit.predicate + "'");
      if (p->arg_domains.size() != lit.args.size()) {
        throw ValidationError(path + ".clause", "arity mismatch for '" + lit.predicate + "'");
      }
      for (std::size_t a = 0; a < lit.args.size(); ++a) {
        const auto& dom = p->arg_domains[a];
        const auto& term = lit.args[a];
        if (term.is_variable) {
          auto [it, inserted] = var_domain.emplace(term.name, dom);
          if (!inserted && it->second != dom) {
            throw ValidationError(path + ".clause", "variable " + term.name +
                                                        " used with domains '" + it->second +
                                                        "' and '" + dom + "'");
          }
        } else {
          const auto& consts = domains.at(dom);
          if (std::find(consts.begin(), consts.end(), term.name) == consts.end()) {
            throw ValidationError(path + ".clause",
                                  "constant '" + term.name + "' is not in domain '" + dom + "'");
          }
        }
      }
    }
  }
}

// --- atoms ---------------------------------------------------------------

AtomTable::AtomTable(const MlnModel& model) {
  for (const auto& p : model.predicates) {
    offsets_.push_back(names_.size());
    predicate_names_.push_back(p.name);
    std::vector<std::size_t> radix;
    std::vector<const std::vector<std::string>*> consts;
    std::size_t count = 1;
    for (const auto& d : p.arg_domains) {
      auto it = model.domains.find(d);
      if (it == model.domains.end()) throw DomainMissing("undeclared domain '" + d + "'");
      consts.push_back(&it->second);
      radix.push_back(it->second.size());
      count *= it->second.size();
    }
    radix_.push_back(radix);
    constant_index_.emplace_back();
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<std::string> args(radix.size());
      std::size_t rest = k;
      for (std::size_t a = radix.size(); a-- > 0;) {
        args[a] = (*consts[a])[rest % radix[a]];
        rest /= radix[a];
      }
      const std::size_t idx = names_.size();
      names_.push_back(atom_name(p.name, args));
      by_name_.emplace(names_.back(), idx);
      predicate_of_.push_back(offsets_.size() - 1);
      args_.push_back(std::move(args));
    }
  }
  offsets_.push_back(names_.size());
  // Per-predicate lookup of constant positions, keyed "arg#constant".
  for (std::size_t p = 0; p < model.predicates.size(); ++p) {
    auto& ci = constant_index_[p];
    const auto& doms = model.predicates[p].arg_domains;
    for (std::size_t a = 0; a < doms.size(); ++a) {
      const auto& consts = model.domains.at(doms[a]);
      for (std::size_t c = 0; c < consts.size(); ++c) {
        ci.emplace(std::to_string(a) + "#" + consts[c], c);
      }
    }
  }
}

std::size_t AtomTable::index(std::size_t predicate, const std::vector<std::size_t>& constants) const {
  const auto& radix = radix_.at(predicate);
  std::size_t k = 0;
  for (std::size_t a = 0; a < radix.size(); ++a) k = k * radix[a] + constants[a];
  return offsets_[predicate] + k;
}

std::optional<std::size_t> AtomTable::find(std::string_view predicate,
                                           const std::vector<std::string>& constants) const {
  for (std::size_t p = 0; p < predicate_names_.size(); ++p) {
    if (predicate_names_[p] != predicate) continue;
    if (constants.size() != radix_[p].size()) return std::nullopt;
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < constants.size(); ++a) {
      auto it = constant_index_[p].find(std::to_string(a) + "#" + constants[a]);
      if (it == constant_index_[p].end()) return std::nullopt;
      idx.push_back(it->second);
    }
    return index(p, idx);
  }
  return std::nullopt;
}

std::optional<std::size_t> AtomTable::find(std::string_view atom_text) const {
  auto it = by_name_.find(atom_text);
  if (it != by_name_.end()) return it->second;
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> AtomTable::range(std::size_t predicate) const {
  return {offsets_.at(predicate), offsets_.at(predicate + 1)};
}

// --- grounding -----------------------------------------------------------

bool GroundClause::satisfied(const World& world) const {
  for (const auto& l : literals) {
    if ((world[l.atom] != 0) != l.negated) return true;
  }
  return false;
}

GroundModel ground(const MlnModel& model) {
  model.validate();
  GroundModel gm;
  gm.atoms = AtomTable(model);
  gm.weights = model.weights();
  for (const auto& f : model.formulas) gm.fixed.push_back(f.fixed);

  std::map<std::string, std::size_t> pred_index;
  for (std::size_t p = 0; p < model.predicates.size(); ++p) pred_index[model.predicates[p].name] = p;

  for (std::size_t fi = 0; fi < model.formulas.size(); ++fi) {
    const auto& f = model.formulas[fi];
    // Variables in first-appearance order with their domains.
    std::vector<std::string> vars;
    std::vector<const std::vector<std::string>*> var_consts;
    for (const auto& lit : f.literals) {
      const auto& doms = model.predicates[pred_index.at(lit.predicate)].arg_domains;
      for (std::size_t a = 0; a < lit.args.size(); ++a) {
        if (!lit.args[a].is_variable) continue;
        if (std::find(vars.begin(), vars.end(), lit.args[a].name) != vars.end()) continue;
        vars.push_back(lit.args[a].name);
        var_consts.push_back(&model.domains.at(doms[a]));
      }
    }

    // Pre-resolve constant argument positions.
    struct Slot { bool var; std::size_t value; };
    std::vector<std::vector<Slot>> slots;
    for (const auto& lit : f.literals) {
      const auto& doms = model.predicates[pred_index.at(lit.predicate)].arg_domains;
      std::vector<Slot> s;
      for (std::size_t a = 0; a < lit.args.size(); ++a) {
        if (lit.args[a].is_variable) {
          s.push_back({true, static_cast<std::size_t>(
                                 std::find(vars.begin(), vars.end(), lit.args[a].name) - vars.begin())});
        } else {
          const auto& consts = model.domains.at(doms[a]);
          s.push_back({false, static_cast<std::size_t>(
                                  std::find(consts.begin(), consts.end(), lit.args[a].name) - consts.begin())});
        }
      }
      slots.push_back(std::move(s));
    }

    std::size_t total = 1;
    for (auto* c : var_consts) total *= c->size();
    std::set<std::vector<GroundLiteral>> seen;
    std::vector<std::size_t> assign(vars.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rest = k;
      for (std::size_t v = vars.size(); v-- > 0;) {
        assign[v] = rest % var_consts[v]->size();
        rest /= var_consts[v]->size();
      }
      GroundClause gc;
      gc.formula = fi;
      for (std::size_t li = 0; li < f.literals.size(); ++li) {
        std::vector<std::size_t> cidx;
        for (const auto& s : slots[li]) cidx.push_back(s.var ? assign[s.value] : s.value);
        gc.literals.push_back(
            {gm.atoms.index(pred_index.at(f.literals[li].predicate), cidx), f.literals[li].negated});
      }
      std::sort(gc.literals.begin(), gc.literals.end());
      gc.literals.erase(std::unique(gc.literals.begin(), gc.literals.end()), gc.literals.end());
      if (!seen.insert(gc.literals).second) continue;
      gm.clauses.push_back(std::move(gc));
    }
  }

  gm.clauses_of_atom.assign(gm.atoms.size(), {});
  for (std::size_t c = 0; c < gm.clauses.size(); ++c) {
    std::size_t prev = SIZE_MAX;
    for (const auto& l : gm.clauses[c].literals) {
      if (l.atom != prev) gm.clauses_of_atom[l.atom].push_back(c);
      prev = l.atom;
    }
  }
  gm.query_atom.assign(gm.atoms.size(), false);
  for (const auto& q : model.query_predicates) {
    const auto [b, e] = gm.atoms.range(pred_index.at(q));
    for (std::size_t a = b; a < e; ++a) gm.query_atom[a] = true;
  }
  return gm;
}

// --- counting and probability -------------------------------------------

std::vector<double> count_satisfied(const GroundModel& gm, const World& world) {
  if (world.size() != gm.atoms.size()) throw std::invalid_argument("world size does not match atom count");
  std::vector<double> n(gm.formula_count(), 0.0);
  for (const auto& c : gm.clauses) {
    if (c.satisfied(world)) n[c.formula] += 1.0;
  }
  return n;
}

double world_score(const GroundModel& gm, const std::vector<double>& weights, const World& world) {
  const auto n = count_satisfied(gm, world);
  double s = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) s += weights[i] * n[i];
  return s;
}

double log_partition(const GroundModel& gm, const std::vector<double>& weights, std::size_t max_atoms) {
  const std::size_t n = gm.atoms.size();
  if (n > max_atoms || n > 30) {
    throw TooLarge(std::to_string(n) + " ground atoms exceed the exact-enumeration cap of " +
                   std::to_string(std::min<std::size_t>(max_atoms, 30)));
  }
  struct Mask { std::uint32_t pos = 0, neg = 0; double w = 0.0; };
  std::vector<Mask> masks;
  for (const auto& c : gm.clauses) {
    Mask m;
    m.w = weights[c.formula];
    for (const auto& l : c.literals) (l.negated ? m.neg : m.pos) |= 1u << l.atom;
    masks.push_back(m);
  }
  // Streaming log-sum-exp.
  double max_score = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  const std::uint64_t worlds = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < worlds; ++x) {
    const auto bits = static_cast<std::uint32_t>(x);
    double s = 0.0;
    for (const auto& m : masks) {
      if ((bits & m.pos) || (~bits & m.neg)) s += m.w;
    }
    if (s > max_score) {
      acc = acc * std::exp(max_score - s) + 1.0;
      max_score = s;
    } else {
      acc += std::exp(s - max_score);
    }
  }
  return max_score + std::log(acc);
}

double world_log_probability(const GroundModel& gm, const std::vector<double>& weights,
                             const World& world, std::size_t max_atoms) {
  return world_score(gm, weights, world) - log_partition(gm, weights, max_atoms);
}

Evidence empty_evidence(const GroundModel& gm) { return Evidence(gm.atoms.size(), Truth::Unknown); }

}  // namespace handover::mln
