#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "handover/mln.hpp"

namespace handover::mln {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Grouped {
  std::vector<const World*> worlds;
  std::vector<double> multiplicity;
};

Grouped group_worlds(const std::vector<World>& data) {
  Grouped g;
  std::map<World, std::size_t> seen;
  for (const auto& w : data) {
    auto [it, inserted] = seen.emplace(w, g.worlds.size());
    if (inserted) {
      g.worlds.push_back(&w);
      g.multiplicity.push_back(1.0);
    } else {
      g.multiplicity[it->second] += 1.0;
    }
  }
  return g;
}

// For atom a and clause c: satisfied(a=1) - satisfied(a=0), given the rest of the world.
int flip_delta(const GroundClause& c, std::size_t a, const World& w) {
  bool other = false, pos = false, neg = false;
  for (const auto& l : c.literals) {
    if (l.atom == a) {
      (l.negated ? neg : pos) = true;
    } else if ((w[l.atom] != 0) != l.negated) {
      other = true;
      break;
    }
  }
  if (other) return 0;
  return static_cast<int>(pos) - static_cast<int>(neg);
}

double penalised(double pll, const std::vector<double>& w, const std::vector<bool>& fixed, double sigma) {
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i >= fixed.size() || !fixed[i]) r += w[i] * w[i];
  }
  return pll - r / (2.0 * sigma * sigma);
}

}  // namespace

double pseudo_log_likelihood(const GroundModel& gm, const std::vector<double>& weights,
                             const std::vector<World>& data, std::vector<double>* grad,
                             bool query_atoms_only) {
  if (weights.size() != gm.formula_count()) throw std::invalid_argument("weight count mismatch");
  if (grad) grad->assign(weights.size(), 0.0);
  const auto groups = group_worlds(data);
  const std::size_t n_atoms = gm.atoms.size();

  double total = 0.0;
  std::vector<double> local_grad(weights.size(), 0.0);
  std::vector<int> counts(weights.size(), 0);
  for (std::size_t gi = 0; gi < groups.worlds.size(); ++gi) {
    const World& w = *groups.worlds[gi];
    if (w.size() != n_atoms) throw std::invalid_argument("world size does not match atom count");
    double world_pll = 0.0;
    std::fill(local_grad.begin(), local_grad.end(), 0.0);
    for (std::size_t a = 0; a < n_atoms; ++a) {
      if (query_atoms_only && !gm.query_atom[a]) continue;
      double delta = 0.0;
      const auto& incident = gm.clauses_of_atom[a];
      for (std::size_t c : incident) {
        const int d = flip_delta(gm.clauses[c], a, w);
        counts[gm.clauses[c].formula] += d;
        delta += weights[gm.clauses[c].formula] * d;
      }
      const double x = w[a] ? 1.0 : 0.0;
      world_pll += x * delta - softplus(delta);
      const double resid = x - sigmoid(delta);
      for (std::size_t c : incident) {
        const std::size_t f = gm.clauses[c].formula;
        if (counts[f] != 0) {
          local_grad[f] += resid * counts[f];
          counts[f] = 0;
        }
      }
    }
    total += groups.multiplicity[gi] * world_pll;
    if (grad) {
      for (std::size_t f = 0; f < weights.size(); ++f) (*grad)[f] += groups.multiplicity[gi] * local_grad[f];
    }
  }
  return total;
}

LearnResult learn_weights(const GroundModel& gm, const std::vector<World>& data,
                          const LearnOptions& opts) {
  if (!(opts.l2_prior_sigma > 0.0)) throw std::invalid_argument("l2_prior_sigma must be positive");
  if (!(opts.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (data.empty()) throw std::invalid_argument("learn_weights needs at least one world");

  LearnResult res;
  res.weights = gm.weights;
  if (res.weights.empty()) return res;

  const double sigma2 = opts.l2_prior_sigma * opts.l2_prior_sigma;
  const double n = static_cast<double>(data.size());
  auto fixed = [&](std::size_t i) { return i < gm.fixed.size() && gm.fixed[i]; };
  auto evaluate = [&](const std::vector<double>& w, std::vector<double>& g) {
    const double pll = pseudo_log_likelihood(gm, w, data, &g, opts.query_atoms_only);
    for (std::size_t i = 0; i < w.size(); ++i) {
      g[i] = fixed(i) ? 0.0 : g[i] - w[i] / sigma2;
    }
    return penalised(pll, w, gm.fixed, opts.l2_prior_sigma);
  };

  std::vector<double> grad(res.weights.size());
  res.objective = evaluate(res.weights, grad);
  res.accepted_objectives.push_back(res.objective);
  double lr = opts.learning_rate;
  std::vector<double> trial(res.weights.size()), trial_grad(res.weights.size());

  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    if (std::sqrt(norm) / n < opts.tol) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = res.weights[i] + lr * grad[i] / n;
    const double obj = evaluate(trial, trial_grad);
    if (obj >= res.objective) {
      res.weights.swap(trial);
      grad.swap(trial_grad);
      res.objective = obj;
      res.accepted_objectives.push_back(obj);
      lr *= 1.2;
    } else {
      lr *= 0.5;
      if (lr < 1e-12) break;
    }
  }
  return res;
}

}  // namespace handover::mln
