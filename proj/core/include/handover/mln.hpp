#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace handover::mln {

struct Predicate {
  std::string name;
  std::vector<std::string> arg_domains;
};

struct Term {
  bool is_variable = false;
  std::string name;  // variable names keep their leading '?'
};

struct Literal {
  bool negated = false;
  std::string predicate;
  std::vector<Term> args;
};

/// A weighted clause (disjunction of literals).
struct Formula {
  std::vector<Literal> literals;
  double weight = 0.0;
  bool fixed = false;  // weight is not learned
};

struct MlnModel {
  std::map<std::string, std::vector<std::string>> domains;
  std::vector<Predicate> predicates;
  std::vector<Formula> formulas;
  std::vector<std::string> query_predicates;

  /// Checks predicate/domain/query references and variable typing.
  /// Throws DomainMissing for undeclared domains, ValidationError otherwise.
  void validate() const;

  const Predicate* find_predicate(std::string_view name) const;
  std::vector<double> weights() const;
  void set_weights(const std::vector<double>& weights);
};

/// Clause grammar:
///   clause  := body "=>" head | head
///   body    := literal ("^" literal)*
///   head    := literal ("|" literal)*
///   literal := ["!"] name "(" term ("," term)* ")"
///   term    := "?"name | constant | '"' quoted constant '"'
/// Implications are compiled to clausal form: !b1 | !b2 | ... | h1 | h2.
/// Throws ParseError.
std::vector<Literal> parse_clause(std::string_view text);
std::string format_clause(const std::vector<Literal>& literals);

/// World: one truth value (0/1) per ground atom.
using World = std::vector<std::uint8_t>;

/// Dense index of ground atoms: predicates in declaration order, arguments in
/// mixed radix over domain constant order.
class AtomTable {
 public:
  AtomTable() = default;
  explicit AtomTable(const MlnModel& model);

  std::size_t size() const { return names_.size(); }
  std::size_t index(std::size_t predicate, const std::vector<std::size_t>& constants) const;
  /// nullopt when the atom is not part of the model.
  std::optional<std::size_t> find(std::string_view predicate,
                                  const std::vector<std::string>& constants) const;
  std::optional<std::size_t> find(std::string_view atom_text) const;
  const std::string& name(std::size_t atom) const { return names_[atom]; }
  std::size_t predicate_of(std::size_t atom) const { return predicate_of_[atom]; }
  /// Constants of the atom, in argument order.
  const std::vector<std::string>& arguments(std::size_t atom) const { return args_[atom]; }
  /// [begin, end) atom range of a predicate.
  std::pair<std::size_t, std::size_t> range(std::size_t predicate) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<std::size_t>> radix_;
  std::vector<std::string> names_;
  std::vector<std::size_t> predicate_of_;
  std::vector<std::vector<std::string>> args_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::vector<std::string> predicate_names_;
  std::vector<std::map<std::string, std::size_t, std::less<>>> constant_index_;
};

struct GroundLiteral {
  std::size_t atom = 0;
  bool negated = false;

  auto operator<=>(const GroundLiteral&) const = default;
};

struct GroundClause {
  std::size_t formula = 0;
  std::vector<GroundLiteral> literals;  // sorted, duplicates removed

  bool satisfied(const World& world) const;
};

/// A grounded model. weights are copied from the formulas at grounding time.
struct GroundModel {
  AtomTable atoms;
  std::vector<GroundClause> clauses;
  std::vector<double> weights;
  std::vector<bool> fixed;  // per formula
  std::vector<std::vector<std::size_t>> clauses_of_atom;
  std::vector<bool> query_atom;

  std::size_t formula_count() const { return weights.size(); }
};

/// Every substitution of every formula; identical ground clauses within a formula
/// are kept once. Throws DomainMissing.
GroundModel ground(const MlnModel& model);

/// n_i(x): satisfied groundings per formula.
std::vector<double> count_satisfied(const GroundModel& gm, const World& world);

/// sum_i w_i n_i(x)
double world_score(const GroundModel& gm, const std::vector<double>& weights, const World& world);

inline constexpr std::size_t kPartitionAtomCap = 24;

/// log Z by exhaustive enumeration. Throws TooLarge above the cap.
double log_partition(const GroundModel& gm, const std::vector<double>& weights,
                     std::size_t max_atoms = kPartitionAtomCap);
double world_log_probability(const GroundModel& gm, const std::vector<double>& weights,
                             const World& world, std::size_t max_atoms = kPartitionAtomCap);

/// Sum over worlds and atoms of log P(x_a | Markov blanket). When grad is non-null
/// it receives d/dw_i. Identical worlds are evaluated once and weighted.
/// query_atoms_only restricts the atom sum to atoms of query predicates.
double pseudo_log_likelihood(const GroundModel& gm, const std::vector<double>& weights,
                             const std::vector<World>& data,
                             std::vector<double>* grad = nullptr,
                             bool query_atoms_only = false);

struct LearnOptions {
  double learning_rate = 1.0;  // step = learning_rate * gradient / |data|
  double l2_prior_sigma = 2.0;
  int max_iters = 300;
  double tol = 1e-4;           // on the per-world gradient norm
  bool query_atoms_only = false;  // see pseudo_log_likelihood
};

struct LearnResult {
  std::vector<double> weights;
  double objective = 0.0;                  // penalised PLL at weights
  std::vector<double> accepted_objectives;  // one entry per accepted step, starting point first
  int iterations = 0;
  bool converged = false;
};

/// Gradient ascent on PLL - sum w^2 / (2 sigma^2) starting from gm.weights. Steps
/// that decrease the objective are halved and retried; accepted steps grow the rate.
/// Fixed formulas keep their weights.
LearnResult learn_weights(const GroundModel& gm, const std::vector<World>& data,
                          const LearnOptions& opts = {});

enum class Truth : std::uint8_t { False, True, Unknown };
using Evidence = std::vector<Truth>;

struct MapOptions {
  std::size_t max_free_atoms = 30;  // per independent sub-problem
  double tolerance = 1e-9;
};

struct MapResult {
  World world;
  double score = 0.0;
};

/// Exact MAP completion of the Unknown atoms (which must all be query atoms).
/// Clauses decided by evidence are dropped, the remaining atoms are split into
/// independent components, and each component is solved by branch and bound in
/// atom order, false before true. Among equal scores the lexicographically
/// smallest completion wins. Throws TooLarge when a component exceeds the cap.
MapResult map_infer(const GroundModel& gm, const Evidence& evidence, const MapOptions& opts = {});

/// Evidence with every atom Unknown.
Evidence empty_evidence(const GroundModel& gm);

/// JSON model file: {schema_version, domains, predicates:[{name,args}],
/// formulas:[{clause,weight,fixed?}], query_predicates}.
MlnModel parse_model(std::string_view json_text);
MlnModel load_model(const std::filesystem::path& path);
std::string model_to_json(const MlnModel& model);

/// One world per line: whitespace-separated true ground atoms, '#' comments.
/// Atoms absent from a line are false; "()" stands for the all-false world.
std::vector<World> parse_worlds(std::string_view text, const AtomTable& atoms);
std::vector<World> load_worlds(const std::filesystem::path& path, const AtomTable& atoms);
std::string worlds_to_text(const std::vector<World>& worlds, const AtomTable& atoms);

}  // namespace handover::mln
