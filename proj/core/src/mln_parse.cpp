#include <algorithm>
#include <cctype>
#include <sstream>

#include "handover/errors.hpp"
#include "handover/mln.hpp"
#include "json_io.hpp"

namespace handover::mln {

namespace {

bool bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::string name() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && bare_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }
  Term term() {
    skip_ws();
    if (accept("?")) return {true, "?" + name()};
    if (pos_ < text_.size() && text_[pos_] == '"') {
      const std::size_t close = text_.find('"', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated quoted constant");
      Term t{false, std::string(text_.substr(pos_ + 1, close - pos_ - 1))};
      pos_ = close + 1;
      return t;
    }
    return {false, name()};
  }
  Literal literal() {
    Literal lit;
    lit.negated = accept("!");
    lit.predicate = name();
    expect("(");
    do {
      lit.args.push_back(term());
    } while (accept(","));
    expect(")");
    return lit;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("clause '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + msg);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string term_text(const Term& t) {
  if (t.is_variable) return t.name;
  const bool bare = !t.name.empty() && std::all_of(t.name.begin(), t.name.end(), bare_char);
  return bare ? t.name : "\"" + t.name + "\"";
}

}  // namespace

std::vector<Literal> parse_clause(std::string_view text) {
  Cursor cur(text);
  std::vector<Literal> first;
  first.push_back(cur.literal());
  bool conj = false;
  while (true) {
    if (cur.accept("^")) {
      conj = true;
      first.push_back(cur.literal());
    } else if (!conj && cur.accept("|")) {
      first.push_back(cur.literal());
    } else {
      break;
    }
  }
  if (cur.accept("=>")) {
    if (!conj && first.size() > 1) cur.fail("implication body must be a conjunction");
    std::vector<Literal> out;
    for (auto lit : first) {
      lit.negated = !lit.negated;
      out.push_back(std::move(lit));
    }
    do {
      out.push_back(cur.literal());
    } while (cur.accept("|"));
    if (!cur.done()) cur.fail("trailing input");
    return out;
  }
  if (conj) cur.fail("conjunction without '=>'");
  if (!cur.done()) cur.fail("trailing input");
  return first;
}

std::string format_clause(const std::vector<Literal>& literals) {
  std::string out;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (i) out += " | ";
    const auto& l = literals[i];
    if (l.negated) out += "!";
    out += l.predicate + "(";
    for (std::size_t a = 0; a < l.args.size(); ++a) {
      if (a) out += ",";
      out += term_text(l.args[a]);
    }
    out += ")";
  }
  return out;
}

MlnModel parse_model(std::string_view json_text) {
  const auto doc = detail::parse_json_or_throw(std::string(json_text), "mln model");
  MlnModel m;
  try {
    for (const auto& [name, consts] : doc.at("domains").items()) {
      m.domains[name] = consts.get<std::vector<std::string>>();
    }
    for (const auto& p : doc.at("predicates")) {
      m.predicates.push_back({p.at("name").get<std::string>(), p.at("args").get<std::vector<std::string>>()});
    }
    for (const auto& f : doc.at("formulas")) {
      m.formulas.push_back({parse_clause(f.at("clause").get<std::string>()), f.value("weight", 0.0),
                            f.value("fixed", false)});
    }
    if (doc.contains("query_predicates")) {
      m.query_predicates = doc.at("query_predicates").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mln model: ") + e.what());
  }
  m.validate();
  return m;
}

MlnModel load_model(const std::filesystem::path& path) {
  return parse_model(detail::read_text_file(path.string()));
}

std::string model_to_json(const MlnModel& model) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  nlohmann::ordered_json domains = nlohmann::ordered_json::object();
  for (const auto& [name, consts] : model.domains) domains[name] = consts;
  doc["domains"] = domains;
  doc["predicates"] = nlohmann::ordered_json::array();
  for (const auto& p : model.predicates) {
    doc["predicates"].push_back({{"name", p.name}, {"args", p.arg_domains}});
  }
  doc["formulas"] = nlohmann::ordered_json::array();
  for (const auto& f : model.formulas) {
    nlohmann::ordered_json jf{{"clause", format_clause(f.literals)}, {"weight", f.weight}};
    if (f.fixed) jf["fixed"] = true;
    doc["formulas"].push_back(jf);
  }
  doc["query_predicates"] = model.query_predicates;
  return doc.dump(2) + "\n";
}

std::vector<World> parse_worlds(std::string_view text, const AtomTable& atoms) {
  std::vector<World> worlds;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    Cursor cur(line);
    if (cur.done()) continue;
    World w(atoms.size(), 0);
    if (cur.accept("()")) {
      if (!cur.done()) throw ParseError("worlds line " + std::to_string(line_no) + ": trailing input");
      worlds.push_back(std::move(w));
      continue;
    }
    while (!cur.done()) {
      Literal lit;
      try {
        lit = cur.literal();
      } catch (const ParseError& e) {
        throw ParseError("worlds line " + std::to_string(line_no) + ": " + e.what());
      }
      if (lit.negated) throw ParseError("worlds line " + std::to_string(line_no) + ": negated atom");
      std::vector<std::string> consts;
      for (const auto& t : lit.args) {
        if (t.is_variable) throw ParseError("worlds line " + std::to_string(line_no) + ": variable in atom");
        consts.push_back(t.name);
      }
      const auto idx = atoms.find(lit.predicate, consts);
      if (!idx) {
        throw ParseError("worlds line " + std::to_string(line_no) + ": unknown atom " +
                         format_clause({lit}));
      }
      w[*idx] = 1;
    }
    worlds.push_back(std::move(w));
  }
  return worlds;
}

std::vector<World> load_worlds(const std::filesystem::path& path, const AtomTable& atoms) {
  return parse_worlds(detail::read_text_file(path.string()), atoms);
}

std::string worlds_to_text(const std::vector<World>& worlds, const AtomTable& atoms) {
  std::string out;
  for (const auto& w : worlds) {
    bool first = true;
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (!w[a]) continue;
      if (!first) out += " ";
      out += atoms.name(a);
      first = false;
    }
    out += first ? "()\n" : "\n";
  }
  return out;
}

}  // namespace handover::mln
