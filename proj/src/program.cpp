#include "lpcount/program.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lpc {

namespace {

void sort_unique(std::vector<AtomId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

class Lexer {
 public:
  enum class Kind { Ident, Not, If, Comma, Dot, End };
  struct Token {
    Kind kind;
    std::string_view text;
    std::size_t line;
    std::size_t column;
  };

  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    Token t{Kind::End, {}, line_, column_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (c == ',') {
      advance(1);
      t.kind = Kind::Comma;
    } else if (c == '.') {
      advance(1);
      t.kind = Kind::Dot;
    } else if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
      advance(2);
      t.kind = Kind::If;
    } else if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        advance(1);
      }
      t.text = text_.substr(start, pos_ - start);
      t.kind = t.text == "not" ? Kind::Not : Kind::Ident;
    } else {
      std::string msg = "unexpected character '";
      msg += c;
      msg += "'";
      throw ParseError(line_, column_, msg);
    }
    return t;
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

const char* describe(Lexer::Kind k) {
  switch (k) {
    case Lexer::Kind::Ident: return "identifier";
    case Lexer::Kind::Not: return "'not'";
    case Lexer::Kind::If: return "':-'";
    case Lexer::Kind::Comma: return "','";
    case Lexer::Kind::Dot: return "'.'";
    case Lexer::Kind::End: return "end of input";
  }
  return "?";
}

[[noreturn]] void unexpected(const Lexer::Token& t, const char* expected) {
  throw ParseError(t.line, t.column, std::string("expected ") + expected + ", found " + describe(t.kind));
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

AtomId Program::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  auto id = static_cast<AtomId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<AtomId> Program::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Program::add_rule(Rule rule) {
  auto check = [this](AtomId a) {
    if (a >= names_.size()) throw std::out_of_range("rule references unknown atom id " + std::to_string(a));
  };
  if (rule.head) check(*rule.head);
  for (AtomId a : rule.pos_body) check(a);
  for (AtomId a : rule.neg_body) check(a);
  sort_unique(rule.pos_body);
  sort_unique(rule.neg_body);
  rules_.push_back(std::move(rule));
}

std::vector<AtomId> Program::rule_atoms() const {
  std::vector<char> seen(names_.size(), 0);
  for (const Rule& r : rules_) {
    if (r.head) seen[*r.head] = 1;
    for (AtomId a : r.pos_body) seen[a] = 1;
    for (AtomId a : r.neg_body) seen[a] = 1;
  }
  std::vector<AtomId> out;
  for (AtomId a = 0; a < seen.size(); ++a) {
    if (seen[a]) out.push_back(a);
  }
  return out;
}

std::string Program::format(Literal l) const {
  return l.positive ? name(l.atom) : "-" + name(l.atom);
}

std::string Program::print() const {
  std::ostringstream out;
  for (const Rule& r : rules_) {
    if (r.head) out << name(*r.head);
    if (r.body_size() > 0) {
      out << (r.head ? " :- " : ":- ");
      bool first = true;
      for (AtomId a : r.pos_body) {
        out << (first ? "" : ", ") << name(a);
        first = false;
      }
      for (AtomId a : r.neg_body) {
        out << (first ? "" : ", ") << "not " << name(a);
        first = false;
      }
    }
    out << ".\n";
  }
  return out.str();
}

Program parse_program(std::string_view text) {
  Program p;
  Lexer lex(text);
  Lexer::Token t = lex.next();
  while (t.kind != Lexer::Kind::End) {
    Rule rule;
    if (t.kind == Lexer::Kind::Ident) {
      rule.head = p.intern(t.text);
      t = lex.next();
      if (t.kind == Lexer::Kind::Dot) {
        p.add_rule(std::move(rule));
        t = lex.next();
        continue;
      }
      if (t.kind != Lexer::Kind::If) unexpected(t, "':-' or '.'");
    } else if (t.kind != Lexer::Kind::If) {
      unexpected(t, "rule head or ':-'");
    }
    // body
    for (;;) {
      t = lex.next();
      bool negated = false;
      if (t.kind == Lexer::Kind::Not) {
        negated = true;
        t = lex.next();
      }
      if (t.kind != Lexer::Kind::Ident) unexpected(t, "body atom");
      AtomId a = p.intern(t.text);
      (negated ? rule.neg_body : rule.pos_body).push_back(a);
      t = lex.next();
      if (t.kind == Lexer::Kind::Dot) break;
      if (t.kind != Lexer::Kind::Comma) unexpected(t, "',' or '.'");
    }
    p.add_rule(std::move(rule));
    t = lex.next();
  }
  return p;
}

std::vector<Literal> literals_of(const Program& p) {
  std::vector<Literal> out;
  out.reserve(2 * p.atom_count());
  for (AtomId a = 0; a < p.atom_count(); ++a) {
    out.push_back(pos(a));
    out.push_back(neg(a));
  }
  return out;
}

bool check_consistent(std::span<const Literal> literals) {
  std::vector<Literal> sorted(literals.begin(), literals.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].atom == sorted[i - 1].atom && sorted[i].positive != sorted[i - 1].positive) return false;
  }
  return true;
}

AssumptionSet::AssumptionSet(std::vector<Literal> literals) : literals_(std::move(literals)) {
  std::sort(literals_.begin(), literals_.end());
  literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
}

AssumptionSet AssumptionSet::parse(const Program& p, std::string_view text) {
  return parse(p.names(), text);
}

AssumptionSet AssumptionSet::parse(const std::vector<std::string>& atom_names, std::string_view text) {
  std::vector<Literal> lits;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (!item.empty()) {
      bool positive = true;
      if (item.front() == '-') {
        positive = false;
        item.remove_prefix(1);
      }
      auto it = std::find(atom_names.begin(), atom_names.end(), item);
      if (it == atom_names.end()) throw std::invalid_argument("unknown atom '" + std::string(item) + "'");
      lits.push_back({static_cast<AtomId>(it - atom_names.begin()), positive});
    }
    start = end + 1;
  }
  return AssumptionSet(std::move(lits));
}

bool AssumptionSet::contains(Literal l) const {
  return std::binary_search(literals_.begin(), literals_.end(), l);
}

AssumptionSet AssumptionSet::with(Literal l) const {
  auto lits = literals_;
  lits.push_back(l);
  return AssumptionSet(std::move(lits));
}

AssumptionSet AssumptionSet::with(std::span<const Literal> ls) const {
  auto lits = literals_;
  lits.insert(lits.end(), ls.begin(), ls.end());
  return AssumptionSet(std::move(lits));
}

std::string AssumptionSet::format(const std::vector<std::string>& atom_names) const {
  std::string out;
  for (const Literal& l : literals_) {
    if (!out.empty()) out += ',';
    if (!l.positive) out += '-';
    out += atom_names.at(l.atom);
  }
  return out;
}

}  // namespace lpc
