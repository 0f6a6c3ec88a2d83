#include "dkb/ltlf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "dkb/errors.hpp"

namespace dkb {

struct Formula::Node {
  FormulaKind kind;
  std::string label;
  DataPredicate pred;
  std::vector<Formula> children;
};

Formula Formula::make(FormulaKind kind, std::string label, DataPredicate pred, const Formula* lhs,
                      const Formula* rhs) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->label = std::move(label);
  node->pred = std::move(pred);
  if (lhs) node->children.push_back(*lhs);
  if (rhs) node->children.push_back(*rhs);
  return Formula(std::move(node));
}

Formula Formula::top() { return make(FormulaKind::True, {}, {}, nullptr, nullptr); }
Formula Formula::bottom() { return make(FormulaKind::False, {}, {}, nullptr, nullptr); }
Formula Formula::atom(std::string label, DataPredicate pred) {
  return make(FormulaKind::Atom, std::move(label), std::move(pred), nullptr, nullptr);
}
Formula Formula::neg_atom(std::string label, DataPredicate pred) {
  return make(FormulaKind::NegAtom, std::move(label), std::move(pred), nullptr, nullptr);
}
Formula Formula::negation(Formula f) { return make(FormulaKind::Not, {}, {}, &f, nullptr); }
Formula Formula::next(Formula f) { return make(FormulaKind::Next, {}, {}, &f, nullptr); }
Formula Formula::weak_next(Formula f) { return make(FormulaKind::WeakNext, {}, {}, &f, nullptr); }
Formula Formula::conj(Formula a, Formula b) { return make(FormulaKind::And, {}, {}, &a, &b); }
Formula Formula::disj(Formula a, Formula b) { return make(FormulaKind::Or, {}, {}, &a, &b); }
Formula Formula::until(Formula a, Formula b) { return make(FormulaKind::Until, {}, {}, &a, &b); }
Formula Formula::release(Formula a, Formula b) { return make(FormulaKind::Release, {}, {}, &a, &b); }
Formula Formula::eventually(Formula f) { return make(FormulaKind::Eventually, {}, {}, &f, nullptr); }
Formula Formula::globally(Formula f) { return make(FormulaKind::Globally, {}, {}, &f, nullptr); }
Formula Formula::implies(Formula a, Formula b) { return disj(negation(std::move(a)), std::move(b)); }

FormulaKind Formula::kind() const noexcept { return node_->kind; }
const std::string& Formula::label() const noexcept { return node_->label; }
const DataPredicate& Formula::predicate() const noexcept { return node_->pred; }
const Formula& Formula::lhs() const { return node_->children.at(0); }
const Formula& Formula::rhs() const { return node_->children.at(1); }

bool Formula::is_nnf() const {
  if (kind() == FormulaKind::Not) return false;
  return std::all_of(node_->children.begin(), node_->children.end(),
                     [](const Formula& c) { return c.is_nnf(); });
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  return n;
}

std::size_t Formula::temporal_depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.temporal_depth());
  switch (kind()) {
    case FormulaKind::Until:
    case FormulaKind::Release:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return d + 1;
    default: return d;
  }
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.label == y.label && x.pred == y.pred && x.children == y.children;
}

// ---------------------------------------------------------------------------
// printing

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(std::string_view s) {
  return s == "X" || s == "N" || s == "F" || s == "G" || s == "U" || s == "R" || s == "true" ||
         s == "false" || s == "other" || s == "this" || s == "bottom" || s == "top";
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string print_name(std::string_view s) {
  bool plain = !s.empty() && is_ident_start(s[0]) && std::all_of(s.begin(), s.end(), is_ident_char) &&
               !is_keyword(s);
  return plain ? std::string(s) : quote(s);
}

std::string print_constant(const Value& v) {
  switch (v.tag()) {
    case ValueTag::Num: return format_number(v.number());
    case ValueTag::Bottom: return "bottom";
    case ValueTag::Top: return "top";
    default: return quote(v.text());
  }
}

std::string print_atom(const Formula& f) {
  std::string s = print_name(f.label());
  if (!f.predicate().trivial()) s += "[" + f.predicate().to_string() + "]";
  return s;
}

}  // namespace

std::string DataPredicate::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    if (i) out += " & ";
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, ConstCond>) {
            out += print_name(c.key) + " " + std::string(dkb::to_string(c.op)) + " " +
                   print_constant(c.constant);
          } else {
            out += "this." + print_name(c.key) + " " + std::string(dkb::to_string(c.op)) +
                   " other(" + print_name(c.other_label) + ")." + print_name(c.other_key);
          }
        },
        conjuncts[i]);
  }
  return out;
}

std::string Formula::to_string() const {
  switch (kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Atom: return print_atom(*this);
    case FormulaKind::NegAtom: return "!" + print_atom(*this);
    case FormulaKind::Not: return "!" + lhs().to_string();
    case FormulaKind::Next: return "X " + lhs().to_string();
    case FormulaKind::WeakNext: return "N " + lhs().to_string();
    case FormulaKind::Eventually: return "F " + lhs().to_string();
    case FormulaKind::Globally: return "G " + lhs().to_string();
    case FormulaKind::And: return "(" + lhs().to_string() + " & " + rhs().to_string() + ")";
    case FormulaKind::Or: return "(" + lhs().to_string() + " | " + rhs().to_string() + ")";
    case FormulaKind::Until: return "(" + lhs().to_string() + " U " + rhs().to_string() + ")";
    case FormulaKind::Release: return "(" + lhs().to_string() + " R " + rhs().to_string() + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// NNF

namespace {
Formula nnf(const Formula& f, bool negate) {
  using K = FormulaKind;
  switch (f.kind()) {
    case K::True: return negate ? Formula::bottom() : f;
    case K::False: return negate ? Formula::top() : f;
    case K::Atom: return negate ? Formula::neg_atom(f.label(), f.predicate()) : f;
    case K::NegAtom: return negate ? Formula::atom(f.label(), f.predicate()) : f;
    case K::Not: return nnf(f.lhs(), !negate);
    case K::Next:
      return negate ? Formula::weak_next(nnf(f.lhs(), true)) : Formula::next(nnf(f.lhs(), false));
    case K::WeakNext:
      return negate ? Formula::next(nnf(f.lhs(), true)) : Formula::weak_next(nnf(f.lhs(), false));
    case K::And:
      return negate ? Formula::disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                    : Formula::conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Or:
      return negate ? Formula::conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                    : Formula::disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Until:
      return negate ? Formula::release(nnf(f.lhs(), true), nnf(f.rhs(), true))
                    : Formula::until(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Release:
      return negate ? Formula::until(nnf(f.lhs(), true), nnf(f.rhs(), true))
                    : Formula::release(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case K::Eventually:
      return negate ? Formula::globally(nnf(f.lhs(), true)) : Formula::eventually(nnf(f.lhs(), false));
    case K::Globally:
      return negate ? Formula::eventually(nnf(f.lhs(), true)) : Formula::globally(nnf(f.lhs(), false));
  }
  throw std::logic_error("unreachable formula kind");
}
}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

Formula lower_sugar(const Formula& f) {
  using K = FormulaKind;
  switch (f.kind()) {
    case K::True:
    case K::False:
    case K::Atom:
    case K::NegAtom: return f;
    case K::Not: return Formula::negation(lower_sugar(f.lhs()));
    case K::Next: return Formula::next(lower_sugar(f.lhs()));
    case K::WeakNext: return Formula::weak_next(lower_sugar(f.lhs()));
    case K::And: return Formula::conj(lower_sugar(f.lhs()), lower_sugar(f.rhs()));
    case K::Or: return Formula::disj(lower_sugar(f.lhs()), lower_sugar(f.rhs()));
    case K::Until: return Formula::until(lower_sugar(f.lhs()), lower_sugar(f.rhs()));
    case K::Release: return Formula::release(lower_sugar(f.lhs()), lower_sugar(f.rhs()));
    case K::Eventually: return Formula::until(Formula::top(), lower_sugar(f.lhs()));
    case K::Globally: return Formula::release(Formula::bottom(), lower_sugar(f.lhs()));
  }
  throw std::logic_error("unreachable formula kind");
}

// ---------------------------------------------------------------------------
// parsing

namespace {

enum class Tok { Ident, String, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }
  bool accept_punct(std::string_view p) {
    if (cur_.kind == Tok::Punct && cur_.text == p) {
      advance();
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
  }
  bool at_ident(std::string_view word) const { return cur_.kind == Tok::Ident && cur_.text == word; }
  [[noreturn]] void fail(const std::string& why) const {
    throw SyntaxError(1, why + " at column " + std::to_string(tok_start_ + 1));
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_start_ = pos_;
    if (pos_ >= src_.size()) {
      cur_ = {Tok::End, ""};
      return;
    }
    char c = src_[pos_];
    char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    if (is_ident_start(c)) {
      std::size_t b = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      cur_ = {Tok::Ident, std::string(src_.substr(b, pos_ - b))};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '-' && (std::isdigit(static_cast<unsigned char>(n)) || n == '.')) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(n)))) {
      double x = 0;
      auto [end, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), x);
      if (ec != std::errc()) fail("malformed number");
      std::size_t len = end - (src_.data() + pos_);
      cur_ = {Tok::Number, std::string(src_.substr(pos_, len)), x};
      pos_ += len;
      return;
    }
    if (c == '"' || c == '\'') {
      std::string s;
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != c) {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        s += src_[pos_++];
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      ++pos_;
      cur_ = {Tok::String, std::move(s)};
      return;
    }
    static constexpr std::string_view two[] = {"->", "<=", ">=", "==", "!=", "&&", "||"};
    for (auto p : two) {
      if (src_.substr(pos_, 2) == p) {
        pos_ += 2;
        cur_ = {Tok::Punct, p == "&&" ? "&" : p == "||" ? "|" : std::string(p)};
        return;
      }
    }
    if (std::string_view("()[]&|!,.<>=").find(c) != std::string_view::npos) {
      ++pos_;
      cur_ = {Tok::Punct, std::string(1, c)};
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t tok_start_ = 0;
  Token cur_{Tok::End, ""};
};

class Parser {
public:
  Parser(std::string_view text, const ValueOrder& order) : lex_(text), order_(order) {}

  Formula formula() {
    Formula f = implies();
    if (lex_.peek().kind != Tok::End) lex_.fail("unexpected trailing input");
    return f;
  }

  DataPredicate predicate_only(std::string_view self_label) {
    DataPredicate p = predicate(self_label, /*bracketed=*/false);
    if (lex_.peek().kind != Tok::End) lex_.fail("unexpected trailing input");
    return p;
  }

private:
  Formula implies() {
    Formula lhs = disjunction();
    if (lex_.accept_punct("->")) return Formula::implies(lhs, implies());
    return lhs;
  }
  Formula disjunction() {
    Formula f = conjunction();
    while (lex_.accept_punct("|")) f = Formula::disj(f, conjunction());
    return f;
  }
  Formula conjunction() {
    Formula f = binary_temporal();
    while (lex_.accept_punct("&")) f = Formula::conj(f, binary_temporal());
    return f;
  }
  Formula binary_temporal() {
    Formula lhs = unary();
    if (lex_.at_ident("U")) {
      lex_.take();
      return Formula::until(lhs, binary_temporal());
    }
    if (lex_.at_ident("R")) {
      lex_.take();
      return Formula::release(lhs, binary_temporal());
    }
    return lhs;
  }
  Formula unary() {
    if (lex_.accept_punct("!")) return Formula::negation(unary());
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "X") return lex_.take(), Formula::next(unary());
      if (t.text == "N") return lex_.take(), Formula::weak_next(unary());
      if (t.text == "F") return lex_.take(), Formula::eventually(unary());
      if (t.text == "G") return lex_.take(), Formula::globally(unary());
    }
    return primary();
  }
  Formula primary() {
    if (lex_.accept_punct("(")) {
      Formula f = implies();
      lex_.expect_punct(")");
      return f;
    }
    Token t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "true") return lex_.take(), Formula::top();
    if (t.kind == Tok::Ident && t.text == "false") return lex_.take(), Formula::bottom();
    if ((t.kind == Tok::Ident && !is_keyword(t.text)) || t.kind == Tok::String) {
      lex_.take();
      DataPredicate pred;
      if (lex_.accept_punct("[")) {
        pred = predicate(t.text, /*bracketed=*/true);
        lex_.expect_punct("]");
      }
      return Formula::atom(t.text, std::move(pred));
    }
    lex_.fail("expected an atom, constant or '('");
  }

  std::string name() {
    Token t = lex_.peek();
    if (t.kind != Tok::Ident && t.kind != Tok::String) lex_.fail("expected a name");
    lex_.take();
    return t.text;
  }

  DataPredicate predicate(std::string_view self_label, bool bracketed) {
    DataPredicate p;
    if (bracketed && lex_.peek().kind == Tok::Punct && lex_.peek().text == "]") return p;
    do {
      p.conjuncts.push_back(condition(self_label));
    } while (lex_.accept_punct("&") || lex_.accept_punct(","));
    return p;
  }

  Condition condition(std::string_view self_label) {
    std::string key = name();
    if (lex_.accept_punct(".")) {
      if (key != "this" && key != self_label)
        lex_.fail("qualifier '" + key + "' must be 'this' or the constrained activity");
      key = name();
    }
    Token op_tok = lex_.take();
    auto op = op_tok.kind == Tok::Punct ? parse_cmp_op(op_tok.text) : std::nullopt;
    if (!op) lex_.fail("expected a comparison operator");

    Token rhs = lex_.peek();
    if (rhs.kind == Tok::Number) {
      lex_.take();
      return ConstCond{key, *op, Value::num(rhs.number)};
    }
    if (rhs.kind == Tok::String) {
      lex_.take();
      return ConstCond{key, *op, order_.classify(rhs.text)};
    }
    if (rhs.kind == Tok::Ident) {
      lex_.take();
      if (rhs.text == "other" && lex_.accept_punct("(")) {
        std::string other = name();
        lex_.expect_punct(")");
        lex_.expect_punct(".");
        std::string other_key = name();
        return JoinCond{key, *op, other, other_key};
      }
      if (rhs.text == "bottom") return ConstCond{key, *op, Value::bottom()};
      if (rhs.text == "top") return ConstCond{key, *op, Value::top()};
      return ConstCond{key, *op, order_.classify(rhs.text)};
    }
    lex_.fail("expected a constant or other(label).key");
  }

  Lexer lex_;
  const ValueOrder& order_;
};

}  // namespace

Formula parse_formula(std::string_view text, const ValueOrder& order) {
  return Parser(text, order).formula();
}

DataPredicate parse_predicate(std::string_view text, const ValueOrder& order,
                              std::string_view self_label) {
  return Parser(text, order).predicate_only(self_label);
}

}  // namespace dkb
