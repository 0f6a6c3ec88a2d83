#include "dkb/declare.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "dkb/errors.hpp"
#include "dkb/ground.hpp"

namespace dkb {

std::string_view template_name(Template t) noexcept {
  switch (t) {
    case Template::Init: return "Init";
    case Template::End: return "End";
    case Template::Existence: return "Existence";
    case Template::Absence: return "Absence";
    case Template::Exactly: return "Exactly";
    case Template::RespExistence: return "RespExistence";
    case Template::Response: return "Response";
    case Template::Precedence: return "Precedence";
  }
  return "?";
}

std::optional<Template> parse_template_name(std::string_view name) noexcept {
  std::string lower;
  for (char c : name)
    if (c != '_' && c != '-') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "init") return Template::Init;
  if (lower == "end") return Template::End;
  if (lower == "existence") return Template::Existence;
  if (lower == "absence") return Template::Absence;
  if (lower == "exactly") return Template::Exactly;
  if (lower == "respexistence" || lower == "respondedexistence") return Template::RespExistence;
  if (lower == "response") return Template::Response;
  if (lower == "precedence") return Template::Precedence;
  return std::nullopt;
}

bool is_binary(Template t) noexcept {
  return t == Template::RespExistence || t == Template::Response || t == Template::Precedence;
}

bool has_count(Template t) noexcept { return t == Template::Existence || t == Template::Exactly; }

bool is_boolean_scored(Template t) noexcept {
  return t == Template::Absence || t == Template::Response || t == Template::Precedence;
}

void DeclareConstraint::validate() const {
  if (activation.empty()) throw std::invalid_argument("constraint without an activation");
  if (is_binary(kind) != target.has_value())
    throw std::invalid_argument(std::string(template_name(kind)) +
                                (is_binary(kind) ? " needs a target" : " takes no target"));
  if (target && target->empty()) throw std::invalid_argument("empty target label");
  if (has_count(kind) && n < 1) throw std::invalid_argument("n must be at least 1");
}

namespace {
std::string label_text(const std::string& s) {
  bool plain = std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == ' ';
  });
  return plain ? s : "\"" + s + "\"";
}
}  // namespace

std::string DeclareConstraint::to_string() const {
  std::string s = std::string(template_name(kind)) + "[" + label_text(activation);
  if (target) s += "," + label_text(*target);
  if (has_count(kind)) s += "," + std::to_string(n);
  s += "]";
  if (!predicate.trivial()) s += " | " + predicate.to_string();
  return s;
}

std::set<std::string> DeclareModel::labels() const {
  std::set<std::string> out;
  for (const auto& c : constraints) {
    out.insert(c.activation);
    if (c.target) out.insert(*c.target);
    for (const auto& cond : c.predicate.conjuncts)
      if (const auto* j = std::get_if<JoinCond>(&cond)) out.insert(j->other_label);
  }
  return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

}  // namespace

DeclareConstraint parse_constraint(std::string_view text, const ValueOrder& order, std::size_t line) {
  text = trim(text);
  auto open = text.find('[');
  if (open == std::string_view::npos) throw SyntaxError(line, "expected 'Template[args]'");
  auto name = trim(text.substr(0, open));
  auto kind = parse_template_name(name);
  if (!kind) throw UnsupportedTemplate(std::string(name));

  // split on commas outside quotes up to the closing bracket
  std::vector<std::string> args;
  std::size_t close = std::string_view::npos;
  std::size_t start = open + 1;
  char quote = 0;
  for (std::size_t i = open + 1; i < text.size() && close == std::string_view::npos; ++i) {
    char ch = text[i];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == ',' || ch == ']') {
      auto arg = trim(text.substr(start, i - start));
      if (arg.empty()) throw SyntaxError(line, "empty template argument");
      args.push_back(unquote(arg));
      start = i + 1;
      if (ch == ']') close = i;
    }
  }
  if (close == std::string_view::npos) throw SyntaxError(line, "expected 'Template[args]'");

  DeclareConstraint c{*kind, args[0], std::nullopt, {}, 1};
  std::size_t expected = is_binary(*kind) ? 2 : 1;
  if (has_count(*kind) && args.size() == 2) {
    std::uint32_t n = 0;
    const std::string& s = args[1];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || p != s.data() + s.size())
      throw SyntaxError(line, "count argument must be a non-negative integer");
    c.n = n;
    expected = 2;
  } else if (*kind == Template::Exactly) {
    throw SyntaxError(line, "Exactly needs a count: Exactly[A,n]");
  }
  if (args.size() != expected)
    throw SyntaxError(line, std::string(template_name(*kind)) + " expects " +
                                std::to_string(expected) + " argument(s)");
  if (is_binary(*kind)) c.target = args[1];

  auto after = trim(text.substr(close + 1));
  if (!after.empty()) {
    if (after.front() != '|') throw SyntaxError(line, "expected '| predicate' after the template");
    try {
      c.predicate = parse_predicate(trim(after.substr(1)), order, c.activation);
    } catch (const SyntaxError& e) {
      throw SyntaxError(line, e.what());
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SyntaxError(line, e.what());
  }
  return c;
}

DeclareModel parse_model(std::istream& in, const ValueOrder& order) {
  DeclareModel m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    m.constraints.push_back(parse_constraint(body, order, lineno));
  }
  return m;
}

DeclareModel parse_model(const std::filesystem::path& path, const ValueOrder& order) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  return parse_model(in, order);
}

// ---------------------------------------------------------------------------
// LTLf translation

namespace {

Formula existence(const std::string& a, const DataPredicate& p, std::uint32_t n) {
  // F(A∧P ∧ X F(A∧P ∧ ... ))
  Formula inner = Formula::eventually(Formula::atom(a, p));
  for (std::uint32_t i = 1; i < n; ++i)
    inner = Formula::eventually(Formula::conj(Formula::atom(a, p), Formula::next(inner)));
  return inner;
}

}  // namespace

Formula to_ltlf(const DeclareConstraint& c) {
  c.validate();
  const auto& a = c.activation;
  const auto& p = c.predicate;
  switch (c.kind) {
    case Template::Init: return Formula::atom(a, p);
    case Template::End:
      return Formula::eventually(
          Formula::conj(Formula::atom(a, p), Formula::negation(Formula::next(Formula::top()))));
    case Template::Existence: return existence(a, p, c.n);
    case Template::Absence: return Formula::globally(Formula::negation(Formula::atom(a, p)));
    case Template::Exactly:
      return Formula::conj(existence(a, p, c.n), Formula::negation(existence(a, p, c.n + 1)));
    case Template::RespExistence:
      return Formula::implies(Formula::eventually(Formula::atom(a, p)),
                              Formula::eventually(Formula::atom(*c.target)));
    case Template::Response:
      return Formula::globally(
          Formula::implies(Formula::atom(a, p), Formula::eventually(Formula::atom(*c.target))));
    case Template::Precedence:
      return Formula::disj(
          Formula::until(Formula::negation(Formula::atom(*c.target)), Formula::atom(a, p)),
          Formula::globally(Formula::negation(Formula::atom(*c.target))));
  }
  throw UnsupportedTemplate(std::string(template_name(c.kind)));
}

bool model_sat(const DeclareModel& m, const Trace& trace, const KnowledgeBase& kb) {
  return std::all_of(m.constraints.begin(), m.constraints.end(),
                     [&](const DeclareConstraint& c) { return eval(to_ltlf(c), trace, kb); });
}

}  // namespace dkb
