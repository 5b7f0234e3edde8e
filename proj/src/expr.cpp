#include "motiq/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace motiq {

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("syntax error at position " + std::to_string(pos) + ": " +
                      what);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  int integer() {
    skip_ws();
    const size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) fail("expected an integer");
    return std::stoi(text.substr(start, pos - start));
  }

  std::string identifier() {
    skip_ws();
    const size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected a name");
    return text.substr(start, pos - start);
  }

  std::string quoted() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '"') fail("expected a quoted filter");
    ++pos;
    const size_t start = pos;
    while (pos < text.size() && text[pos] != '"') ++pos;
    if (pos >= text.size()) fail("unterminated string");
    std::string s = text.substr(start, pos - start);
    ++pos;
    return s;
  }

  Motif primitive() {
    const size_t name_pos = pos;
    const std::string name = identifier();
    expect('(');
    if (name == "Qfree") {
      const int n = integer();
      expect(')');
      return qfree(n);
    }
    if (name == "Qconv") {
      Hyperparams h;
      h.stride = integer();
      if (eat(',')) {
        h.step = integer();
        if (eat(',')) h.offset = integer();
      }
      expect(')');
      return qconv(std::move(h));
    }
    if (name == "Qpool") {
      Hyperparams h;
      h.stride = integer();
      expect(',');
      h.filter.value = quoted();
      expect(')');
      return qpool(std::move(h));
    }
    if (name == "Qdense") {
      expect(')');
      return qdense();
    }
    pos = name_pos;
    fail("unknown primitive name '" + name + "'");
  }

  Motif factor() {
    if (eat('(')) {
      Motif m = expr();
      expect(')');
      return m;
    }
    return primitive();
  }

  Motif term() {
    Motif m = factor();
    while (eat('*')) {
      const int k = integer();
      if (k < 1) fail("repeat count must be >= 1");
      m = m * k;
    }
    return m;
  }

  Motif expr() {
    Motif m = term();
    while (eat('+')) m = m + term();
    return m;
  }

  Motif parse() {
    Motif m = expr();
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input");
    return m;
  }
};

void require_expressible(const Hyperparams& h, PrimitiveKind kind) {
  if (h.qpu != 2 || h.boundary != Boundary::Periodic || h.edge_order ||
      h.mapping != default_mapping(kind))
    throw ConfigError(
        "motif uses hyperparameters the inline grammar cannot express; use "
        "the JSON form");
}

std::string primitive_expr(const Motif& m) {
  std::ostringstream out;
  switch (m.kind()) {
    case PrimitiveKind::Qfree:
      if (m.params().free_labels)
        throw ConfigError("explicit Qfree label sets need the JSON form");
      out << "Qfree(" << m.params().free_count << ")";
      break;
    case PrimitiveKind::Qconv: {
      require_expressible(m.params(), PrimitiveKind::Qconv);
      out << "Qconv(" << m.params().stride;
      if (m.params().offset != 0)
        out << ", " << m.params().step << ", " << m.params().offset;
      else if (m.params().step != 1)
        out << ", " << m.params().step;
      out << ")";
      break;
    }
    case PrimitiveKind::Qpool:
      require_expressible(m.params(), PrimitiveKind::Qpool);
      out << "Qpool(" << m.params().stride << ", \"" << m.params().filter.value
          << "\")";
      break;
    case PrimitiveKind::Qdense:
      require_expressible(m.params(), PrimitiveKind::Qdense);
      out << "Qdense()";
      break;
  }
  return out.str();
}

}  // namespace

Motif parse_motif_expr(const std::string& text) {
  Parser p(text);
  return p.parse();
}

std::string to_expr(const Motif& m) {
  if (!m.valid()) throw ConfigError("empty motif");
  if (m.is_primitive()) return primitive_expr(m);
  const auto& kids = m.children();
  const bool all_equal =
      kids.size() >= 2 &&
      std::all_of(kids.begin(), kids.end(), [&](const Motif& c) { return c == kids[0]; });
  auto wrap = [](const Motif& c) {
    const std::string s = to_expr(c);
    return c.is_primitive() ? s : "(" + s + ")";
  };
  if (all_equal) return wrap(kids[0]) + " * " + std::to_string(kids.size());
  std::ostringstream out;
  for (size_t i = 0; i < kids.size(); ++i) {
    if (i) out << " + ";
    out << wrap(kids[i]);
  }
  return out.str();
}

}  // namespace motiq
