#include "coop2/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace coop2::dsl {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_')) {
        advance();
      }
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    advance();
    switch (c) {
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '^': t.kind = Tok::Caret; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      default: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "unexpected character 0x%02x",
                      static_cast<unsigned>(static_cast<unsigned char>(c)));
        throw ParseError(ErrorCode::SyntaxError, t.line, t.column, "expression", buf);
      }
    }
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token number(Token t) {
    const std::size_t start = pos_;
    auto digits = [this] {
      std::size_t count = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        advance();
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      mantissa += digits();
    }
    if (mantissa == 0) {
      throw ParseError(ErrorCode::SyntaxError, t.line, t.column, "digit", "malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (digits() == 0) {
        throw ParseError(ErrorCode::SyntaxError, line_, column_, "exponent digits",
                         "malformed number");
      }
    }
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, pos_ - start));
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec != std::errc() || !std::isfinite(t.number)) {
      throw ParseError(ErrorCode::SyntaxError, t.line, t.column, "finite number",
                       "number out of range");
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Expr binary(Op op, Expr l, Expr r) {
  Node n;
  n.op = op;
  n.lhs = std::move(l);
  n.rhs = std::move(r);
  return make(std::move(n));
}

Expr unary(Op op, Expr arg) {
  Node n;
  n.op = op;
  n.lhs = std::move(arg);
  return make(std::move(n));
}

// x<digits> -> 1-based index, or 0 when not a variable name
int variable_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'x') return 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return 0;
  }
  if (name.size() > 8 || name[1] == '0') return -1;
  return std::stoi(name.substr(1));
}

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(std::string_view src, const Symbols& symbols) : lexer_(src), symbols_(symbols) {
    cur_ = lexer_.next();
  }

  Expr parse_all() {
    Expr e = expr();
    if (cur_.kind != Tok::End) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(ErrorCode::SyntaxError, cur_.line, cur_.column, expected,
                     std::string("expected ") + expected + ", found " + describe(cur_.kind));
  }

  void bump() { cur_ = lexer_.next(); }

  void expect(Tok kind) {
    if (cur_.kind != kind) fail(describe(kind));
    bump();
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) p.fail("shallower nesting");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  Expr expr() {
    DepthGuard guard(*this);
    Expr lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
      bump();
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary_expr();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
      bump();
      lhs = binary(op, lhs, unary_expr());
    }
    return lhs;
  }

  Expr unary_expr() {
    DepthGuard guard(*this);
    if (cur_.kind == Tok::Minus) {
      bump();
      return unary(Op::Neg, unary_expr());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (cur_.kind != Tok::Caret) return base;
    bump();
    bool negative = false;
    if (cur_.kind == Tok::Minus) {
      negative = true;
      bump();
    }
    if (cur_.kind != Tok::Number) fail("integer exponent");
    const double v = cur_.number;
    if (v != std::floor(v) || v > 1024.0 || cur_.text.find_first_of(".eE") != std::string::npos) {
      fail("integer exponent");
    }
    bump();
    Node n;
    n.op = Op::Pow;
    n.lhs = base;
    n.exponent = static_cast<int>(negative ? -v : v);
    return make(std::move(n));
  }

  Expr primary() {
    switch (cur_.kind) {
      case Tok::Number: {
        Node n;
        n.op = Op::Const;
        n.value = cur_.number;
        bump();
        return make(std::move(n));
      }
      case Tok::LParen: {
        bump();
        Expr inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail("number, identifier or '('");
    }
  }

  Expr identifier() {
    const Token tok = cur_;
    bump();
    if (cur_.kind == Tok::LParen) {
      if (tok.text != "exp") {
        throw ParseError(ErrorCode::UnknownIdentifier, tok.line, tok.column, "function 'exp'",
                         "unknown function '" + tok.text + "'");
      }
      bump();
      Expr arg = expr();
      expect(Tok::RParen);
      return unary(Op::Exp, arg);
    }
    const int var = variable_index(tok.text);
    if (var != 0) {
      if (var < 0 || (symbols_.dim >= 0 && var > symbols_.dim)) {
        throw ParseError(ErrorCode::UnknownIdentifier, tok.line, tok.column, "state variable",
                         "variable '" + tok.text + "' outside the state dimension");
      }
      Node n;
      n.op = Op::Var;
      n.index = var - 1;
      return make(std::move(n));
    }
    if (symbols_.params && symbols_.params->count(tok.text) == 0) {
      throw ParseError(ErrorCode::UnknownIdentifier, tok.line, tok.column, "declared parameter",
                       "unknown identifier '" + tok.text + "'");
    }
    Node n;
    n.op = Op::Param;
    n.name = tok.text;
    return make(std::move(n));
  }

  Lexer lexer_;
  const Symbols& symbols_;
  Token cur_;
  int depth_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Expr parse(std::string_view source, const Symbols& symbols) {
  Parser p(source, symbols);
  return p.parse_all();
}

std::string print(const Expr& e) {
  switch (e->op) {
    case Op::Const: return format_number(e->value);
    case Op::Var: return "x" + std::to_string(e->index + 1);
    case Op::Param: return e->name;
    case Op::Add: return "(" + print(e->lhs) + " + " + print(e->rhs) + ")";
    case Op::Sub: return "(" + print(e->lhs) + " - " + print(e->rhs) + ")";
    case Op::Mul: return "(" + print(e->lhs) + " * " + print(e->rhs) + ")";
    case Op::Div: return "(" + print(e->lhs) + " / " + print(e->rhs) + ")";
    case Op::Pow: return "(" + print(e->lhs) + "^" + std::to_string(e->exponent) + ")";
    case Op::Exp: return "exp(" + print(e->lhs) + ")";
    case Op::Neg: return "(-" + print(e->lhs) + ")";
  }
  return "";
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Var: return a->index == b->index;
    case Op::Param: return a->name == b->name;
    case Op::Pow: return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
    case Op::Exp:
    case Op::Neg: return structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

double eval(const Expr& e, const Vector& x, const std::map<std::string, double>& params) {
  switch (e->op) {
    case Op::Const: return e->value;
    case Op::Var:
      if (e->index >= x.size()) {
        throw Error(ErrorCode::UnboundIdentifier, "x" + std::to_string(e->index + 1) + " unbound");
      }
      return x(e->index);
    case Op::Param: {
      const auto it = params.find(e->name);
      if (it == params.end()) throw Error(ErrorCode::UnboundIdentifier, "'" + e->name + "' unbound");
      return it->second;
    }
    case Op::Add: return eval(e->lhs, x, params) + eval(e->rhs, x, params);
    case Op::Sub: return eval(e->lhs, x, params) - eval(e->rhs, x, params);
    case Op::Mul: return eval(e->lhs, x, params) * eval(e->rhs, x, params);
    case Op::Div: {
      const double den = eval(e->rhs, x, params);
      if (std::abs(den) < 1e-30) throw Error(ErrorCode::DivisionNearZero, "denominator below 1e-30");
      return eval(e->lhs, x, params) / den;
    }
    case Op::Pow: {
      const double base = eval(e->lhs, x, params);
      if (e->exponent < 0 && std::abs(base) < 1e-30) {
        throw Error(ErrorCode::DivisionNearZero, "negative power of a value below 1e-30");
      }
      return std::pow(base, e->exponent);
    }
    case Op::Exp: return std::exp(eval(e->lhs, x, params));
    case Op::Neg: return -eval(e->lhs, x, params);
  }
  return 0.0;
}

Expr bind(const Expr& e, const std::map<std::string, double>& params) {
  switch (e->op) {
    case Op::Const:
    case Op::Var: return e;
    case Op::Param: {
      const auto it = params.find(e->name);
      if (it == params.end()) throw Error(ErrorCode::UnboundIdentifier, "'" + e->name + "' unbound");
      Node n;
      n.op = Op::Const;
      n.value = it->second;
      return make(std::move(n));
    }
    default: {
      Node n = *e;
      n.lhs = bind(e->lhs, params);
      if (e->rhs) n.rhs = bind(e->rhs, params);
      return make(std::move(n));
    }
  }
}

Matrix jacobian_fd(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   std::optional<double> h) {
  const Eigen::Index n = x.size();
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Matrix jac(n, n);
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = h ? *h : base * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + step;
    xm(j) = x(j) - step;
    // use the representable step to keep the quotient consistent
    const double width = xp(j) - xm(j);
    jac.col(j) = (f(xp) - f(xm)) / width;
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return jac;
}

Matrix jacobian_fd(const std::vector<Expr>& field, const Vector& x,
                   const std::map<std::string, double>& params, std::optional<double> h) {
  auto f = [&field, &params](const Vector& y) {
    Vector out(static_cast<Eigen::Index>(field.size()));
    for (std::size_t i = 0; i < field.size(); ++i) out(static_cast<Eigen::Index>(i)) = eval(field[i], y, params);
    return out;
  };
  return jacobian_fd(f, x, h);
}

Model model_from_config_text(std::string_view json_text) {
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::BadConfig, std::string("invalid JSON: ") + ex.what());
  }
  try {
    Model model;
    model.name = cfg.at("name").get<std::string>();
    const int n = cfg.at("dim").get<int>();
    if (n < 1) throw Error(ErrorCode::BadConfig, "dim must be >= 1");
    model.n = n;
    std::set<std::string> names;
    if (cfg.contains("params")) {
      for (const auto& [key, value] : cfg.at("params").items()) {
        if (variable_index(key) != 0) {
          throw Error(ErrorCode::BadConfig, "parameter name '" + key + "' shadows a state variable");
        }
        model.params[key] = value.get<double>();
        names.insert(key);
      }
    }
    const auto& field_src = cfg.at("field");
    if (!field_src.is_array() || static_cast<int>(field_src.size()) != n) {
      throw Error(ErrorCode::BadConfig, "field must list exactly dim expressions");
    }
    const auto lower = cfg.at("box").at("lower").get<std::vector<double>>();
    const auto upper = cfg.at("box").at("upper").get<std::vector<double>>();
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n) {
      throw Error(ErrorCode::BadConfig, "box bounds must have dim entries");
    }
    model.box.lower = Eigen::Map<const Vector>(lower.data(), n);
    model.box.upper = Eigen::Map<const Vector>(upper.data(), n);
    for (int i = 0; i < n; ++i) {
      if (!(model.box.lower(i) < model.box.upper(i))) {
        throw Error(ErrorCode::BadConfig, "box must satisfy lower < upper componentwise");
      }
    }
    Symbols symbols{n, names};
    std::vector<Expr> bound;
    for (const auto& item : field_src) {
      bound.push_back(dsl::bind(parse(item.get<std::string>(), symbols), model.params));
    }
    model.field = [bound](const Vector& x) {
      Vector out(static_cast<Eigen::Index>(bound.size()));
      for (std::size_t i = 0; i < bound.size(); ++i) out(static_cast<Eigen::Index>(i)) = eval(bound[i], x);
      return out;
    };
    model.jacobian = [field = model.field](const Vector& x) { return jacobian_fd(field, x); };
    return model;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::BadConfig, std::string("config schema: ") + ex.what());
  }
}

Model model_from_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_config_text(ss.str());
}

}  // namespace coop2::dsl
