#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coop2/error.hpp"
#include "coop2/linalg.hpp"
#include "coop2/model.hpp"

namespace coop2::dsl {

// Expression language for vector fields:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | identifier | 'exp' '(' expr ')' | '(' expr ')'
//
// Identifiers of the form x<k> are state variables (1-based); everything
// else is a parameter name.

enum class Op { Const, Var, Param, Add, Sub, Mul, Div, Pow, Exp, Neg };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var, 0-based
  int exponent = 0;    // Pow
  std::string name;    // Param
  Expr lhs;            // unary operand or left child
  Expr rhs;
};

/// Syntax and identifier errors carry a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, int column, std::string expected, const std::string& what)
      : Error(code, what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

/// Optional identifier checking during parse.
struct Symbols {
  int dim = -1;                      // < 0: any x<k> accepted
  std::optional<std::set<std::string>> params;  // nullopt: any parameter name accepted
};

Expr parse(std::string_view source, const Symbols& symbols = {});

/// Parenthesized text that parses back to a structurally identical tree.
std::string print(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

double eval(const Expr& e, const Vector& x, const std::map<std::string, double>& params = {});

/// Replace parameter nodes by constants. Throws UnboundIdentifier.
Expr bind(const Expr& e, const std::map<std::string, double>& params);

/// Central-difference Jacobian. Default step per column:
/// cbrt(machine epsilon) * max(1, |x_j|).
Matrix jacobian_fd(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   std::optional<double> h = std::nullopt);

Matrix jacobian_fd(const std::vector<Expr>& field, const Vector& x,
                   const std::map<std::string, double>& params,
                   std::optional<double> h = std::nullopt);

/// Build a model from a JSON config:
/// {"name", "dim", "params": {..}, "field": [n strings], "box": {"lower", "upper"}}.
/// Throws BadConfig on schema errors and ParseError on bad expressions.
Model model_from_config_text(std::string_view json_text);
Model model_from_config_file(const std::filesystem::path& path);

}  // namespace coop2::dsl
