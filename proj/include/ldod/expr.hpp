#ifndef LDOD_EXPR_HPP
#define LDOD_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ldod/model.hpp"

namespace ldod {
namespace expr {

/// Syntax error with a 0-based character position (end-of-input errors
/// point one past the last character).
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position);
  std::size_t position;
};

enum class BinaryOp { add, sub, mul, div, pow };
enum class Func { exp, log, log10, sqrt };
enum class SymbolKind { parameter, factor };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { literal, symbol, unary_minus, binary, call } kind;
  double value = 0.0;            // literal
  SymbolKind symbol_kind{};      // symbol
  int symbol_index = -1;         // symbol: index into params/factors
  std::string name;              // symbol
  BinaryOp op{};                 // binary
  Func func{};                   // call
  NodePtr a, b;                  // operands
};

/// A parsed mean-function expression with its declared parameter and
/// factor names. Immutable; all operations on it are pure.
struct ModelAst {
  NodePtr root;
  std::vector<std::string> params;
  std::vector<std::string> factors;
};

/// Parse an expression over the declared names. Precedence ^ before unary
/// minus before *,/ before +,-; same-precedence binary operators associate
/// left; exp/log/log10/sqrt are the only functions.
ModelAst parse(const std::string& source, std::vector<std::string> params,
               std::vector<std::string> factors);

/// Symbolic partial derivative with respect to a declared parameter, with
/// constant folding (0*x, x+0, x^1, 1*x and friends).
ModelAst differentiate(const ModelAst& ast, const std::string& param);

/// Evaluate with every symbol bound. Domain violations (log of a
/// non-positive value, 0^negative, division by zero, ...) raise EvalError;
/// unbound symbols raise EvalError naming the symbol.
double eval(const ModelAst& ast, const std::map<std::string, double>& env);

/// Render to parseable text; print(parse(s)) reparses to the same tree.
std::string print(const ModelAst& ast);

/// Wrap an expression as a Model: the gradient is assembled from the
/// symbolic partial derivatives with respect to each parameter.
Model make_model(const ModelAst& ast);
Model make_model(const std::string& source, std::vector<std::string> params,
                 std::vector<std::string> factors);

}  // namespace expr
}  // namespace ldod

#endif
