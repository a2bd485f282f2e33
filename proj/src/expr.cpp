#include "ldod/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace ldod {
namespace expr {

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)),
      position(pos) {}

namespace {

NodePtr lit(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::literal;
  n->value = v;
  return n;
}

NodePtr sym(SymbolKind k, int index, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::symbol;
  n->symbol_kind = k;
  n->symbol_index = index;
  n->name = std::move(name);
  return n;
}

bool is_lit(const NodePtr& n, double v) {
  return n->kind == Node::Kind::literal && n->value == v;
}

NodePtr neg(NodePtr a);

NodePtr bin(BinaryOp op, NodePtr a, NodePtr b) {
  // constant folding; division/pow of literals folds only when defined
  if (a->kind == Node::Kind::literal && b->kind == Node::Kind::literal) {
    switch (op) {
      case BinaryOp::add: return lit(a->value + b->value);
      case BinaryOp::sub: return lit(a->value - b->value);
      case BinaryOp::mul: return lit(a->value * b->value);
      case BinaryOp::div:
        if (b->value != 0.0) return lit(a->value / b->value);
        break;
      case BinaryOp::pow: {
        double r = std::pow(a->value, b->value);
        if (std::isfinite(r)) return lit(r);
        break;
      }
    }
  }
  switch (op) {
    case BinaryOp::add:
      if (is_lit(a, 0.0)) return b;
      if (is_lit(b, 0.0)) return a;
      break;
    case BinaryOp::sub:
      if (is_lit(b, 0.0)) return a;
      if (is_lit(a, 0.0)) return neg(b);
      break;
    case BinaryOp::mul:
      if (is_lit(a, 0.0) || is_lit(b, 0.0)) return lit(0.0);
      if (is_lit(a, 1.0)) return b;
      if (is_lit(b, 1.0)) return a;
      break;
    case BinaryOp::div:
      if (is_lit(a, 0.0)) return lit(0.0);
      if (is_lit(b, 1.0)) return a;
      break;
    case BinaryOp::pow:
      if (is_lit(b, 1.0)) return a;
      if (is_lit(b, 0.0)) return lit(1.0);
      break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr neg(NodePtr a) {
  if (a->kind == Node::Kind::literal) return lit(-a->value);
  if (a->kind == Node::Kind::unary_minus) return a->a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary_minus;
  n->a = std::move(a);
  return n;
}

NodePtr call(Func f, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::call;
  n->func = f;
  n->a = std::move(a);
  return n;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::log10: return "log10";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

// ---- tokeniser ----

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end } kind;
  double value = 0.0;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.kind = Token::Kind::end;
      tok_.text = "end of input";
      return;
    }
    char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      std::size_t start = i_;
      while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
        ++i_;
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t j = i_ + 1;
        if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
        if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
          i_ = j;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
      }
      tok_.kind = Token::Kind::number;
      tok_.text = src_.substr(start, i_ - start);
      try {
        tok_.value = std::stod(tok_.text);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok_.text + "'", start);
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = i_;
      while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        ++i_;
      tok_.kind = Token::Kind::ident;
      tok_.text = src_.substr(start, i_ - start);
      return;
    }
    if (c == '(') {
      tok_.kind = Token::Kind::lparen;
    } else if (c == ')') {
      tok_.kind = Token::Kind::rparen;
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      tok_.kind = Token::Kind::op;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i_);
    }
    tok_.text = std::string(1, c);
    ++i_;
  }

  const std::string& src_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& params,
         const std::vector<std::string>& factors)
      : lex_(src), params_(params), factors_(factors) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end)
      throw ParseError("unexpected " + describe(t), t.pos);
    return e;
  }

 private:
  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::end) return "end of input";
    return "'" + t.text + "'";
  }

  bool peek_op(const char* s) const {
    return lex_.peek().kind == Token::Kind::op && lex_.peek().text == s;
  }

  NodePtr parse_sum() {
    NodePtr e = parse_term();
    while (peek_op("+") || peek_op("-")) {
      Token t = lex_.take();
      NodePtr rhs = parse_term();
      e = bin(t.text == "+" ? BinaryOp::add : BinaryOp::sub, e, rhs);
    }
    return e;
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    while (peek_op("*") || peek_op("/")) {
      Token t = lex_.take();
      NodePtr rhs = parse_unary();
      e = bin(t.text == "*" ? BinaryOp::mul : BinaryOp::div, e, rhs);
    }
    return e;
  }

  NodePtr parse_unary() {
    if (peek_op("-")) {
      lex_.take();
      return neg(parse_unary());
    }
    return parse_power();
  }

  // '^' binds tighter than unary minus; left associative. A leading '-'
  // in the exponent is allowed (x^-2 reads as x^(-2)).
  NodePtr parse_power() {
    NodePtr e = parse_primary();
    while (peek_op("^")) {
      lex_.take();
      NodePtr rhs = peek_op("-") ? (lex_.take(), neg(parse_exponent()))
                                 : parse_exponent();
      e = bin(BinaryOp::pow, e, rhs);
    }
    return e;
  }

  NodePtr parse_exponent() {
    if (peek_op("-")) {
      lex_.take();
      return neg(parse_exponent());
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::number:
        lex_.take();
        return lit(t.value);
      case Token::Kind::lparen: {
        lex_.take();
        NodePtr e = parse_sum();
        const Token& close = lex_.peek();
        if (close.kind != Token::Kind::rparen)
          throw ParseError("expected ')' but found " + describe(close), close.pos);
        lex_.take();
        return e;
      }
      case Token::Kind::ident: {
        lex_.take();
        if (lex_.peek().kind == Token::Kind::lparen) {
          Func f;
          if (t.text == "exp") f = Func::exp;
          else if (t.text == "log") f = Func::log;
          else if (t.text == "log10") f = Func::log10;
          else if (t.text == "sqrt") f = Func::sqrt;
          else throw ParseError("unknown function '" + t.text + "'", t.pos);
          lex_.take();
          NodePtr arg = parse_sum();
          const Token& close = lex_.peek();
          if (close.kind != Token::Kind::rparen)
            throw ParseError("expected ')' but found " + describe(close), close.pos);
          lex_.take();
          return call(f, arg);
        }
        for (std::size_t j = 0; j < params_.size(); ++j)
          if (params_[j] == t.text)
            return sym(SymbolKind::parameter, static_cast<int>(j), t.text);
        for (std::size_t j = 0; j < factors_.size(); ++j)
          if (factors_[j] == t.text)
            return sym(SymbolKind::factor, static_cast<int>(j), t.text);
        throw ParseError("undeclared symbol '" + t.text + "'", t.pos);
      }
      default:
        throw ParseError("expected an operand but found " + describe(t), t.pos);
    }
  }

  Lexer lex_;
  const std::vector<std::string>& params_;
  const std::vector<std::string>& factors_;
};

NodePtr diff(const NodePtr& n, int param_index) {
  switch (n->kind) {
    case Node::Kind::literal:
      return lit(0.0);
    case Node::Kind::symbol:
      return lit(n->symbol_kind == SymbolKind::parameter &&
                         n->symbol_index == param_index
                     ? 1.0
                     : 0.0);
    case Node::Kind::unary_minus:
      return neg(diff(n->a, param_index));
    case Node::Kind::call: {
      NodePtr da = diff(n->a, param_index);
      if (is_lit(da, 0.0)) return lit(0.0);
      switch (n->func) {
        case Func::exp:
          return bin(BinaryOp::mul, da, call(Func::exp, n->a));
        case Func::log:
          return bin(BinaryOp::div, da, n->a);
        case Func::log10:
          return bin(BinaryOp::div, da,
                     bin(BinaryOp::mul, n->a, lit(std::log(10.0))));
        case Func::sqrt:
          return bin(BinaryOp::div, da,
                     bin(BinaryOp::mul, lit(2.0), call(Func::sqrt, n->a)));
      }
      return lit(0.0);
    }
    case Node::Kind::binary: {
      const NodePtr &a = n->a, &b = n->b;
      switch (n->op) {
        case BinaryOp::add:
          return bin(BinaryOp::add, diff(a, param_index), diff(b, param_index));
        case BinaryOp::sub:
          return bin(BinaryOp::sub, diff(a, param_index), diff(b, param_index));
        case BinaryOp::mul:
          return bin(BinaryOp::add,
                     bin(BinaryOp::mul, diff(a, param_index), b),
                     bin(BinaryOp::mul, a, diff(b, param_index)));
        case BinaryOp::div:
          // a'/b - a b'/b^2
          return bin(BinaryOp::sub, bin(BinaryOp::div, diff(a, param_index), b),
                     bin(BinaryOp::div, bin(BinaryOp::mul, a, diff(b, param_index)),
                         bin(BinaryOp::pow, b, lit(2.0))));
        case BinaryOp::pow: {
          NodePtr da = diff(a, param_index);
          NodePtr db = diff(b, param_index);
          if (b->kind == Node::Kind::literal) {
            // power rule: c a^(c-1) a'
            return bin(BinaryOp::mul,
                       bin(BinaryOp::mul, b,
                           bin(BinaryOp::pow, a, lit(b->value - 1.0))),
                       da);
          }
          // a^b treated as exp(b log a)
          NodePtr term1 = bin(BinaryOp::mul, db, call(Func::log, a));
          NodePtr term2 = bin(BinaryOp::div, bin(BinaryOp::mul, b, da), a);
          return bin(BinaryOp::mul, bin(BinaryOp::pow, a, b),
                     bin(BinaryOp::add, term1, term2));
        }
      }
      return lit(0.0);
    }
  }
  return lit(0.0);
}

double eval_node(const Node& n, std::span<const double> params,
                 std::span<const double> factors) {
  switch (n.kind) {
    case Node::Kind::literal:
      return n.value;
    case Node::Kind::symbol:
      return n.symbol_kind == SymbolKind::parameter
                 ? params[static_cast<std::size_t>(n.symbol_index)]
                 : factors[static_cast<std::size_t>(n.symbol_index)];
    case Node::Kind::unary_minus:
      return -eval_node(*n.a, params, factors);
    case Node::Kind::call: {
      double a = eval_node(*n.a, params, factors);
      switch (n.func) {
        case Func::exp:
          return std::exp(a);
        case Func::log:
          if (a <= 0.0)
            throw EvalError("log of non-positive value " + std::to_string(a));
          return std::log(a);
        case Func::log10:
          if (a <= 0.0)
            throw EvalError("log10 of non-positive value " + std::to_string(a));
          return std::log10(a);
        case Func::sqrt:
          if (a < 0.0)
            throw EvalError("sqrt of negative value " + std::to_string(a));
          return std::sqrt(a);
      }
      return 0.0;
    }
    case Node::Kind::binary: {
      double a = eval_node(*n.a, params, factors);
      double b = eval_node(*n.b, params, factors);
      switch (n.op) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div:
          if (b == 0.0) throw EvalError("division by zero");
          return a / b;
        case BinaryOp::pow:
          if (a == 0.0 && b < 0.0)
            throw EvalError("0 raised to negative power " + std::to_string(b));
          if (a < 0.0 && b != std::floor(b))
            throw EvalError("negative base " + std::to_string(a) +
                            " with non-integer exponent " + std::to_string(b));
          return std::pow(a, b);
      }
      return 0.0;
    }
  }
  return 0.0;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::binary:
      switch (n.op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
      return 0;
    case Node::Kind::unary_minus:
      return 3;
    default:
      return 5;
  }
}

void print_node(const Node& n, std::ostream& os) {
  auto child = [&os](const Node& c, int min_prec) {
    bool parens = precedence(c) < min_prec;
    if (parens) os << '(';
    print_node(c, os);
    if (parens) os << ')';
  };
  switch (n.kind) {
    case Node::Kind::literal: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      std::string s = tmp.str();
      if (n.value < 0) {
        os << '(' << s << ')';
      } else {
        os << s;
      }
      return;
    }
    case Node::Kind::symbol:
      os << n.name;
      return;
    case Node::Kind::unary_minus:
      os << '-';
      child(*n.a, 4);
      return;
    case Node::Kind::call:
      os << func_name(n.func) << '(';
      print_node(*n.a, os);
      os << ')';
      return;
    case Node::Kind::binary: {
      const char* opc = n.op == BinaryOp::add   ? " + "
                        : n.op == BinaryOp::sub ? " - "
                        : n.op == BinaryOp::mul ? "*"
                        : n.op == BinaryOp::div ? "/"
                                                : "^";
      int prec = precedence(n);
      child(*n.a, prec);        // left child may share precedence
      os << opc;
      child(*n.b, prec + 1);    // right child must bind tighter
      return;
    }
  }
}

void collect_symbols(const NodePtr& n, std::vector<const Node*>& out) {
  if (!n) return;
  if (n->kind == Node::Kind::symbol) out.push_back(n.get());
  collect_symbols(n->a, out);
  collect_symbols(n->b, out);
}

}  // namespace

ModelAst parse(const std::string& source, std::vector<std::string> params,
               std::vector<std::string> factors) {
  std::vector<std::string> all = params;
  all.insert(all.end(), factors.begin(), factors.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == "exp" || all[i] == "log" || all[i] == "log10" || all[i] == "sqrt")
      throw std::invalid_argument("name '" + all[i] + "' collides with a function");
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (all[i] == all[j])
        throw std::invalid_argument("duplicate declared name '" + all[i] + "'");
  }
  Parser p(source, params, factors);
  return ModelAst{p.parse_all(), std::move(params), std::move(factors)};
}

ModelAst differentiate(const ModelAst& ast, const std::string& param) {
  for (std::size_t j = 0; j < ast.params.size(); ++j)
    if (ast.params[j] == param)
      return ModelAst{diff(ast.root, static_cast<int>(j)), ast.params, ast.factors};
  throw std::invalid_argument("'" + param + "' is not a declared parameter");
}

double eval(const ModelAst& ast, const std::map<std::string, double>& env) {
  std::vector<const Node*> syms;
  collect_symbols(ast.root, syms);
  std::vector<double> pv(ast.params.size(), 0.0), fv(ast.factors.size(), 0.0);
  for (const Node* s : syms) {
    auto it = env.find(s->name);
    if (it == env.end()) throw EvalError("unbound symbol '" + s->name + "'");
    auto& slot = s->symbol_kind == SymbolKind::parameter ? pv : fv;
    slot[static_cast<std::size_t>(s->symbol_index)] = it->second;
  }
  return eval_node(*ast.root, pv, fv);
}

std::string print(const ModelAst& ast) {
  std::ostringstream os;
  print_node(*ast.root, os);
  return os.str();
}

Model make_model(const ModelAst& ast) {
  const int p = static_cast<int>(ast.params.size());
  const int v = static_cast<int>(ast.factors.size());
  auto derivs = std::make_shared<std::vector<NodePtr>>();
  derivs->reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) derivs->push_back(diff(ast.root, j));
  NodePtr root = ast.root;

  auto mean = [root](std::span<const double> pt, std::span<const double> th) {
    return eval_node(*root, th, pt);
  };
  auto grad = [derivs](std::span<const double> pt, std::span<const double> th,
                       std::span<double> out) {
    for (std::size_t j = 0; j < derivs->size(); ++j)
      out[j] = eval_node(*(*derivs)[j], th, pt);
  };
  return Model(p, v, mean, grad, ast.params, ast.factors);
}

Model make_model(const std::string& source, std::vector<std::string> params,
                 std::vector<std::string> factors) {
  return make_model(parse(source, std::move(params), std::move(factors)));
}

}  // namespace expr
}  // namespace ldod
