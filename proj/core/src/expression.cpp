#include "fracstar/expression.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <vector>

#include "fracstar/format.hpp"

namespace fracstar {

ExpressionError::ExpressionError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"),
      position(pos) {}

struct Expression::Node {
  enum class Kind { Literal, Variable, Unary, Binary, Call };
  Kind kind;
  double value = 0.0;      // Literal
  std::string name;        // Variable / Call
  char op = 0;             // Binary
  std::vector<Node> args;  // children
  std::size_t pos = 0;     // source offset for error messages
};

namespace {

using Node = Expression::Node;

bool known_function(const std::string& name, std::size_t& arity) {
  if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
    arity = 1;
    return true;
  }
  if (name == "pow") {
    arity = 2;
    return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Node run() {
    Node n = expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw ExpressionError("unexpected trailing input", pos_);
    }
    return n;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = binary('+', std::move(lhs), term(), at);
      } else if (accept('-')) {
        lhs = binary('-', std::move(lhs), term(), at);
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = binary('*', std::move(lhs), unary(), at);
      } else if (accept('/')) {
        lhs = binary('/', std::move(lhs), unary(), at);
      } else {
        return lhs;
      }
    }
  }

  Node unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) {
      Node n;
      n.kind = Node::Kind::Unary;
      n.pos = at;
      n.args.push_back(unary());
      return n;
    }
    return power();
  }

  Node power() {
    Node base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) {
      // right-associative; the exponent may carry its own unary minus
      return binary('^', std::move(base), unary(), at);
    }
    return base;
  }

  Node primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) {
      throw ExpressionError("unexpected end of expression", at);
    }
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node inner = expr();
      if (!accept(')')) {
        throw ExpressionError("missing closing parenthesis", pos_);
      }
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number(at);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      return identifier(at);
    }
    throw ExpressionError(std::string("unexpected character '") + c + "'",
                          at);
  }

  Node number(std::size_t at) {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) {
      throw ExpressionError("malformed number", at);
    }
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    Node n;
    n.kind = Node::Kind::Literal;
    n.value = v;
    n.pos = at;
    return n;
  }

  Node identifier(std::size_t at) {
    std::size_t end = pos_;
    while (end < text_.size() &&
           ((text_[end] >= 'a' && text_[end] <= 'z') ||
            (text_[end] >= 'A' && text_[end] <= 'Z') ||
            (text_[end] >= '0' && text_[end] <= '9') || text_[end] == '_')) {
      ++end;
    }
    std::string name = text_.substr(pos_, end - pos_);
    pos_ = end;
    std::size_t arity = 0;
    if (known_function(name, arity)) {
      if (!accept('(')) {
        throw ExpressionError("function '" + name + "' needs arguments",
                              pos_);
      }
      Node n;
      n.kind = Node::Kind::Call;
      n.name = std::move(name);
      n.pos = at;
      n.args.push_back(expr());
      while (accept(',')) n.args.push_back(expr());
      if (!accept(')')) {
        throw ExpressionError("missing closing parenthesis", pos_);
      }
      if (n.args.size() != arity) {
        throw ExpressionError("function '" + n.name + "' expects " +
                                  std::to_string(arity) + " argument(s)",
                              at);
      }
      return n;
    }
    if (peek() == '(') {
      throw ExpressionError("unknown function '" + name + "'", at);
    }
    Node n;
    n.kind = Node::Kind::Variable;
    n.name = std::move(name);
    n.pos = at;
    return n;
  }

  static Node binary(char op, Node lhs, Node rhs, std::size_t at) {
    Node n;
    n.kind = Node::Kind::Binary;
    n.op = op;
    n.pos = at;
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return n;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, const std::map<std::string, double>& vars) {
  switch (n.kind) {
    case Node::Kind::Literal:
      return n.value;
    case Node::Kind::Variable: {
      if (n.name == "pi") return 3.14159265358979323846;
      const auto it = vars.find(n.name);
      if (it == vars.end()) {
        throw ExpressionError("unbound variable '" + n.name + "'", n.pos);
      }
      return it->second;
    }
    case Node::Kind::Unary:
      return -eval_node(n.args[0], vars);
    case Node::Kind::Binary: {
      const double a = eval_node(n.args[0], vars);
      const double b = eval_node(n.args[1], vars);
      switch (n.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          return a / b;
        default: {
          const double r = std::pow(a, b);
          if (std::isnan(r)) {
            throw ExpressionError("pow out of domain", n.pos);
          }
          return r;
        }
      }
    }
    case Node::Kind::Call: {
      const double a = eval_node(n.args[0], vars);
      if (n.name == "sin") return std::sin(a);
      if (n.name == "cos") return std::cos(a);
      if (n.name == "exp") return std::exp(a);
      if (n.name == "sqrt") {
        if (a < 0.0) {
          throw ExpressionError("sqrt of negative value", n.pos);
        }
        return std::sqrt(a);
      }
      const double b = eval_node(n.args[1], vars);
      const double r = std::pow(a, b);
      if (std::isnan(r)) throw ExpressionError("pow out of domain", n.pos);
      return r;
    }
  }
  throw ExpressionError("corrupt expression tree", n.pos);
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Literal:
      // A bare negative literal would re-parse as unary minus with weaker
      // binding than ^; parenthesize to keep evaluation identical.
      if (std::signbit(n.value)) {
        out += "(";
        out += format_double(n.value);
        out += ")";
      } else {
        out += format_double(n.value);
      }
      return;
    case Node::Kind::Variable:
      out += n.name;
      return;
    case Node::Kind::Unary:
      out += "(-";
      print_node(n.args[0], out);
      out += ")";
      return;
    case Node::Kind::Binary:
      out += "(";
      print_node(n.args[0], out);
      out += n.op;
      print_node(n.args[1], out);
      out += ")";
      return;
    case Node::Kind::Call:
      out += n.name;
      out += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ",";
        print_node(n.args[i], out);
      }
      out += ")";
      return;
  }
}

void collect_variables(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::Variable && n.name != "pi") out.insert(n.name);
  for (const Node& child : n.args) collect_variables(child, out);
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root)
    : root_(std::move(root)) {}

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  return Expression(std::make_shared<const Node>(p.run()));
}

double Expression::eval(const std::map<std::string, double>& bindings) const {
  return eval_node(*root_, bindings);
}

std::string Expression::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

std::vector<std::string> Expression::variables() const {
  std::set<std::string> names;
  collect_variables(*root_, names);
  return {names.begin(), names.end()};
}

}  // namespace fracstar
