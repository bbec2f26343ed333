#include "specmorph/parse.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include "specmorph/error.hpp"

namespace specmorph {

Symbol SymbolTable::declare(const std::string& name, SymbolKind kind) {
  auto it = table_.find(name);
  if (it != table_.end()) {
    if (it->second.kind != kind)
      fail(ErrorKind::parse_error,
           "symbol '" + name + "' already declared with a different kind");
    return it->second;
  }
  Symbol s{name, kind};
  table_.emplace(name, s);
  return s;
}

Symbol SymbolTable::declare_variable(const std::string& name) {
  return declare(name, SymbolKind::variable);
}

Symbol SymbolTable::declare_parameter(const std::string& name) {
  return declare(name, SymbolKind::parameter);
}

Symbol SymbolTable::get_or_declare_parameter(const std::string& name) {
  auto it = table_.find(name);
  if (it != table_.end()) return it->second;
  return declare(name, SymbolKind::parameter);
}

std::optional<Symbol> SymbolTable::lookup(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Token {
  enum class Type { lparen, rparen, atom } type;
  std::string text;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::Type::lparen, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Type::rparen, ")"});
      ++i;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')')
        ++j;
      out.push_back({Token::Type::atom, std::string(text.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Fn> fn_from_name(const std::string& s) {
  static const std::map<std::string, Fn> names = {
      {"sin", Fn::sin},     {"cos", Fn::cos},     {"tan", Fn::tan},
      {"sec", Fn::sec},     {"csc", Fn::csc},     {"cot", Fn::cot},
      {"sinh", Fn::sinh},   {"cosh", Fn::cosh},   {"tanh", Fn::tanh},
      {"sech", Fn::sech},   {"csch", Fn::csch},   {"coth", Fn::coth},
      {"exp", Fn::exp},     {"log", Fn::log},     {"arccos", Fn::arccos},
      {"arctanh", Fn::arctanh}};
  auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, SymbolTable& syms)
      : tokens_(std::move(tokens)), syms_(syms) {}

  Expr parse() {
    Expr e = expr();
    if (pos_ != tokens_.size())
      fail(ErrorKind::parse_error, "trailing tokens after expression");
    return e;
  }

 private:
  const Token& peek() const {
    if (pos_ >= tokens_.size())
      fail(ErrorKind::parse_error, "unexpected end of input");
    return tokens_[pos_];
  }
  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }
  void expect_rparen() {
    if (next().type != Token::Type::rparen)
      fail(ErrorKind::parse_error, "expected ')'");
  }

  std::int64_t int_arg(const char* head) {
    Token t = next();
    auto v = t.type == Token::Type::atom ? parse_int(t.text) : std::nullopt;
    if (!v)
      fail(ErrorKind::parse_error,
           std::string("expected integer argument to ") + head);
    return *v;
  }

  Rational rational_arg() {
    const Token& t = peek();
    if (t.type == Token::Type::atom) {
      auto v = parse_int(t.text);
      if (!v) fail(ErrorKind::parse_error, "expected rational, got " + t.text);
      ++pos_;
      return Rational(*v);
    }
    next();  // '('
    Token head = next();
    if (head.type != Token::Type::atom || head.text != "rat")
      fail(ErrorKind::parse_error, "expected (rat p q)");
    std::int64_t p = int_arg("rat"), q = int_arg("rat");
    expect_rparen();
    return Rational(p, q);
  }

  Expr expr() {
    Token t = next();
    if (t.type == Token::Type::rparen)
      fail(ErrorKind::parse_error, "unexpected ')'");
    if (t.type == Token::Type::atom) return atom(t.text);

    Token head = next();
    if (head.type != Token::Type::atom)
      fail(ErrorKind::parse_error, "expected operator after '('");
    const std::string& op = head.text;

    if (op == "rat") {
      std::int64_t p = int_arg("rat"), q = int_arg("rat");
      expect_rparen();
      return Expr(Rational(p, q));
    }
    if (op == "cplx") {
      Rational re = rational_arg(), im = rational_arg();
      expect_rparen();
      return Expr(CRational(re, im));
    }
    if (op == "add" || op == "mul") {
      std::vector<Expr> kids;
      while (peek().type != Token::Type::rparen) kids.push_back(expr());
      next();
      if (kids.empty())
        fail(ErrorKind::parse_error, "empty " + op + " form");
      return op == "add" ? Expr::sum(std::move(kids))
                         : Expr::product(std::move(kids));
    }
    if (op == "pow") {
      Expr base = expr();
      Rational e = rational_arg();
      expect_rparen();
      return Expr::pow(std::move(base), e);
    }
    if (op == "sqrt") {
      Expr arg = expr();
      expect_rparen();
      return sqrt_of(arg);
    }
    if (auto f = fn_from_name(op)) {
      Expr arg = expr();
      expect_rparen();
      return Expr::apply_fn(*f, std::move(arg));
    }
    fail(ErrorKind::parse_error, "unknown operator '" + op + "'");
  }

  Expr atom(const std::string& text) {
    if (auto v = parse_int(text)) return Expr(*v);
    if (text == "i") return Expr::imaginary_unit();
    return Expr(syms_.get_or_declare_parameter(text));
  }

  std::vector<Token> tokens_;
  SymbolTable& syms_;
  size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, SymbolTable& symbols) {
  return Parser(tokenize(text), symbols).parse();
}

}  // namespace specmorph
