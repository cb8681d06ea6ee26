#include "perfhom/expr.hpp"

#include <cmath>
#include <numbers>
#include <variant>

#include "perfhom/error.hpp"
#include "perfhom/format.hpp"

namespace perfhom {

namespace {

struct Call;
using Arg = std::variant<double, Call>;

struct Call {
  std::string name;
  std::vector<Arg> args;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Call parse() {
    Call c = call();
    skip_space();
    if (pos_ != text_.size()) error("trailing characters");
    return c;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Config, "cannot parse '" + std::string(text_) + "' at offset " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

  Call call() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (start == pos_) error("expected a name");
    Call c{std::string(text_.substr(start, pos_ - start)), {}};
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') error("expected '('");
    ++pos_;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return c;
    }
    // A bracketed list "[a, b]" is flattened into the argument list.
    int depth = 0;
    while (true) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '[') {
        ++pos_;
        ++depth;
        continue;
      }
      c.args.push_back(arg());
      skip_space();
      while (pos_ < text_.size() && text_[pos_] == ']' && depth > 0) {
        ++pos_;
        --depth;
        skip_space();
      }
      if (pos_ >= text_.size()) error("unterminated argument list");
      if (text_[pos_] == ')' && depth == 0) {
        ++pos_;
        return c;
      }
      if (text_[pos_] != ',') error("expected ',' or ')'");
      ++pos_;
    }
  }

  Arg arg() {
    skip_space();
    if (pos_ < text_.size() && ((text_[pos_] >= 'a' && text_[pos_] <= 'z') || text_[pos_] == '_')) {
      // "inf"/"nan" are not accepted as numbers, so any letter starts a call.
      return call();
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != ']') ++pos_;
    return parse_number(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<double> numbers(const Call& c) {
  std::vector<double> out;
  for (const auto& a : c.args) {
    if (!std::holds_alternative<double>(a)) {
      fail(ErrorKind::Config, c.name + "(): expected numeric arguments");
    }
    out.push_back(std::get<double>(a));
  }
  return out;
}

void expect_count(const Call& c, std::size_t n) {
  if (c.args.size() != n) {
    fail(ErrorKind::Config, c.name + "() takes " + std::to_string(n) + " argument(s), got " +
                                std::to_string(c.args.size()));
  }
}

Potential build_potential(const Call& c, int dim) {
  if (c.name == "zero") {
    expect_count(c, 0);
    return Potential::zero();
  }
  if (c.name == "constant") {
    expect_count(c, 1);
    return Potential::constant(numbers(c)[0]);
  }
  if (c.name == "sine_density") {
    expect_count(c, 1);
    return Potential::sine_density(numbers(c)[0]);
  }
  if (c.name == "plane") {
    expect_count(c, 2);
    const auto v = numbers(c);
    return Potential::plane(v[0], v[1]);
  }
  if (c.name == "graph") {
    const auto v = numbers(c);
    const auto m = static_cast<std::size_t>(dim - 1);
    if (v.size() != 2 + m && v.size() != 2 + 2 * m) {
      fail(ErrorKind::Config, "graph() takes weight, c0, " + std::to_string(m) +
                                  " linear and optionally " + std::to_string(m) + " quadratic coefficients");
    }
    std::vector<double> lin(v.begin() + 2, v.begin() + 2 + static_cast<std::ptrdiff_t>(m));
    std::vector<double> quad;
    if (v.size() == 2 + 2 * m) quad.assign(v.begin() + 2 + static_cast<std::ptrdiff_t>(m), v.end());
    return Potential::graph(v[0], v[1], std::move(lin), std::move(quad));
  }
  if (c.name == "sum") {
    std::vector<Potential> parts;
    for (const auto& a : c.args) {
      if (!std::holds_alternative<Call>(a)) fail(ErrorKind::Config, "sum(): arguments must be potentials");
      parts.push_back(build_potential(std::get<Call>(a), dim));
    }
    return Potential::sum(std::move(parts));
  }
  fail(ErrorKind::Config, "unknown potential '" + c.name + "'");
}

}  // namespace

double parse_number(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_double(text);
  const double num = parse_double(trim(text.substr(0, slash)));
  const double den = parse_double(trim(text.substr(slash + 1)));
  if (den == 0.0) fail(ErrorKind::Config, "zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item));
  return out;
}

Potential parse_potential(std::string_view text, int dim) {
  return build_potential(Parser(text).parse(), dim);
}

Source parse_source(std::string_view text, int dim) {
  const Call c = Parser(text).parse();
  if (c.name == "zero") {
    expect_count(c, 0);
    return {[](std::span<const double>) { return 0.0; }, "zero()"};
  }
  if (c.name == "constant") {
    expect_count(c, 1);
    const double v = numbers(c)[0];
    return {[v](std::span<const double>) { return v; }, "constant(" + format_shortest(v) + ")"};
  }
  if (c.name == "sine") {
    expect_count(c, static_cast<std::size_t>(dim) + 1);
    const auto v = numbers(c);
    std::string desc = "sine(" + format_shortest(v[0]);
    for (std::size_t k = 1; k < v.size(); ++k) desc += ", " + format_shortest(v[k]);
    desc += ")";
    return {[v](std::span<const double> x) {
              double p = v[0];
              for (std::size_t k = 0; k < x.size(); ++k) p *= std::sin(v[k + 1] * std::numbers::pi * x[k]);
              return p;
            },
            desc};
  }
  fail(ErrorKind::Config, "unknown source '" + c.name + "'");
}

}  // namespace perfhom
