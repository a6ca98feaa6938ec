#include "gmbe/io.hpp"

#include "gmbe/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gmbe {

namespace {

struct Token {
  std::string_view text;
  int line;
};

class Tokens {
 public:
  explicit Tokens(std::string_view text) {
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        ++i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else {
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        tokens_.push_back({text.substr(start, i - start), line});
      }
    }
    last_line_ = line;
  }

  bool done() const { return pos_ >= tokens_.size(); }

  Token next(const char* expected) {
    if (done())
      throw Error(ErrorKind::ParseError, "line " + std::to_string(last_line_) +
                                             ": unexpected end of file, expected " + expected);
    return tokens_[pos_++];
  }

  long long integer(const char* expected, long long lo, long long hi) {
    const Token t = next(expected);
    long long v = 0;
    const auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || end != t.text.data() + t.text.size() || v < lo || v > hi)
      fail(t, expected);
    return v;
  }

  double real(const char* expected) {
    const Token t = next(expected);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || end != t.text.data() + t.text.size() || !std::isfinite(v))
      fail(t, expected);
    return v;
  }

  [[noreturn]] static void fail(const Token& t, const char* expected) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(t.line) + ": token '" +
                                           std::string(t.text) + "', expected " + expected);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
};

}  // namespace

FactorGraph parse_uai(std::string_view text) {
  Tokens in(text);
  const Token preamble = in.next("preamble");
  if (preamble.text == "BAYES")
    throw Error(ErrorKind::UnsupportedPreamble, "BAYES networks are not supported");
  if (preamble.text != "MARKOV") Tokens::fail(preamble, "MARKOV");

  constexpr long long kMax = 1 << 30;
  const int n = static_cast<int>(in.integer("variable count", 1, kMax));
  std::vector<int> cards(n);
  for (int& d : cards) d = static_cast<int>(in.integer("cardinality", 1, kMax));
  const int m = static_cast<int>(in.integer("factor count", 0, kMax));
  std::vector<std::vector<VariableId>> scopes(m);
  for (auto& s : scopes) {
    const int arity = static_cast<int>(in.integer("arity", 0, n));
    for (int k = 0; k < arity; ++k) s.push_back(static_cast<VariableId>(in.integer("variable id", 0, n - 1)));
  }
  std::vector<Factor> factors;
  for (int a = 0; a < m; ++a) {
    std::vector<int> fc;
    long long size = 1;
    for (VariableId v : scopes[a]) {
      fc.push_back(cards[v]);
      size *= cards[v];
      if (size > (1LL << 28))
        throw Error(ErrorKind::ParseError, "factor " + std::to_string(a) + " table is too large");
    }
    const Token count = in.next("table size");
    {
      long long declared = -1;
      const auto [end, ec] =
          std::from_chars(count.text.data(), count.text.data() + count.text.size(), declared);
      if (ec != std::errc() || end != count.text.data() + count.text.size() || declared != size)
        Tokens::fail(count, ("table size " + std::to_string(size)).c_str());
    }
    Eigen::ArrayXd values(size);
    for (long long i = 0; i < size; ++i) {
      values[i] = in.real("non-negative table value");
      if (values[i] < 0)
        throw Error(ErrorKind::ParseError, "factor " + std::to_string(a) + " has a negative value");
    }
    try {
      factors.push_back(Factor::from_linear(scopes[a], fc, values));
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, "factor " + std::to_string(a) + ": " + e.what());
    }
  }
  if (!in.done()) Tokens::fail(in.next(""), "end of file");
  try {
    return FactorGraph(std::move(cards), std::move(factors));
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::string emit_uai(const FactorGraph& g) {
  if (g.has_negative()) throw Error(ErrorKind::NegativeValues, "UAI tables must be non-negative");
  std::ostringstream os;
  os << "MARKOV\n" << g.num_vars() << '\n';
  for (int v = 0; v < g.num_vars(); ++v) os << (v ? " " : "") << g.card(v);
  os << '\n' << g.num_factors() << '\n';
  for (const Factor& f : g.factors()) {
    os << f.arity();
    for (VariableId v : f.scope()) os << ' ' << v;
    os << '\n';
  }
  char buf[32];
  for (const Factor& f : g.factors()) {
    os << '\n' << f.size() << '\n';
    const Eigen::ArrayXd lin = f.to_linear();
    for (Eigen::Index i = 0; i < lin.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", lin[i]);
      os << (i ? " " : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string emit_csv(const std::vector<ResultRow>& rows, bool timing) {
  std::string out =
      "model,method,ibound,t,seed,direction,log_bound,ref_log_z,metric_kind,metric,iterations,"
      "wall_time,status\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const ResultRow& r : rows) {
    out += csv_field(r.model) + ',' + csv_field(r.method) + ',' + std::to_string(r.ibound) + ',' +
           num(r.t) + ',' + std::to_string(r.seed) + ',' + csv_field(r.direction) + ',' +
           num(r.log_bound) + ',' + (r.ref_log_z ? num(*r.ref_log_z) : "") + ',' +
           csv_field(r.metric_kind) + ',' + (r.metric() ? num(*r.metric()) : "") + ',' +
           std::to_string(r.iterations) + ',' + (timing ? num(r.wall_time) : "") + ',' + csv_field(r.status) + '\n';
  }
  return out;
}

}  // namespace gmbe
