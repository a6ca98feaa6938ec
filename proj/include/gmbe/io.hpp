#pragma once

#include "gmbe/factor_graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gmbe {

/// UAI 2014 MARKOV text. Factors keep their declaration order; tables are
/// row-major with the last scope variable fastest, as in the format.
/// Throws ParseError (with line and token) or UnsupportedPreamble.
FactorGraph parse_uai(std::string_view text);

/// Canonical UAI text, values printed with 17 significant digits.
/// Throws NegativeValues if any entry is negative.
std::string emit_uai(const FactorGraph& g);

struct ResultRow {
  std::string model;
  std::string method;
  int ibound = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::string direction;
  double log_bound = 0.0;
  std::optional<double> ref_log_z;  // exact log Z or log Z_MBE, per metric_kind
  std::string metric_kind;          // "log(Z_UB/Z)" or "log(Z_UB/Z_MBE)"
  double wall_time = 0.0;
  int iterations = 0;
  std::string status = "ok";

  std::optional<double> metric() const {
    if (!ref_log_z) return std::nullopt;
    return log_bound - *ref_log_z;
  }
};

/// Header plus one line per row, quoted per RFC 4180. Without `timing` the
/// wall_time column is left empty so that reruns are byte-identical.
std::string emit_csv(const std::vector<ResultRow>& rows, bool timing = true);

std::string csv_field(std::string_view s);

}  // namespace gmbe
