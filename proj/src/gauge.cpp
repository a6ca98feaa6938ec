#include "gmbe/gauge.hpp"

#include "gmbe/error.hpp"
#include "gmbe/rng.hpp"

#include <ostream>
#include <string>

namespace gmbe {

GaugeSet GaugeSet::identity(const ForneyGraph& g) {
  GaugeSet gs;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    gs.free.push_back(Matrix::Identity(g.card(v), g.card(v)));
    gs.conjugate.push_back(Matrix::Identity(g.card(v), g.card(v)));
  }
  return gs;
}

const Matrix& GaugeSet::on_edge(const ForneyGraph& g, VariableId v, FactorId a) const {
  const auto [alpha, beta] = g.edges(v);
  if (a == alpha) return free[v];
  if (a == beta) return conjugate[v];
  throw Error(ErrorKind::InvalidArgument,
              "factor " + std::to_string(a) + " is not adjacent to variable " + std::to_string(v));
}

void GaugeSet::set_free(VariableId v, const Matrix& G) {
  free[v] = G;
  conjugate[v] = conjugate_of(G);
}

Reparam Reparam::zero(const ForneyGraph& g) {
  Reparam r;
  for (VariableId v = 0; v < g.num_vars(); ++v) r.free.push_back(Eigen::VectorXd::Zero(g.card(v)));
  return r;
}

double condition_number(const Matrix& G) {
  Eigen::JacobiSVD<Matrix> svd(G);
  const auto& s = svd.singularValues();
  const double smallest = s[s.size() - 1];
  return smallest == 0.0 ? kPosInf : s[0] / smallest;
}

Matrix conjugate_of(const Matrix& G, double max_condition) {
  const double cond = condition_number(G);
  if (!(cond <= max_condition))
    throw Error(ErrorKind::SingularMatrix, "gauge condition number " + std::to_string(cond));
  if (G.rows() == 2) {
    // Closed form for the common binary case: (G^T)^{-1} = adj(G)^T / det.
    const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
    Matrix out(2, 2);
    out << G(1, 1), -G(1, 0), -G(0, 1), G(0, 0);
    return out / det;
  }
  return G.transpose().partialPivLu().inverse();
}

Factor gauge_transform_axis(const Factor& f, int pos, const Matrix& G) {
  const int d = f.cards()[pos];
  if (G.rows() != d || G.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "gauge size does not match variable cardinality");
  // Work in linear domain relative to the largest magnitude.
  const double shift = f.size() > 0 ? f.log_abs().maxCoeff() : 0.0;
  if (shift == kNegInf) return f;
  Eigen::ArrayXd lin(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    lin[i] = f.sign()[i] == 0 ? 0.0 : f.sign()[i] * std::exp(f.log_abs()[i] - shift);

  const Eigen::Index stride = f.stride(pos);
  const Eigen::Index outer = f.size() / (stride * d);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index s = 0; s < stride; ++s) {
      const Eigen::Index base = o * stride * d + s;
      for (int x = 0; x < d; ++x) {
        double acc = 0.0;
        for (int xp = 0; xp < d; ++xp) acc += G(x, xp) * lin[base + xp * stride];
        out[base + x * stride] = acc;
      }
    }
  }
  SignArray sign(f.size());
  Eigen::ArrayXd log_abs(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    sign[i] = out[i] > 0 ? 1 : (out[i] < 0 ? -1 : 0);
    log_abs[i] = sign[i] == 0 ? kNegInf : std::log(std::abs(out[i])) + shift;
  }
  return Factor(f.scope(), f.cards(), std::move(log_abs), std::move(sign));
}

Factor gauge_transform_factor(const Factor& f, const std::vector<Matrix>& gauges) {
  if (static_cast<int>(gauges.size()) != f.arity())
    throw Error(ErrorKind::DimensionMismatch, "need one gauge per scope variable");
  Factor out = f;
  for (int k = 0; k < f.arity(); ++k) out = gauge_transform_axis(out, k, gauges[k]);
  return out;
}

double conjugacy_deviation(const Matrix& A, const Matrix& B) {
  return (A.transpose() * B - Matrix::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff();
}

ConstraintReport check_constraint(const ForneyGraph& g, const GaugeSet& gs) {
  ConstraintReport report;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const double dev = conjugacy_deviation(gs.free[v], gs.conjugate[v]);
    report.deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

ForneyGraph apply_gauges(const ForneyGraph& g, const GaugeSet& gs) {
  const auto report = check_constraint(g, gs);
  if (!(report.max_deviation < 1e-8))
    throw Error(ErrorKind::ConstraintViolated,
                "gauge constraint deviation " + std::to_string(report.max_deviation));
  ForneyGraph out = g;
  for (FactorId a = 0; a < g.num_factors(); ++a) {
    const Factor& f = g.factor(a);
    std::vector<Matrix> gauges;
    for (VariableId v : f.scope()) gauges.push_back(gs.on_edge(g, v, a));
    out.set_factor(a, gauge_transform_factor(f, gauges));
  }
  return out;
}

GaugeSet random_valid_gauges(const ForneyGraph& g, double scale, std::uint64_t seed) {
  if (!(scale >= 0)) throw Error(ErrorKind::InvalidArgument, "scale must be non-negative");
  Rng rng(seed);
  GaugeSet gs = GaugeSet::identity(g);
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const int d = g.card(v);
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Matrix G = Matrix::Identity(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) += scale * rng.uniform(-1.0, 1.0);
      if (condition_number(G) < 1e3) {
        gs.set_free(v, G);
        ok = true;
      }
    }
    if (!ok)
      throw Error(ErrorKind::GenerationFailed,
                  "no well-conditioned gauge for variable " + std::to_string(v));
  }
  return gs;
}

GaugeSet reparam_as_gauges(const ForneyGraph& g, const Reparam& r) {
  GaugeSet gs = GaugeSet::identity(g);
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    gs.free[v] = r.free[v].array().exp().matrix().asDiagonal();
    gs.conjugate[v] = (-r.free[v].array()).exp().matrix().asDiagonal();
  }
  return gs;
}

void write_gauges(std::ostream& os, const ForneyGraph& g, const GaugeSet& gs) {
  os.precision(17);
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const auto [alpha, beta] = g.edges(v);
    for (auto [a, M] : {std::pair{alpha, &gs.free[v]}, std::pair{beta, &gs.conjugate[v]}}) {
      os << v << ' ' << a << ' ' << M->rows();
      for (Eigen::Index i = 0; i < M->rows(); ++i)
        for (Eigen::Index j = 0; j < M->cols(); ++j) os << ' ' << (*M)(i, j);
      os << '\n';
    }
  }
}

}  // namespace gmbe
