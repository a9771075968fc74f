#include "nnqft/coupling_fit.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace nnqft {

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::M0: return "m0";
    case FitModel::M1: return "m1";
    case FitModel::M2: return "m2";
    case FitModel::M3: return "m3";
  }
  return "unknown";
}

FitModel parse_fit_model(std::string_view name) {
  if (name == "m0" || name == "M0") return FitModel::M0;
  if (name == "m1" || name == "M1") return FitModel::M1;
  if (name == "m2" || name == "M2") return FitModel::M2;
  if (name == "m3" || name == "M3") return FitModel::M3;
  throw Error(ErrorCode::Config, "unknown fit model '" + std::string(name) + "'");
}

int coupling_count(FitModel m) { return static_cast<int>(m); }

FeatureTensors build_features(const KernelModel& kernel, const InputGrid& grid, double cutoff,
                              const QuadratureSpec& quad) {
  FeatureTensors f;
  f.cutoff = cutoff;
  f.nl_cutoff = std::isinf(cutoff) ? 10.0 * kernel.length_scale() : cutoff;
  auto scaled = [](SymmetricTensor t, double c) {
    for (auto& v : t.values()) v *= c;
    return t;
  };
  f.t0 = scaled(vertex_tensor(kernel, grid, 4, VertexWeight::One, cutoff, quad), 24.0);
  f.t2 = scaled(vertex_tensor(kernel, grid, 4, VertexWeight::NormSq, cutoff, quad), 24.0);

  const auto pair = vertex_tensor(kernel, grid, 2, VertexWeight::One, f.nl_cutoff, quad);
  f.tnl = SymmetricTensor(grid.size(), 4);
  for (std::size_t m = 0; m < f.tnl.size(); ++m) {
    const auto& i = f.tnl.indices(m);
    const double s = pair.at({i[0], i[1]}) * pair.at({i[2], i[3]}) +
                     pair.at({i[0], i[2]}) * pair.at({i[1], i[3]}) +
                     pair.at({i[0], i[3]}) * pair.at({i[1], i[2]});
    f.tnl[m] = 8.0 * s;
  }
  return f;
}

namespace {

const SymmetricTensor& feature(const FeatureTensors& f, int c) {
  switch (c) {
    case 0: return f.t0;
    case 1: return f.t2;
    default: return f.tnl;
  }
}

void check_shapes(const SymmetricTensor& dg4, const FeatureTensors& f) {
  SymmetricTensor::check_same_shape(dg4, f.t0);
  SymmetricTensor::check_same_shape(dg4, f.t2);
  SymmetricTensor::check_same_shape(dg4, f.tnl);
}

struct Design {
  Eigen::MatrixXd a;      // column-normalized features
  Eigen::VectorXd scale;  // column norms
  Eigen::VectorXd b;
};

Design design(int k, const SymmetricTensor& dg4, const FeatureTensors& f) {
  const auto n = static_cast<Eigen::Index>(dg4.size());
  Design d;
  d.a.resize(n, k);
  d.scale.resize(k);
  d.b.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) d.b(r) = dg4[static_cast<std::size_t>(r)];
  for (int c = 0; c < k; ++c) {
    const auto& t = feature(f, c);
    for (Eigen::Index r = 0; r < n; ++r) d.a(r, c) = t[static_cast<std::size_t>(r)];
    const double norm = d.a.col(c).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::CollinearFeatures, "feature column " + std::to_string(c) +
                                                    " is zero or non-finite");
    }
    d.scale(c) = norm;
    d.a.col(c) /= norm;
  }
  return d;
}

void store(FitReport& r, const Eigen::VectorXd& x) {
  if (x.size() > 0) r.lambda0 = x(0);
  if (x.size() > 1) r.lambda2 = x(1);
  if (x.size() > 2) r.lambda_nl = x(2);
}

double mse(const SymmetricTensor& a, const SymmetricTensor& f) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += (a[m] - f[m]) * (a[m] - f[m]);
  return s / static_cast<double>(a.size());
}

void check_counts(FitModel model, const SymmetricTensor& dg4) {
  if (static_cast<int>(dg4.size()) < coupling_count(model)) {
    throw Error(ErrorCode::InsufficientPoints, "fewer tensor elements than couplings");
  }
}

}  // namespace

SymmetricTensor predict_dg4(const FitReport& report, const FeatureTensors& features) {
  SymmetricTensor out(features.t0.dim(), 4);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = report.lambda0 * features.t0[m] + report.lambda2 * features.t2[m] +
             report.lambda_nl * features.tnl[m];
  }
  return out;
}

FitReport fit_model(FitModel model, const SymmetricTensor& dg4, const FeatureTensors& features) {
  check_shapes(dg4, features);
  check_counts(model, dg4);
  FitReport r;
  r.model = model;
  r.cutoff = features.cutoff;
  const int k = coupling_count(model);
  if (k > 0) {
    const Design d = design(k, dg4, features);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.a);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
      throw Error(ErrorCode::CollinearFeatures,
                  std::string(to_string(model)) + " features are linearly dependent on this grid");
    }
    Eigen::VectorXd x = qr.solve(d.b);
    store(r, x.cwiseQuotient(d.scale));
  }
  r.train_mse = mse(dg4, predict_dg4(r, features));
  return r;
}

FitReport fit_model_gradient(FitModel model, const SymmetricTensor& dg4,
                             const FeatureTensors& features, int max_iterations,
                             double tolerance) {
  check_shapes(dg4, features);
  check_counts(model, dg4);
  FitReport r;
  r.model = model;
  r.cutoff = features.cutoff;
  const int k = coupling_count(model);
  if (k > 0) {
    const Design d = design(k, dg4, features);
    const Eigen::MatrixXd h = d.a.transpose() * d.a;
    const Eigen::VectorXd g0 = d.a.transpose() * d.b;
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
    const double step = 1.0 / lmax;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    for (int it = 0; it < max_iterations; ++it) {
      const Eigen::VectorXd grad = h * x - g0;
      x -= step * grad;
      if (grad.norm() <= tolerance * std::max(1.0, g0.norm())) break;
    }
    store(r, x.cwiseQuotient(d.scale));
  }
  r.train_mse = mse(dg4, predict_dg4(r, features));
  return r;
}

Evaluation evaluate(const FitReport& report, const SymmetricTensor& dg4,
                    const FeatureTensors& features) {
  check_shapes(dg4, features);
  const auto pred = predict_dg4(report, features);
  Evaluation e;
  e.mse = mse(dg4, pred);
  double sum = 0.0;
  int used = 0;
  for (std::size_t m = 0; m < dg4.size(); ++m) {
    if (dg4[m] == 0.0) {
      ++e.excluded;
      continue;
    }
    sum += std::abs(dg4[m] - pred[m]) / std::abs(dg4[m]);
    ++used;
  }
  e.mape = used > 0 ? 100.0 * sum / used : 0.0;
  return e;
}

void apply_evaluation(FitReport& report, const Evaluation& e) {
  report.test_mse = e.mse;
  report.test_mape = e.mape;
  report.test_excluded = e.excluded;
}

}  // namespace nnqft
