#pragma once

#include <string_view>

#include "nnqft/eft.hpp"

namespace nnqft {

/// M0 fits nothing, M1 lambda0, M2 (lambda0, lambda2), M3 adds lambda_nl.
enum class FitModel { M0, M1, M2, M3 };

std::string_view to_string(FitModel m);
FitModel parse_fit_model(std::string_view name);
int coupling_count(FitModel m);

/// Coefficients of each coupling in the 4-point deviation over a grid.
struct FeatureTensors {
  SymmetricTensor t0;   // 24 int prod K_W
  SymmetricTensor t2;   // 24 int |y|^2 prod K_W
  SymmetricTensor tnl;  // 8 int int, three pairings of two legs at x and two at y
  double cutoff = 0.0;
  double nl_cutoff = 0.0;  // box used for tnl
};

/// The non-local double integral factorizes into products of two-leg
/// integrals. For an infinite cutoff tnl uses a box of 10 kernel lengths.
FeatureTensors build_features(const KernelModel& kernel, const InputGrid& grid, double cutoff,
                              const QuadratureSpec& quad);

struct FitReport {
  FitModel model = FitModel::M0;
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  double lambda_nl = 0.0;
  double cutoff = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double test_mape = 0.0;
  int test_excluded = 0;
};

/// Model deviation lambda0 T0 + lambda2 T2 + lambda_nl TNL.
SymmetricTensor predict_dg4(const FitReport& report, const FeatureTensors& features);

/// Least squares over unique elements via column-pivoted QR on
/// column-normalized features. Throws CollinearFeatures when rank deficient,
/// InsufficientPoints with fewer elements than couplings.
FitReport fit_model(FitModel model, const SymmetricTensor& dg4, const FeatureTensors& features);

/// Plain gradient descent on the same objective, for cross-checking.
FitReport fit_model_gradient(FitModel model, const SymmetricTensor& dg4,
                             const FeatureTensors& features, int max_iterations = 1'000'000,
                             double tolerance = 1e-14);

struct Evaluation {
  double mse = 0.0;
  double mape = 0.0;  // percent
  int excluded = 0;   // elements with zero measured deviation
};

Evaluation evaluate(const FitReport& report, const SymmetricTensor& dg4,
                    const FeatureTensors& features);

/// Fills the report's test fields.
void apply_evaluation(FitReport& report, const Evaluation& e);

}  // namespace nnqft
