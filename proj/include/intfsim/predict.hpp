#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "intfsim/colocation.hpp"

namespace intfsim {

inline constexpr int kNumFeatures = 6;
inline constexpr int kNumParams = kNumFeatures + 1;  // weights plus intercept

using ParamVector = Eigen::Matrix<double, kNumParams, 1>;
using ParamMatrix = Eigen::Matrix<double, kNumParams, kNumParams>;

/// y_hat = w . x + b
struct LinearModel {
  FeatureVector w{};
  double b = 0.0;

  ParamVector params() const;
  static LinearModel from_params(const ParamVector& theta);
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

double predict(const LinearModel& model, const FeatureVector& x);

/// [x; 1]
ParamVector augment(const FeatureVector& x);

/// Z^T Z over augmented features.
ParamMatrix gram_matrix(std::span<const Sample> samples);

struct OlsOptions {
  bool ridge_fallback = true;
  double ridge = 1e-8;
};

struct OlsFit {
  LinearModel model;
  ParamMatrix gram;  // Z^T Z, plus the ridge term when it was needed
  bool used_ridge = false;
};

/// Least squares with intercept. Rank-deficient designs fall back to a
/// ridge solve of the normal equations when enabled, otherwise throw.
OlsFit fit_ols_detailed(std::span<const Sample> samples, OlsOptions options = {});
LinearModel fit_ols(std::span<const Sample> samples, OlsOptions options = {});

struct SgdState {
  LinearModel model;
  double eta = 0.01;
};

/// One LMS step on the squared error: w += eta * e * x, b += eta * e.
void sgd_update(SgdState& state, const Sample& sample);

struct RlsState {
  LinearModel model;
  ParamMatrix P = ParamMatrix::Identity() * 100.0;  // inverse-covariance over [x; 1]
  double lambda = 0.99;                             // forgetting factor
  double reset_delta = 100.0;
  int resets = 0;
};

/// Exponentially weighted recursive least squares step. If P stops being
/// positive definite it is reset to reset_delta * I (counted in `resets`).
void rls_update(RlsState& state, const Sample& sample);

/// RLS initialised from an OLS fit: same weights, P = (Z^T Z)^-1.
RlsState rls_warm_start(const OlsFit& fit, double lambda, double reset_delta = 100.0);

using Predictor = std::variant<LinearModel, SgdState, RlsState>;

std::string method_name(const Predictor& p);
const LinearModel& current_model(const Predictor& p);

/// Scores the sample with the current parameters, then (online only)
/// updates on it. Returns the pre-update prediction.
double prequential_step(Predictor& predictor, const Sample& sample, bool online);

struct EvalReport {
  double mse = 0.0;
  double rel_p25 = 0.0;
  double rel_p50 = 0.0;
  double rel_p75 = 0.0;
  double rel_p95 = 0.0;
  std::size_t n_samples = 0;
};

/// Offline scoring leaves the predictor untouched; online scoring is
/// prequential. Relative error is |y_hat - y| / y.
EvalReport evaluate(Predictor& predictor, std::span<const Sample> samples, bool online);

/// Quantile summary from raw predictions.
EvalReport summarize_errors(std::span<const double> predictions, std::span<const Sample> samples);

inline constexpr const char* kEvalCsvHeader =
    "dataset,method,mse,rel_p25,rel_p50,rel_p75,rel_p95,n_samples";
void write_eval_row(std::ostream& out, const std::string& dataset, const std::string& method,
                    const EvalReport& r);

/// Small JSON file with "w" and "b" for warm-start handoff.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace intfsim
