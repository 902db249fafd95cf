#include "intfsim/predict.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "intfsim/csv.hpp"
#include "intfsim/metrics.hpp"

namespace intfsim {

ParamVector LinearModel::params() const {
  ParamVector theta;
  for (int j = 0; j < kNumFeatures; ++j) theta(j) = w[j];
  theta(kNumFeatures) = b;
  return theta;
}

LinearModel LinearModel::from_params(const ParamVector& theta) {
  LinearModel m;
  for (int j = 0; j < kNumFeatures; ++j) m.w[j] = theta(j);
  m.b = theta(kNumFeatures);
  return m;
}

double predict(const LinearModel& model, const FeatureVector& x) {
  double y = model.b;
  for (int j = 0; j < kNumFeatures; ++j) y += model.w[j] * x[j];
  return y;
}

ParamVector augment(const FeatureVector& x) {
  ParamVector z;
  for (int j = 0; j < kNumFeatures; ++j) z(j) = x[j];
  z(kNumFeatures) = 1.0;
  return z;
}

ParamMatrix gram_matrix(std::span<const Sample> samples) {
  ParamMatrix g = ParamMatrix::Zero();
  for (const auto& s : samples) {
    const ParamVector z = augment(s.x);
    g.noalias() += z * z.transpose();
  }
  return g;
}

OlsFit fit_ols_detailed(std::span<const Sample> samples, OlsOptions options) {
  if (samples.size() < static_cast<std::size_t>(kNumParams)) {
    throw Error("fit_ols needs at least " + std::to_string(kNumParams) + " samples, got " +
                std::to_string(samples.size()));
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd Z(n, kNumParams);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Z.row(i) = augment(samples[static_cast<std::size_t>(i)].x).transpose();
    y(i) = samples[static_cast<std::size_t>(i)].y;
  }

  OlsFit fit;
  fit.gram = Z.transpose() * Z;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  if (qr.rank() == kNumParams) {
    fit.model = LinearModel::from_params(qr.solve(y));
    return fit;
  }
  if (!options.ridge_fallback) {
    throw Error("fit_ols: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                " of " + std::to_string(kNumParams) + ")");
  }
  fit.gram += options.ridge * ParamMatrix::Identity();
  fit.used_ridge = true;
  fit.model = LinearModel::from_params(fit.gram.ldlt().solve(Z.transpose() * y));
  return fit;
}

LinearModel fit_ols(std::span<const Sample> samples, OlsOptions options) {
  return fit_ols_detailed(samples, options).model;
}

void sgd_update(SgdState& state, const Sample& sample) {
  const double e = sample.y - predict(state.model, sample.x);
  for (int j = 0; j < kNumFeatures; ++j) state.model.w[j] += state.eta * e * sample.x[j];
  state.model.b += state.eta * e;
  if (!state.model.params().allFinite()) {
    throw Error("SGD diverged (non-finite parameters) with eta = " + csv::fmt(state.eta));
  }
}

void rls_update(RlsState& state, const Sample& sample) {
  const ParamVector z = augment(sample.x);
  ParamVector theta = state.model.params();
  const ParamVector Pz = state.P * z;
  const double denom = state.lambda + z.dot(Pz);
  const ParamVector k = Pz / denom;
  const double e = sample.y - theta.dot(z);
  theta += k * e;
  ParamMatrix P = (state.P - k * Pz.transpose()) / state.lambda;
  P = 0.5 * (P + P.transpose());

  Eigen::LLT<ParamMatrix> llt(P);
  if (!(denom > 0.0) || llt.info() != Eigen::Success || !P.allFinite()) {
    std::clog << "warning: RLS gain matrix lost positive definiteness; resetting to "
              << state.reset_delta << " * I\n";
    P = ParamMatrix::Identity() * state.reset_delta;
    ++state.resets;
  }
  state.P = P;
  state.model = LinearModel::from_params(theta);
}

RlsState rls_warm_start(const OlsFit& fit, double lambda, double reset_delta) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error("RLS forgetting factor must lie in (0, 1]");
  RlsState s;
  s.model = fit.model;
  s.lambda = lambda;
  s.reset_delta = reset_delta;
  s.P = fit.gram.inverse();
  s.P = 0.5 * (s.P + s.P.transpose());
  return s;
}

std::string method_name(const Predictor& p) {
  switch (p.index()) {
    case 0: return "offline";
    case 1: return "sgd";
    default: return "rls";
  }
}

const LinearModel& current_model(const Predictor& p) {
  if (auto* m = std::get_if<LinearModel>(&p)) return *m;
  if (auto* s = std::get_if<SgdState>(&p)) return s->model;
  return std::get<RlsState>(p).model;
}

double prequential_step(Predictor& predictor, const Sample& sample, bool online) {
  const double y_hat = predict(current_model(predictor), sample.x);
  if (online) {
    if (auto* s = std::get_if<SgdState>(&predictor)) sgd_update(*s, sample);
    if (auto* r = std::get_if<RlsState>(&predictor)) rls_update(*r, sample);
  }
  return y_hat;
}

EvalReport summarize_errors(std::span<const double> predictions, std::span<const Sample> samples) {
  if (samples.empty()) throw Error("evaluation over no samples");
  if (predictions.size() != samples.size()) throw Error("prediction/sample count mismatch");
  std::vector<double> rel(samples.size());
  double sse = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = predictions[i] - samples[i].y;
    sse += e * e;
    rel[i] = std::abs(e) / samples[i].y;
  }
  EvalReport r;
  r.n_samples = samples.size();
  r.mse = sse / static_cast<double>(samples.size());
  r.rel_p25 = percentile(rel, 25);
  r.rel_p50 = percentile(rel, 50);
  r.rel_p75 = percentile(rel, 75);
  r.rel_p95 = percentile(rel, 95);
  return r;
}

EvalReport evaluate(Predictor& predictor, std::span<const Sample> samples, bool online) {
  if (samples.empty()) throw Error("evaluation over no samples");
  std::vector<double> preds;
  preds.reserve(samples.size());
  for (const auto& s : samples) preds.push_back(prequential_step(predictor, s, online));
  return summarize_errors(preds, samples);
}

void write_eval_row(std::ostream& out, const std::string& dataset, const std::string& method,
                    const EvalReport& r) {
  out << dataset << ',' << method << ',' << csv::fmt(r.mse) << ',' << csv::fmt(r.rel_p25) << ','
      << csv::fmt(r.rel_p50) << ',' << csv::fmt(r.rel_p75) << ',' << csv::fmt(r.rel_p95) << ','
      << r.n_samples << '\n';
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["w"] = model.w;
  j["b"] = model.b;
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path.string());
  out << j.dump(2) << '\n';
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path.string());
  try {
    auto j = nlohmann::json::parse(in);
    LinearModel m;
    m.w = j.at("w").get<FeatureVector>();
    m.b = j.at("b").get<double>();
    if (!m.params().allFinite()) throw Error("non-finite parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace intfsim
