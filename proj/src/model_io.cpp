#include "stmtmv/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "stmtmv/baselines.hpp"
#include "stmtmv/errors.hpp"

namespace stmtmv::harness {

StandardizeStats StandardizeStats::fit(const solver::StationDataset& data) {
  data.validate();
  const int D = data.dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(D);
  long n = 0;
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::MatrixXd X = data.full_matrix(l);
    sum += X.colwise().sum();
    sumsq += X.array().square().colwise().sum().matrix();
    n += X.rows();
  }
  StandardizeStats st;
  st.mean = sum / static_cast<double>(n);
  Eigen::VectorXd var = sumsq / static_cast<double>(n) - st.mean.array().square().matrix();
  st.scale = var.array().max(0.0).sqrt();
  for (int j = 0; j < D; ++j) {
    if (st.scale(j) <= 1e-12) st.scale(j) = 1.0;
  }
  return st;
}

Eigen::MatrixXd StandardizeStats::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) throw InvalidInput("standardize: column count mismatch");
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

solver::StationDataset StandardizeStats::apply(const solver::StationDataset& data) const {
  solver::StationDataset out = data;
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::MatrixXd X = apply(data.full_matrix(l));
    out.Xs[l] = X.leftCols(data.Ds);
    out.Xt[l] = X.rightCols(data.Dt);
  }
  return out;
}

Eigen::VectorXd ModelFile::predict(const Eigen::MatrixXd& X_raw, int l) const {
  if (l < 0 || l >= W.cols()) throw InvalidInput("ModelFile::predict: station index out of range");
  const Eigen::MatrixXd X = standardize.apply(X_raw);
  Eigen::VectorXd out = uses_late_fusion() ? solver::predict(X, W.col(l))
                                           : baselines::baseline_predict(X, W.col(l));
  if (y_offset.size() == W.cols()) out.array() += y_offset(l);
  return out;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ParseError("model file: ragged weight matrix");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace

void ModelFile::save(const std::string& path) const {
  nlohmann::json j;
  j["format_version"] = version;
  j["kind"] = kind;
  j["Ds"] = Ds;
  j["Dt"] = Dt;
  j["station_ids"] = station_ids;
  j["W"] = matrix_to_json(W);
  j["standardize"]["mean"] = vector_to_json(standardize.mean);
  j["standardize"]["scale"] = vector_to_json(standardize.scale);
  j["y_offset"] = vector_to_json(y_offset);
  j["params"] = {{"lambda", lambda}, {"gamma", gamma}, {"theta", theta}, {"alpha", alpha}};
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write model file '" + path + "'");
  out << j.dump(2) << "\n";
}

ModelFile ModelFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
  try {
    ModelFile m;
    m.version = j.at("format_version").get<int>();
    if (m.version != 1) {
      throw ParseError("model file '" + path + "': unsupported version " +
                       std::to_string(m.version));
    }
    m.kind = j.at("kind").get<std::string>();
    m.Ds = j.at("Ds").get<int>();
    m.Dt = j.at("Dt").get<int>();
    m.station_ids = j.at("station_ids").get<std::vector<std::string>>();
    m.W = matrix_from_json(j.at("W"));
    m.standardize.mean = vector_from_json(j.at("standardize").at("mean"));
    m.standardize.scale = vector_from_json(j.at("standardize").at("scale"));
    if (j.contains("y_offset")) m.y_offset = vector_from_json(j.at("y_offset"));
    m.lambda = j.at("params").value("lambda", 0.0);
    m.gamma = j.at("params").value("gamma", 0.0);
    m.theta = j.at("params").value("theta", 0.0);
    m.alpha = j.at("params").value("alpha", 0.0);
    if (m.W.rows() != m.Ds + m.Dt || m.W.cols() != static_cast<Eigen::Index>(m.station_ids.size())) {
      throw ParseError("model file '" + path + "': inconsistent dimensions");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
}

}  // namespace stmtmv::harness
