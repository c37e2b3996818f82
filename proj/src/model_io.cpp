#include "fixpoint/model_io.hpp"

#include <fstream>

namespace fixpoint {

using nlohmann::json;

namespace {

json matrix_json(const Matrix<double>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

json covariance_json(const Covariance<double>& cov) {
  return {{"kind", cov.is_factor() ? "factor" : "dense"}, {"matrix", matrix_json(cov.matrix())}};
}

Matrix<double> parse_matrix(const json& j, Index rows, Index cols, const char* what) {
  if (!j.is_array() || Index(j.size()) != rows) {
    throw Error(ErrorKind::InvalidModel, std::string(what) + ": expected " +
                                             std::to_string(rows) + " rows");
  }
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[std::size_t(i)];
    if (!row.is_array() || Index(row.size()) != cols) {
      throw Error(ErrorKind::InvalidModel, std::string(what) + ": expected " +
                                               std::to_string(cols) + " columns");
    }
    for (Index c = 0; c < cols; ++c) {
      m(i, c) = row[std::size_t(c)].get<double>();
    }
  }
  return m;
}

Vector<double> parse_vector(const json& j, Index size, const char* what) {
  if (!j.is_array() || Index(j.size()) != size) {
    throw Error(ErrorKind::InvalidModel,
                std::string(what) + ": expected length " + std::to_string(size));
  }
  Vector<double> v(size);
  for (Index i = 0; i < size; ++i) {
    v(i) = j[std::size_t(i)].get<double>();
  }
  return v;
}

Covariance<double> parse_covariance(const json& j, Index dim, const char* what) {
  const std::string kind = j.at("kind").get<std::string>();
  Matrix<double> m = parse_matrix(j.at("matrix"), dim, dim, what);
  if (kind == "dense") {
    return Covariance<double>::dense(std::move(m));
  }
  if (kind == "factor") {
    return Covariance<double>::factor(std::move(m));
  }
  throw Error(ErrorKind::InvalidModel, std::string(what) + ": unknown covariance kind " + kind);
}

}  // namespace

json to_json(const Lgssm<double>& model, const Observations<double>* observations) {
  json doc;
  doc["state_dim"] = model.state_dim();
  doc["obs_dim"] = model.obs_dim;
  doc["initial"] = {{"mean", vector_json(model.initial.mean)},
                    {"cov", covariance_json(model.initial.cov)}};
  json steps = json::array();
  for (const auto& step : model.steps) {
    steps.push_back({{"A", matrix_json(step.transition)},
                     {"trans_bias_mean", vector_json(step.transition_bias)},
                     {"B", covariance_json(step.process_noise)},
                     {"H", matrix_json(step.observation)},
                     {"obs_bias_mean", vector_json(step.observation_bias)},
                     {"R", covariance_json(step.observation_noise)}});
  }
  doc["steps"] = std::move(steps);
  if (observations != nullptr) {
    json ys = json::array();
    for (const auto& y : *observations) {
      ys.push_back(vector_json(y));
    }
    doc["observations"] = std::move(ys);
  }
  return doc;
}

Lgssm<double> model_from_json(const json& doc) {
  try {
    const Index dim = doc.at("state_dim").get<Index>();
    const Index obs_dim = doc.at("obs_dim").get<Index>();
    const json& init = doc.at("initial");
    Lgssm<double> model{{parse_vector(init.at("mean"), dim, "initial mean"),
                         parse_covariance(init.at("cov"), dim, "initial covariance")},
                        {},
                        obs_dim};
    for (const json& step : doc.at("steps")) {
      model.steps.push_back({parse_matrix(step.at("A"), dim, dim, "A"),
                             parse_vector(step.at("trans_bias_mean"), dim, "trans_bias_mean"),
                             parse_covariance(step.at("B"), dim, "B"),
                             parse_matrix(step.at("H"), obs_dim, dim, "H"),
                             parse_vector(step.at("obs_bias_mean"), obs_dim, "obs_bias_mean"),
                             parse_covariance(step.at("R"), obs_dim, "R")});
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidModel, std::string("malformed model document: ") + e.what());
  }
}

std::optional<Observations<double>> observations_from_json(const json& doc) {
  if (!doc.contains("observations")) {
    return std::nullopt;
  }
  const Index obs_dim = doc.at("obs_dim").get<Index>();
  Observations<double> ys;
  for (const json& y : doc.at("observations")) {
    ys.push_back(parse_vector(y, obs_dim, "observation"));
  }
  return ys;
}

void save_model(const std::filesystem::path& path, const Lgssm<double>& model,
                const Observations<double>* observations) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << to_json(model, observations).dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace fixpoint
