#include "invex/problems/instance_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace invex {

namespace {
using nlohmann::json;

json mat_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::MatrixXd mat_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols) {
  if (arr.size() != static_cast<size_t>(rows * cols))
    throw std::invalid_argument("instance json: array length mismatch");
  Eigen::MatrixXd m(rows, cols);
  size_t at = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = arr[at++].get<double>();
  return m;
}

Eigen::VectorXd vec_from_json(const json& arr, Eigen::Index n) {
  if (arr.size() != static_cast<size_t>(n))
    throw std::invalid_argument("instance json: array length mismatch");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = arr[static_cast<size_t>(i)].get<double>();
  return v;
}

json parse_checked(const std::string& text, const char* expected_problem) {
  json doc = json::parse(text);
  if (doc.at("problem").get<std::string>() != expected_problem)
    throw std::invalid_argument("instance json: wrong problem tag");
  return doc;
}
}  // namespace

std::string to_json(const dag::DagInstance& inst) {
  json doc;
  doc["problem"] = "dag";
  doc["dims"] = {{"d", inst.d}};
  doc["seed"] = inst.seed;
  doc["params"] = {{"edge_prob", inst.edge_prob},
                   {"weight_scale", inst.weight_scale},
                   {"cyclic", inst.cyclic}};
  doc["arrays"] = {{"weights", mat_to_json(inst.weights)}};
  return doc.dump();
}

dag::DagInstance dag_from_json(const std::string& text) {
  json doc = parse_checked(text, "dag");
  dag::DagInstance inst;
  inst.d = doc.at("dims").at("d").get<int>();
  inst.seed = doc.at("seed").get<std::uint64_t>();
  inst.edge_prob = doc.at("params").at("edge_prob").get<double>();
  inst.weight_scale = doc.at("params").at("weight_scale").get<double>();
  inst.cyclic = doc.at("params").at("cyclic").get<bool>();
  inst.weights = mat_from_json(doc.at("arrays").at("weights"), inst.d, inst.d);
  return inst;
}

std::string to_json(const fairlasso::FairLassoInstance& inst) {
  json doc;
  doc["problem"] = "fair_lasso";
  doc["dims"] = {{"n", inst.n()}, {"d", inst.d()}};
  doc["seed"] = inst.seed;
  doc["params"] = {{"gamma", inst.gamma},
                   {"lambda", inst.lambda},
                   {"sparsity", inst.sparsity},
                   {"noise_sigma", inst.noise_sigma}};
  doc["arrays"] = {{"x", mat_to_json(inst.x)},
                   {"y", vec_to_json(inst.y)},
                   {"w_star", vec_to_json(inst.w_star)},
                   {"z_star", vec_to_json(inst.z_star)}};
  return doc.dump();
}

fairlasso::FairLassoInstance fairlasso_from_json(const std::string& text) {
  json doc = parse_checked(text, "fair_lasso");
  fairlasso::FairLassoInstance inst;
  const auto n = doc.at("dims").at("n").get<Eigen::Index>();
  const auto d = doc.at("dims").at("d").get<Eigen::Index>();
  inst.seed = doc.at("seed").get<std::uint64_t>();
  inst.gamma = doc.at("params").at("gamma").get<double>();
  inst.lambda = doc.at("params").at("lambda").get<double>();
  inst.sparsity = doc.at("params").at("sparsity").get<int>();
  inst.noise_sigma = doc.at("params").at("noise_sigma").get<double>();
  inst.x = mat_from_json(doc.at("arrays").at("x"), n, d);
  inst.y = vec_from_json(doc.at("arrays").at("y"), n);
  inst.w_star = vec_from_json(doc.at("arrays").at("w_star"), d);
  inst.z_star = vec_from_json(doc.at("arrays").at("z_star"), n);
  return inst;
}

std::string to_json(const mlr::MlrInstance& inst) {
  json doc;
  doc["problem"] = "mlr";
  doc["dims"] = {{"n", inst.n()}, {"d", inst.d()}};
  doc["seed"] = inst.seed;
  doc["params"] = {{"lambda1", inst.lambda1},
                   {"lambda2", inst.lambda2},
                   {"separation", inst.separation},
                   {"noise_sigma", inst.noise_sigma}};
  doc["arrays"] = {{"x", mat_to_json(inst.x)},
                   {"y", vec_to_json(inst.y)},
                   {"beta1_star", vec_to_json(inst.beta1_star)},
                   {"beta2_star", vec_to_json(inst.beta2_star)},
                   {"z_star", vec_to_json(inst.z_star)}};
  return doc.dump();
}

mlr::MlrInstance mlr_from_json(const std::string& text) {
  json doc = parse_checked(text, "mlr");
  mlr::MlrInstance inst;
  const auto n = doc.at("dims").at("n").get<Eigen::Index>();
  const auto d = doc.at("dims").at("d").get<Eigen::Index>();
  inst.seed = doc.at("seed").get<std::uint64_t>();
  inst.lambda1 = doc.at("params").at("lambda1").get<double>();
  inst.lambda2 = doc.at("params").at("lambda2").get<double>();
  inst.separation = doc.at("params").at("separation").get<double>();
  inst.noise_sigma = doc.at("params").at("noise_sigma").get<double>();
  inst.x = mat_from_json(doc.at("arrays").at("x"), n, d);
  inst.y = vec_from_json(doc.at("arrays").at("y"), n);
  inst.beta1_star = vec_from_json(doc.at("arrays").at("beta1_star"), d);
  inst.beta2_star = vec_from_json(doc.at("arrays").at("beta2_star"), d);
  inst.z_star = vec_from_json(doc.at("arrays").at("z_star"), n);
  // The lifted outer products are derived data; rebuild them on load.
  inst.s.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd lift(d + 1);
    lift.head(d) = inst.x.row(i).transpose();
    lift(d) = -inst.y(i);
    inst.s.push_back(lift * lift.transpose());
  }
  return inst;
}

}  // namespace invex
