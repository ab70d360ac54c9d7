#include "sparsenet/network_json.hpp"

#include <fstream>

#include "sparsenet/errors.hpp"

namespace sparsenet {

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Matrix& w : net.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index i = 0; i < w.cols(); ++i) row.push_back(w(j, i));
      rows.push_back(std::move(row));
    }
    layers.push_back(std::move(rows));
  }
  return {{"activation", std::string(to_string(net.activation()))}, {"layers", std::move(layers)}};
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    const ActivationKind kind = activation_from_string(doc.at("activation").get<std::string>());
    std::vector<Matrix> layers;
    for (const auto& rows : doc.at("layers")) {
      if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
        throw ConfigError("network json: every layer must be a non-empty array of rows");
      }
      const auto n_rows = static_cast<Eigen::Index>(rows.size());
      const auto n_cols = static_cast<Eigen::Index>(rows.front().size());
      Matrix w(n_rows, n_cols);
      for (Eigen::Index j = 0; j < n_rows; ++j) {
        const auto& row = rows[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(row.size()) != n_cols) {
          throw ConfigError("network json: ragged rows in layer " + std::to_string(layers.size() + 1));
        }
        for (Eigen::Index i = 0; i < n_cols; ++i) w(j, i) = row[static_cast<std::size_t>(i)].get<double>();
      }
      layers.push_back(std::move(w));
    }
    return Network(std::move(layers), kind);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network json: ") + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << network_to_json(net).dump() << '\n';
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace sparsenet
