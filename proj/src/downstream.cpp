#include "datacollab/downstream.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include "datacollab/errors.hpp"
#include "datacollab/matrix_io.hpp"
#include "json.hpp"

namespace dc {

CentroidModel fit_nearest_centroid(const Matrix& x, const std::vector<index_t>& labels) {
  if (x.rows() == 0) throw ValidationError("fit_nearest_centroid: no samples");
  if (static_cast<index_t>(labels.size()) != x.rows())
    throw DimensionError("fit_nearest_centroid: label count does not match sample count");

  std::map<index_t, index_t> counts;
  for (index_t label : labels) ++counts[label];
  for (const auto& [label, count] : counts) {
    if (count == 0) throw ValidationError("fit_nearest_centroid: empty class " + std::to_string(label));
  }

  CentroidModel model;
  model.class_ids.reserve(counts.size());
  for (const auto& [label, count] : counts) model.class_ids.push_back(label);
  model.centroids = Matrix(static_cast<index_t>(counts.size()), x.cols());

  std::map<index_t, index_t> row_of;
  for (std::size_t k = 0; k < model.class_ids.size(); ++k) row_of[model.class_ids[k]] = static_cast<index_t>(k);
  for (index_t i = 0; i < x.rows(); ++i) {
    const index_t k = row_of[labels[static_cast<std::size_t>(i)]];
    for (index_t j = 0; j < x.cols(); ++j) model.centroids(k, j) += x(i, j);
  }
  for (std::size_t k = 0; k < model.class_ids.size(); ++k) {
    const double inv = 1.0 / static_cast<double>(counts[model.class_ids[k]]);
    for (index_t j = 0; j < x.cols(); ++j) model.centroids(static_cast<index_t>(k), j) *= inv;
  }
  return model;
}

Matrix squared_distances(const CentroidModel& model, const Matrix& y) {
  if (y.cols() != model.centroids.cols())
    throw DimensionError("predict: query dimension does not match centroids");
  Matrix d2(y.rows(), model.centroids.rows());
  for (index_t i = 0; i < y.rows(); ++i) {
    for (index_t k = 0; k < model.centroids.rows(); ++k) {
      double s = 0.0;
      for (index_t j = 0; j < y.cols(); ++j) {
        const double diff = y(i, j) - model.centroids(k, j);
        s += diff * diff;
      }
      d2(i, k) = s;
    }
  }
  return d2;
}

std::vector<index_t> predict(const CentroidModel& model, const Matrix& y) {
  const Matrix d2 = squared_distances(model, y);
  std::vector<index_t> out(static_cast<std::size_t>(y.rows()));
  for (index_t i = 0; i < y.rows(); ++i) {
    index_t best = 0;
    for (index_t k = 1; k < d2.cols(); ++k) {
      // Strict comparison keeps the smallest class id on exact ties
      // (class_ids are ascending).
      if (d2(i, k) < d2(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = model.class_ids[static_cast<std::size_t>(best)];
  }
  return out;
}

void save_model(const CentroidModel& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  write_dcm1(model.centroids, dir / "centroids.dcm1");
  nlohmann::json j;
  j["class_ids"] = model.class_ids;
  std::ofstream os(dir / "classes.json", std::ios::trunc);
  if (!os) throw IoError("cannot write " + (dir / "classes.json").string());
  os << j.dump(2) << '\n';
}

CentroidModel load_model(const std::filesystem::path& dir) {
  CentroidModel model;
  model.centroids = read_dcm1(dir / "centroids.dcm1");
  std::ifstream is(dir / "classes.json");
  if (!is) throw IoError("cannot read " + (dir / "classes.json").string());
  nlohmann::json j;
  try {
    is >> j;
    model.class_ids = j.at("class_ids").get<std::vector<index_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad classes.json: ") + e.what());
  }
  if (static_cast<index_t>(model.class_ids.size()) != model.centroids.rows())
    throw IoError("classes.json does not match the centroid matrix");
  return model;
}

}  // namespace dc
