#pragma once

#include <filesystem>
#include <vector>

#include "datacollab/matrix.hpp"

namespace dc {

/// Nearest-centroid classifier. Being purely distance-based, its
/// predictions are invariant under any common orthogonal transform of the
/// representation space, which is exactly what the alignment guarantees
/// are about.
struct CentroidModel {
  Matrix centroids;              // k x l, one row per class
  std::vector<index_t> class_ids;  // length k, ascending
};

CentroidModel fit_nearest_centroid(const Matrix& x, const std::vector<index_t>& labels);

/// Argmin of squared Euclidean distance to the centroids; ties broken by
/// the smallest class id.
std::vector<index_t> predict(const CentroidModel& model, const Matrix& y);

/// Squared distance of every row to every centroid (rows x k); exposed for
/// margin computations in invariance tests.
Matrix squared_distances(const CentroidModel& model, const Matrix& y);

/// On-disk form: <dir>/centroids.dcm1 plus <dir>/classes.json.
void save_model(const CentroidModel& model, const std::filesystem::path& dir);
CentroidModel load_model(const std::filesystem::path& dir);

}  // namespace dc
