#pragma once

#include <string>

#include "lrmm/model.hpp"
#include "lrmm/tensor.hpp"

namespace lrmm {

/// Binary tensor format "T3D1": the magic bytes `T3D1`, three little-endian
/// unsigned 64-bit dims (d1, d2, n), then d1*d2*n little-endian IEEE-754
/// doubles in slice-major, row-major-within-slice order. Round trips are
/// bit exact.
void write_t3d1(const std::string& path, const Tensor3& t);
Tensor3 read_t3d1(const std::string& path);

/// CSV interchange: `manifest_path` receives a JSON index
/// {"format": "t3d1-csv", "d1": ..., "d2": ..., "n": ..., "slices": [...]}
/// and each slice is written next to it as a d1 x d2 comma-separated file.
void write_slices_csv(const std::string& manifest_path, const Tensor3& t);
Tensor3 read_slices_csv(const std::string& manifest_path);

/// Reads either format, keyed on the file's leading bytes.
Tensor3 read_tensor_auto(const std::string& path);

/// Single-column CSV of 1-based cluster ids with a `label` header line.
void write_labels_csv(const std::string& path, const Labeling& labels);
Labeling read_labels_csv(const std::string& path);

/// Shortest exact decimal form used in all text outputs (17 significant
/// digits).
std::string format_double(double v);

}  // namespace lrmm
