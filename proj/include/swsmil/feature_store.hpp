#pragma once

#include <filesystem>

#include "swsmil/bag.hpp"

namespace swsmil {

// On-disk layout: <dir>/manifest.json plus one raw feature file per bag.
// manifest.json top-level keys: version (=1), dim, classes (names in
// priority-ascending order), bags (array of {id, label, num_instances,
// file, optional instance_labels, optional split}).
// Feature files are raw little-endian IEEE-754 float32, row-major N×d,
// no header. Bags without a split entry default to "train".
Dataset load_feature_store(const std::filesystem::path& dir);

// Inverse of load_feature_store: load(save(ds)) is bitwise identical on
// features and structurally identical on metadata.
void save_feature_store(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace swsmil
