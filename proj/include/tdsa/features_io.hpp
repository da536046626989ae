#pragma once

#include <string>
#include <vector>

#include "tdsa/corpus.hpp"
#include "tdsa/matrix.hpp"
#include "tdsa/pooling.hpp"

namespace tdsa {

struct FeatureFile {
  Matrix features;  // stored as float32 on disk, widened to double in memory
  std::vector<LayoutEntry> layout;
  std::vector<std::string> ids;
  std::vector<Label> labels;
};

// Binary record stream: uint32 little-endian length, then that many float32
// little-endian values, one record per instance. Metadata (layout, ids,
// labels) goes to a JSON sidecar next to the file.
void write_features(const FeatureFile& file, const std::string& path);
FeatureFile read_features(const std::string& path);
std::string feature_sidecar_path(const std::string& path);

}  // namespace tdsa
