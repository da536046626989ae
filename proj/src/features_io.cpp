#include "tdsa/features_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include <json.hpp>

#include "tdsa/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "feature files assume a little-endian host");

using nlohmann::json;

namespace tdsa {

std::string feature_sidecar_path(const std::string& path) { return path + ".json"; }

void write_features(const FeatureFile& file, const std::string& path) {
  if (file.ids.size() != file.features.rows || file.labels.size() != file.features.rows)
    fail(Errc::invalid_argument, "features: ids/labels/rows size mismatch");

  std::string bin;
  bin.reserve(file.features.rows * (4 + file.features.cols * 4));
  for (std::size_t i = 0; i < file.features.rows; ++i) {
    auto n = static_cast<std::uint32_t>(file.features.cols);
    char lenbuf[4];
    std::memcpy(lenbuf, &n, 4);
    bin.append(lenbuf, 4);
    for (std::size_t j = 0; j < file.features.cols; ++j) {
      auto v = static_cast<float>(file.features.at(i, j));
      char fbuf[4];
      std::memcpy(fbuf, &v, 4);
      bin.append(fbuf, 4);
    }
  }
  write_file(path, bin);

  json side;
  side["count"] = file.features.rows;
  side["dim"] = file.features.cols;
  side["layout"] = json::array();
  for (const LayoutEntry& e : file.layout)
    side["layout"].push_back(
        {{"context", e.context}, {"op", e.op}, {"offset", e.offset}, {"length", e.length}});
  side["ids"] = file.ids;
  side["labels"] = json::array();
  for (Label l : file.labels) side["labels"].push_back(label_name(l));
  write_file(feature_sidecar_path(path), side.dump(2) + "\n");
}

FeatureFile read_features(const std::string& path) {
  std::string bin = read_file(path);
  json side = json::parse(read_file(feature_sidecar_path(path)), nullptr, false);
  if (side.is_discarded()) fail(Errc::parse, "features: invalid sidecar JSON");

  FeatureFile file;
  std::size_t count = side["count"].get<std::size_t>();
  std::size_t dim = side["dim"].get<std::size_t>();
  file.features = Matrix(count, dim);
  for (const json& e : side["layout"])
    file.layout.push_back({e["context"].get<std::string>(), e["op"].get<std::string>(),
                           e["offset"].get<std::size_t>(), e["length"].get<std::size_t>()});
  file.ids = side["ids"].get<std::vector<std::string>>();
  for (const json& l : side["labels"]) {
    auto label = label_from_name(l.get<std::string>());
    if (!label) fail(Errc::parse, "features: unknown label in sidecar");
    file.labels.push_back(*label);
  }
  if (file.ids.size() != count || file.labels.size() != count)
    fail(Errc::parse, "features: sidecar counts disagree");

  std::size_t at = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (at + 4 > bin.size()) fail(Errc::parse, "features: truncated record " + std::to_string(i));
    std::uint32_t n = 0;
    std::memcpy(&n, bin.data() + at, 4);
    at += 4;
    if (n != dim) fail(Errc::parse, "features: record " + std::to_string(i) + " width mismatch");
    if (at + 4ull * n > bin.size())
      fail(Errc::parse, "features: truncated record " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      float v = 0;
      std::memcpy(&v, bin.data() + at, 4);
      at += 4;
      file.features.at(i, j) = static_cast<double>(v);
    }
  }
  if (at != bin.size()) fail(Errc::parse, "features: trailing bytes after last record");
  return file;
}

}  // namespace tdsa
