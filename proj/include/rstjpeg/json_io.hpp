#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rstjpeg/analysis.hpp"
#include "rstjpeg/cipher.hpp"
#include "rstjpeg/entropy.hpp"

namespace rstjpeg {

using Json = nlohmann::ordered_json;

inline constexpr const char* kScanMapSchema = "rstjpeg.scanmap/1";
inline constexpr const char* kReportSchema = "rstjpeg.report/1";
inline constexpr const char* kRecipeSchema = "rstjpeg.recipe/1";

Json scan_map_to_json(const ScanMap& map);

// Recipe as stored on disk: keys are referenced, not embedded. A key
// reference is either 96 hex characters or a path to a file holding them.
struct RecipeFile {
  std::uint16_t ri = 1;
  Region region = AllBlocks{};
  std::string k1_ref;
  std::string k2_ref;
};

Json region_to_json(const Region& region);
Region region_from_json(const Json& j);
Json recipe_to_json(const RecipeFile& recipe);
RecipeFile recipe_from_json(const Json& j);
Key resolve_key_ref(const std::string& ref);
EncryptionRecipe resolve(const RecipeFile& recipe);

Json to_json(const KeySpaceReport& r);
Json to_json(const BoxStats& s);
Json to_json(const KsResult& r);
Json to_json(const HistogramReport& r, bool include_bins = true);
Json to_json(const SensitivityReport& r);
Json sketch_summary(const SketchImage& s);

// nlohmann maps non-finite doubles to null; reports keep +inf legible.
Json finite_or_string(double v);

}  // namespace rstjpeg
