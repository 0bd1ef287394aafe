#include "rstjpeg/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace rstjpeg {

Json scan_map_to_json(const ScanMap& map) {
  Json j;
  j["schema"] = kScanMapSchema;
  j["scan_bytes"] = map.byte_patterns.size();
  j["units_per_mcu"] = map.units_per_mcu;
  Json counts;
  counts["P1"] = map.count(BytePattern::P1);
  counts["P2"] = map.count(BytePattern::P2);
  counts["P3"] = map.count(BytePattern::P3);
  counts["P4"] = map.count(BytePattern::P4);
  counts["P5"] = map.count(BytePattern::P5);
  counts["marker"] = map.count(BytePattern::Marker);
  counts["padding"] = map.count(BytePattern::Padding);
  j["pattern_counts"] = counts;
  std::string classes;
  classes.reserve(map.byte_patterns.size());
  for (auto p : map.byte_patterns) classes.push_back(pattern_char(p));
  j["byte_patterns"] = classes;
  Json blocks = Json::array();
  for (const auto& s : map.block_bytes) blocks.push_back({{"begin", s.begin}, {"end", s.end}});
  j["blocks"] = blocks;
  Json mcus = Json::array();
  for (std::size_t m = 0; m < map.mcu_bit_offsets.size(); ++m) {
    Json nzc = Json::array();
    for (std::size_t u = 0; u < map.units_per_mcu; ++u) nzc.push_back(map.coeff_counts[m * map.units_per_mcu + u]);
    mcus.push_back({{"bit_offset", map.mcu_bit_offsets[m]}, {"block", map.mcu_block[m]}, {"nzc", nzc}});
  }
  j["mcus"] = mcus;
  return j;
}

Json region_to_json(const Region& region) {
  if (std::holds_alternative<AllBlocks>(region)) return "all";
  if (const auto* ids = std::get_if<std::set<std::size_t>>(&region)) return Json{{"blocks", *ids}};
  const auto& r = std::get<McuRect>(region);
  return Json{{"mcu_rect", {r.x0, r.y0, r.x1, r.y1}}};
}

Region region_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "all") return AllBlocks{};
  if (j.is_object() && j.contains("blocks")) {
    return j.at("blocks").get<std::set<std::size_t>>();
  }
  if (j.is_object() && j.contains("mcu_rect")) {
    const auto v = j.at("mcu_rect").get<std::vector<std::size_t>>();
    if (v.size() != 4) fail(ErrorKind::InvalidArgument, "mcu_rect needs four numbers");
    return McuRect{v[0], v[1], v[2], v[3]};
  }
  fail(ErrorKind::InvalidArgument, "unrecognized region: " + j.dump());
}

Json recipe_to_json(const RecipeFile& recipe) {
  Json j;
  j["schema"] = kRecipeSchema;
  j["ri"] = recipe.ri;
  j["region"] = region_to_json(recipe.region);
  j["key_refs"] = {{"k1", recipe.k1_ref}, {"k2", recipe.k2_ref}};
  return j;
}

RecipeFile recipe_from_json(const Json& j) {
  try {
    RecipeFile r;
    r.ri = j.at("ri").get<std::uint16_t>();
    r.region = j.contains("region") ? region_from_json(j.at("region")) : Region{AllBlocks{}};
    r.k1_ref = j.at("key_refs").at("k1").get<std::string>();
    r.k2_ref = j.at("key_refs").at("k2").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad recipe JSON: ") + e.what());
  }
}

Key resolve_key_ref(const std::string& ref) {
  const bool looks_hex = ref.size() == 2 * kKeyBytes &&
                         ref.find_first_not_of("0123456789abcdefABCDEF") == std::string::npos;
  if (looks_hex || !std::filesystem::exists(ref)) return key_from_hex(ref);
  std::ifstream in(ref);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  const auto last = text.find_last_not_of(" \t\r\n");
  return key_from_hex(first == std::string::npos ? std::string() : text.substr(first, last - first + 1));
}

EncryptionRecipe resolve(const RecipeFile& recipe) {
  EncryptionRecipe r;
  r.ri = recipe.ri;
  r.region = recipe.region;
  r.k1 = resolve_key_ref(recipe.k1_ref);
  r.k2 = resolve_key_ref(recipe.k2_ref);
  return r;
}

Json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json to_json(const KeySpaceReport& r) {
  return Json{{"width", r.width},
              {"height", r.height},
              {"ri", r.ri},
              {"T", r.t},
              {"extended_blocks", r.blocks},
              {"s_enc_min_bits", r.s_enc_min_bits},
              {"s_enc_max_bits", r.s_enc_max_bits},
              {"s_bp_log2", r.s_bp_log2},
              {"s_min_bits", r.s_min_bits},
              {"s_max_bits", r.s_max_bits},
              {"exceeds_256_bits", r.s_min_bits > 256.0}};
}

Json to_json(const BoxStats& s) {
  Json outliers = Json::array();
  for (double v : s.outliers) outliers.push_back(finite_or_string(v));
  return Json{{"n", s.n},
              {"mean", finite_or_string(s.mean)},
              {"min", finite_or_string(s.min)},
              {"p25", finite_or_string(s.p25)},
              {"p50", finite_or_string(s.p50)},
              {"p75", finite_or_string(s.p75)},
              {"max", finite_or_string(s.max)},
              {"whisker_low", finite_or_string(s.whisker_low)},
              {"whisker_high", finite_or_string(s.whisker_high)},
              {"outliers", outliers}};
}

Json to_json(const KsResult& r) {
  return Json{{"d", r.d}, {"p_value", r.p_value}, {"reject_at_0.05", r.reject(0.05)}};
}

namespace {

Json pair_json(const ChannelPairScores& s) {
  return Json{{"rg", s.rg}, {"rb", s.rb}, {"gb", s.gb}, {"mean", s.mean()}};
}

}  // namespace

Json to_json(const HistogramReport& r, bool include_bins) {
  Json j;
  if (include_bins) {
    j["bins"] = {{"r", r.channels[0]}, {"g", r.channels[1]}, {"b", r.channels[2]}};
  }
  j["channel_similarity"] = pair_json(r.similarity);
  j["channel_pearson"] = pair_json(r.pearson);
  j["channel_chi_square"] = pair_json(r.chi_square);
  if (r.similarity_to_reference) {
    j["reference"] = {{"similarity", *r.similarity_to_reference},
                      {"pearson", *r.pearson_to_reference},
                      {"chi_square", *r.chi_square_to_reference}};
  }
  return j;
}

Json to_json(const SensitivityReport& r) {
  Json flips = Json::array();
  for (const auto& f : r.flips) flips.push_back({{"key", f.key == 1 ? "k1" : "k2"}, {"bit", f.bit}});
  return Json{{"trials", r.case1.size()},
              {"flips", flips},
              {"control", to_json(box_stats(r.control))},
              {"case1", to_json(box_stats(r.case1))},
              {"independent", to_json(box_stats(r.independent))},
              {"independent_both", to_json(box_stats(r.independent_both))},
              {"case2", to_json(box_stats(r.case2))},
              {"case1_vs_independent_ks", to_json(r.case1_vs_independent)},
              {"case1_vs_independent_both_ks", to_json(r.case1_vs_independent_both)},
              {"samples",
               {{"case1", r.case1},
                {"independent", r.independent},
                {"independent_both", r.independent_both},
                {"case2", r.case2}}}};
}

Json sketch_summary(const SketchImage& s) {
  std::size_t nonzero = 0;
  for (auto c : s.counts) nonzero += c > 0;
  return Json{{"width", s.width}, {"height", s.height}, {"max_count", s.max_count}, {"nonzero_cells", nonzero}};
}

}  // namespace rstjpeg
