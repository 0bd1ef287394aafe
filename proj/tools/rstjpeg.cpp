// rstjpeg command-line front end.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rstjpeg/analysis.hpp"
#include "rstjpeg/json_io.hpp"

#ifdef RSTJPEG_HAVE_REFERENCE
#include "reference/reference_decoder.hpp"
#endif

namespace fs = std::filesystem;
using namespace rstjpeg;

namespace {

// Exit codes: 0 success, 1 library error or failed verification, 2 usage.
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string input, output, reference, recipe_path, out_dir = ".", format = "json", region, blocks, stages;
  std::string k1, k2, ri_list = "2,4,8";
  int ri = -1;
  std::size_t trials = 20, jobs = 0;
  std::uint64_t seed = 1;
  bool restructure_first = false, per_mcu = false, equalize = false, bins = false;
};

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
}

[[noreturn]] void usage_error(const std::string& what) { fail(ErrorKind::InvalidArgument, what); }

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      usage_error(std::string("bad ") + what + " list: " + text);
    }
  }
  return out;
}

std::uint16_t checked_ri(long v) {
  if (v < 0 || v > 0xFFFF) usage_error("restart interval out of range");
  return static_cast<std::uint16_t>(v);
}

CipherOptions stage_options(const std::string& stages) {
  if (stages.empty() || stages == "xor,permute" || stages == "permute,xor") return {};
  if (stages == "xor") return {true, false};
  if (stages == "permute") return {false, true};
  usage_error("--stages must be xor, permute or xor,permute");
}

// Builds the recipe from --recipe or flags. Keys are resolved (and thus
// validated) here, before anything is written.
EncryptionRecipe recipe_from(const Options& o, const SegmentedJpeg& input) {
  EncryptionRecipe r;
  if (!o.recipe_path.empty()) {
    const Bytes raw = read_file(o.recipe_path);
    Json j;
    try {
      j = Json::parse(raw.begin(), raw.end());
    } catch (const nlohmann::json::exception& e) {
      usage_error(std::string("recipe is not JSON: ") + e.what());
    }
    r = resolve(recipe_from_json(j));
  } else {
    if (o.k1.empty() || o.k2.empty()) usage_error("--k1 and --k2 are required without --recipe");
    r.k1 = resolve_key_ref(o.k1);
    r.k2 = resolve_key_ref(o.k2);
    r.ri = o.ri >= 0 ? checked_ri(o.ri) : input.restart_interval;
  }
  if (o.ri >= 0 && !o.recipe_path.empty() && checked_ri(o.ri) != r.ri) {
    usage_error("--ri disagrees with the recipe");
  }
  if (!o.region.empty() && !o.blocks.empty()) usage_error("--region and --blocks are exclusive");
  if (!o.region.empty()) {
    const auto v = parse_list(o.region, "region");
    if (v.size() != 4) usage_error("--region expects x0,y0,x1,y1");
    r.region = McuRect{v[0], v[1], v[2], v[3]};
  } else if (!o.blocks.empty()) {
    const auto v = parse_list(o.blocks, "block");
    r.region = std::set<std::size_t>(v.begin(), v.end());
  }
  return r;
}

SegmentedJpeg load(const std::string& path) { return parse(read_file(path)); }

// Deterministic evaluation keys when none are given: HMAC_DRBG output
// seeded by the decimal seed.
std::pair<Key, Key> seeded_keys(std::uint64_t seed) {
  const std::string s = "rstjpeg-eval-" + std::to_string(seed);
  HmacDrbg drbg(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  Key k1, k2;
  drbg.generate(k1);
  drbg.generate(k2);
  return {k1, k2};
}

std::pair<Key, Key> keys_or_seeded(const Options& o) {
  if (o.k1.empty() != o.k2.empty()) usage_error("give both --k1 and --k2, or neither");
  if (!o.k1.empty()) return {resolve_key_ref(o.k1), resolve_key_ref(o.k2)};
  return seeded_keys(o.seed);
}

void write_image(const RasterImage& img, const std::string& path, const std::string& format) {
  if (format == "png") {
    write_png(path, img);
  } else {
    write_pnm(path, img);
  }
}

std::string image_ext(const std::string& format, const RasterImage& img) {
  if (format == "png") return ".png";
  return img.channels == 1 ? ".pgm" : ".ppm";
}

void require_format(const std::string& f) {
  if (f != "json" && f != "png" && f != "pgm") usage_error("--format must be json, png or pgm");
}

// ---------------------------------------------------------------------------

int cmd_restructure(const Options& o) {
  if (o.ri < 1) usage_error("--ri >= 1 is required");
  const SegmentedJpeg in = load(o.input);
  const SegmentedJpeg out = restructure(in, build_tables(in), checked_ri(o.ri));
  write_file(o.output, serialize(out));
  return 0;
}

int cmd_cipher(const Options& o, bool forward) {
  const CipherOptions stages = stage_options(o.stages);
  SegmentedJpeg in = load(o.input);
  const EncryptionRecipe r = recipe_from(o, in);
  if (forward && o.restructure_first && in.restart_interval != r.ri) in = restructure(in, build_tables(in), r.ri);
  const SegmentedJpeg out = forward ? encrypt(in, r, stages) : decrypt(in, r, stages);
  write_file(o.output, serialize(out));
  return 0;
}

int cmd_scanmap(const Options& o) {
  const SegmentedJpeg in = load(o.input);
  const ScanWalk w = walk_scan(in, build_tables(in));
  emit(scan_map_to_json(w.map), o.output);
  return 0;
}

int cmd_decode(const Options& o) {
  require_format(o.format);
  if (o.format == "json") usage_error("decode writes png or pgm");
  write_image(decode_pixels(load(o.input)), o.output, o.format);
  return 0;
}

int cmd_nzca(const Options& o) {
  require_format(o.format);
  const SegmentedJpeg in = load(o.input);
  const CodingTables tables = build_tables(in);
  const ScanWalk w = walk_scan(in, tables);
  const SketchImage s = o.per_mcu ? nzca_per_mcu(tables, w.map) : nzca(tables, w.map);
  if (o.format == "json") {
    Json j = sketch_summary(s);
    j["granularity"] = o.per_mcu ? "mcu" : "data_unit";
    j["counts"] = s.counts;
    emit(j, o.output);
  } else {
    if (o.output.empty()) usage_error("an output path is required for image formats");
    write_image(o.equalize ? s.render_equalized() : s.render(), o.output, o.format);
  }
  return 0;
}

int cmd_histogram(const Options& o) {
  const RasterImage img = decode_pixels(load(o.input));
  std::optional<RasterImage> ref;
  if (!o.reference.empty()) ref = decode_pixels(load(o.reference));
  emit(to_json(histogram_report(img, ref ? &*ref : nullptr), o.bins), o.output);
  return 0;
}

int cmd_keyspace(const Options& o) {
  const SegmentedJpeg in = load(o.input);
  const std::uint16_t ri = o.ri >= 0 ? checked_ri(o.ri) : in.restart_interval;
  if (ri == 0) usage_error("--ri >= 1 is required for an input without restart markers");
  emit(to_json(key_space_for(in, ri)), o.output);
  return 0;
}

int cmd_sensitivity(const Options& o) {
  if (o.ri < 1) usage_error("--ri >= 1 is required");
  if (o.trials == 0) usage_error("--trials must be positive");
  const auto [k1, k2] = keys_or_seeded(o);
  SegmentedJpeg in = load(o.input);
  const std::uint16_t ri = checked_ri(o.ri);
  if (in.restart_interval != ri) in = restructure(in, build_tables(in), ri);
  EncryptionRecipe r;
  r.ri = ri;
  r.k1 = k1;
  r.k2 = k2;
  Json j = to_json(sensitivity_experiment(in, r, o.trials, o.seed));
  j["image"] = fs::path(o.input).filename().string();
  j["ri"] = ri;
  j["seed"] = o.seed;
  emit(j, o.output);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct RiResult {
  std::uint16_t ri = 0;
  Json json;
  double psnr = 0, ssim = 0;
  bool ok = true;
};

struct ImageResult {
  std::string name;
  Json json;
  std::vector<RiResult> per_ri;
  bool ok = true;
};

ImageResult evaluate_image(const fs::path& path, const std::vector<std::uint16_t>& ris, const Key& k1, const Key& k2,
                           const fs::path& out_dir, const std::string& format) {
  ImageResult res;
  res.name = path.filename().string();
  const fs::path dir = out_dir / path.stem();
  fs::create_directories(dir);
  try {
    const SegmentedJpeg original = load(path.string());
    const CodingTables tables = build_tables(original);
    const RasterImage plain_pixels = decode_pixels(original);
    const SketchImage plain_sketch = nzca(original);
    const std::string img_format = format == "json" ? "png" : format;
    write_image(plain_sketch.render(), (dir / ("sketch_plain" + image_ext(img_format, plain_sketch.render()))).string(),
                img_format);

    res.json = {{"image", res.name}, {"width", tables.frame.width}, {"height", tables.frame.height}};
    Json runs = Json::array();
    for (std::uint16_t ri : ris) {
      RiResult rr;
      rr.ri = ri;
      const SegmentedJpeg plain = restructure(original, tables, ri);
      EncryptionRecipe r;
      r.ri = ri;
      r.k1 = k1;
      r.k2 = k2;
      const SegmentedJpeg cipher = encrypt(plain, r);
      const Bytes cipher_bytes = serialize(cipher);
      const std::string tag = "r" + std::to_string(ri);
      write_file((dir / (tag + ".jpg")).string(), cipher_bytes);

      const bool size_equal = cipher_bytes.size() == plain.byte_size();
      const bool round_trip = decrypt(cipher, r) == plain;
      const RasterImage cipher_pixels = decode_pixels(cipher);
      rr.psnr = psnr(plain_pixels, cipher_pixels);
      rr.ssim = ssim(plain_pixels, cipher_pixels);
      const SketchImage sketch = nzca(cipher);
      const RasterImage sketch_img = sketch.render();
      write_image(cipher_pixels, (dir / (tag + "_decoded" + image_ext(img_format, cipher_pixels))).string(),
                  img_format);
      write_image(sketch_img, (dir / (tag + "_sketch" + image_ext(img_format, sketch_img))).string(), img_format);

      Json conformance;
#ifdef RSTJPEG_HAVE_REFERENCE
      const reference::ReferenceDecode d = reference::reference_decode_default(cipher_bytes);
      conformance = {{"checked", true}, {"ok", d.ok && d.warnings == 0}, {"warnings", d.warnings}};
      if (!d.message.empty()) conformance["message"] = d.message;
      rr.ok = rr.ok && d.ok && d.warnings == 0;
#else
      conformance = {{"checked", false}};
#endif
      rr.ok = rr.ok && size_equal && round_trip;
      rr.json = {{"ri", ri},
                 {"T", count_pattern4(walk_scan(plain, build_tables(plain)).map)},
                 {"plain_bytes", plain.byte_size()},
                 {"cipher_bytes", cipher_bytes.size()},
                 {"size_equal", size_equal},
                 {"round_trip", round_trip},
                 {"conformance", conformance},
                 {"psnr", finite_or_string(rr.psnr)},
                 {"ssim", rr.ssim},
                 {"sketch", sketch_summary(sketch)},
                 {"sketch_equals_plain", sketch == plain_sketch},
                 {"histogram", to_json(histogram_report(cipher_pixels, &plain_pixels), false)}};
      res.ok = res.ok && rr.ok;
      runs.push_back(rr.json);
      res.per_ri.push_back(std::move(rr));
    }
    res.json["runs"] = runs;
  } catch (const Error& e) {
    res.ok = false;
    res.json = {{"image", res.name}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
  }
  emit(res.json, (dir / "report.json").string());
  return res;
}

int cmd_evaluate(const Options& o) {
  require_format(o.format);
  std::vector<std::uint16_t> ris;
  for (auto v : parse_list(o.ri_list, "ri")) {
    if (v == 0) usage_error("--ri values must be >= 1");
    ris.push_back(checked_ri(static_cast<long>(v)));
  }
  const auto [k1, k2] = keys_or_seeded(o);
  if (!fs::is_directory(o.input)) fail(ErrorKind::IoError, "not a directory: " + o.input);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.input)) {
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (e.is_regular_file() && (ext == ".jpg" || ext == ".jpeg")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::IoError, "no JPEG files in " + o.input);
#ifndef RSTJPEG_HAVE_REFERENCE
  std::cerr << "warning: built without libjpeg; reference-decoder conformance step skipped\n";
#endif

  const fs::path out_dir = o.out_dir;
  fs::create_directories(out_dir);
  std::vector<ImageResult> results(files.size());
  std::atomic<std::size_t> next{0};
  const std::size_t jobs = std::clamp<std::size_t>(
      o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency()), 1, files.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
        results[i] = evaluate_image(files[i], ris, k1, k2, out_dir, o.format);
      }
    });
  }
  for (auto& t : pool) t.join();

  Json summary = {{"schema", kReportSchema}, {"images", files.size()}, {"ri", ris}};
  Json per_ri = Json::array();
  bool all_ok = true;
  for (std::size_t k = 0; k < ris.size(); ++k) {
    std::vector<double> p, s, pearson, to_ref;
    std::size_t failed = 0;
    for (const auto& res : results) {
      if (k >= res.per_ri.size()) {
        ++failed;
        continue;
      }
      const RiResult& rr = res.per_ri[k];
      p.push_back(rr.psnr);
      s.push_back(rr.ssim);
      pearson.push_back(rr.json["histogram"]["channel_pearson"]["mean"].get<double>());
      to_ref.push_back(rr.json["histogram"]["reference"]["pearson"].get<double>());
      failed += !rr.ok;
    }
    Json entry = {{"ri", ris[k]}, {"failed_images", failed}};
    if (!p.empty()) {
      entry["psnr"] = to_json(box_stats(p));
      entry["ssim"] = to_json(box_stats(s));
      entry["histogram_channel_pearson"] = to_json(box_stats(pearson));
      entry["histogram_pearson_to_original"] = to_json(box_stats(to_ref));
    }
    per_ri.push_back(entry);
    all_ok = all_ok && failed == 0;
  }
  Json failures = Json::array();
  for (const auto& res : results) {
    if (!res.ok) failures.push_back(res.json.contains("error") ? res.json : Json(res.name));
  }
  summary["per_ri"] = per_ri;
  summary["failures"] = failures;
  summary["ok"] = all_ok && failures.empty();
  emit(summary, (out_dir / "summary.json").string());
  return summary["ok"].get<bool>() ? 0 : kExitFailure;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Format- and size-preserving encryption of baseline JPEG bitstreams with restart markers"};
  app.require_subcommand(1);
  Options o;

  auto add_keys = [&](CLI::App* c) {
    c->add_option("--k1", o.k1, "bit-scrambling key: 96 hex chars or a file holding them");
    c->add_option("--k2", o.k2, "block-permutation key: 96 hex chars or a file holding them");
  };
  auto add_io = [&](CLI::App* c) {
    c->add_option("input", o.input, "input JPEG")->required()->check(CLI::ExistingFile);
    c->add_option("output", o.output, "output JPEG")->required();
  };

  auto* restructure_cmd = app.add_subcommand("restructure", "re-encode losslessly with a new restart interval");
  add_io(restructure_cmd);
  restructure_cmd->add_option("--ri", o.ri, "MCUs per restart interval")->required();

  std::vector<CLI::App*> cipher_cmds;
  for (const char* name : {"encrypt", "decrypt"}) {
    auto* c = app.add_subcommand(name, std::string(name) + " the scan of a JPEG with restart markers");
    add_io(c);
    add_keys(c);
    c->add_option("--ri", o.ri, "restart interval (defaults to the input's)");
    c->add_option("--recipe", o.recipe_path, "recipe JSON (region, interval, key references)");
    c->add_option("--region", o.region, "MCU rectangle x0,y0,x1,y1 (half-open)");
    c->add_option("--blocks", o.blocks, "comma-separated extended-block indices");
    c->add_option("--stages", o.stages, "xor, permute or xor,permute (default)");
    cipher_cmds.push_back(c);
  }
  cipher_cmds[0]->add_flag("--restructure", o.restructure_first, "restructure to --ri first when needed");

  auto* scanmap_cmd = app.add_subcommand("scanmap", "export bit roles and byte patterns as JSON");
  scanmap_cmd->add_option("input", o.input)->required()->check(CLI::ExistingFile);
  scanmap_cmd->add_option("output", o.output, "JSON path (default stdout)");

  auto* decode_cmd = app.add_subcommand("decode", "decode to pixels with the built-in decoder");
  add_io(decode_cmd);
  decode_cmd->add_option("--format", o.format, "png or pgm (PPM for color)");

  auto* nzca_cmd = app.add_subcommand("nzca", "non-zero counting sketch");
  nzca_cmd->add_option("input", o.input)->required()->check(CLI::ExistingFile);
  nzca_cmd->add_option("output", o.output, "output path (default stdout for json)");
  nzca_cmd->add_option("--format", o.format, "json, png or pgm");
  nzca_cmd->add_flag("--per-mcu", o.per_mcu, "one cell per MCU instead of per luma data unit");
  nzca_cmd->add_flag("--equalize", o.equalize, "histogram-equalized rendering");

  auto* hist_cmd = app.add_subcommand("histogram", "RGB histograms and channel similarity");
  hist_cmd->add_option("input", o.input)->required()->check(CLI::ExistingFile);
  hist_cmd->add_option("output", o.output, "JSON path (default stdout)");
  hist_cmd->add_option("--reference", o.reference, "compare against this JPEG")->check(CLI::ExistingFile);
  hist_cmd->add_flag("--bins", o.bins, "include the 3x256 bin counts");

  auto* ks_cmd = app.add_subcommand("keyspace", "key-space bits for an image at a restart interval");
  ks_cmd->add_option("input", o.input)->required()->check(CLI::ExistingFile);
  ks_cmd->add_option("output", o.output, "JSON path (default stdout)");
  ks_cmd->add_option("--ri", o.ri, "restart interval (defaults to the input's)");

  auto* sens_cmd = app.add_subcommand("sensitivity", "one-bit key flip SSIM experiment");
  sens_cmd->add_option("input", o.input)->required()->check(CLI::ExistingFile);
  sens_cmd->add_option("output", o.output, "JSON path (default stdout)");
  sens_cmd->add_option("--ri", o.ri, "restart interval")->required();
  sens_cmd->add_option("--trials", o.trials, "number of bit flips");
  sens_cmd->add_option("--seed", o.seed, "flip positions and baseline keys; also derives keys when none given");
  add_keys(sens_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "full evaluation over a directory of JPEGs");
  eval_cmd->add_option("input", o.input, "directory of baseline JPEGs")->required();
  eval_cmd->add_option("--ri", o.ri_list, "comma-separated restart intervals");
  eval_cmd->add_option("--out-dir", o.out_dir, "artifact directory");
  eval_cmd->add_option("--format", o.format, "image format for sketches and decodes: png (json implies png) or pgm");
  eval_cmd->add_option("--jobs", o.jobs, "worker threads (default: hardware threads)");
  eval_cmd->add_option("--seed", o.seed, "derives the keys when --k1/--k2 are absent");
  add_keys(eval_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (restructure_cmd->parsed()) return cmd_restructure(o);
    if (cipher_cmds[0]->parsed()) return cmd_cipher(o, true);
    if (cipher_cmds[1]->parsed()) return cmd_cipher(o, false);
    if (scanmap_cmd->parsed()) return cmd_scanmap(o);
    if (decode_cmd->parsed()) return cmd_decode(o);
    if (nzca_cmd->parsed()) return cmd_nzca(o);
    if (hist_cmd->parsed()) return cmd_histogram(o);
    if (ks_cmd->parsed()) return cmd_keyspace(o);
    if (sens_cmd->parsed()) return cmd_sensitivity(o);
    if (eval_cmd->parsed()) return cmd_evaluate(o);
  } catch (const Error& e) {
    print_error(std::string(to_string(e.kind())), e.what());
    return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    print_error("IoError", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
