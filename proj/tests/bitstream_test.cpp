#include <doctest.h>

#include <random>

#include "rstjpeg/bitstream.hpp"
#include "rstjpeg/entropy.hpp"
#include "support/corpus.hpp"
#include "test_helpers.hpp"

using namespace rstjpeg;
using namespace rstjpeg::testing;

namespace {

void put_segment(Bytes& out, std::uint8_t code, const Bytes& payload) {
  out.push_back(0xFF);
  out.push_back(code);
  const std::size_t len = payload.size() + 2;
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len & 0xFF));
  out.insert(out.end(), payload.begin(), payload.end());
}

// Container-level file: the scan is not required to decode.
Bytes container(const Bytes& scan, std::uint8_t frame_code = 0xC0) {
  Bytes f{0xFF, 0xD8};
  put_segment(f, frame_code, {8, 0, 16, 0, 16, 3, 1, 0x22, 0, 2, 0x11, 1, 3, 0x11, 1});
  put_segment(f, 0xDA, {3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0});
  f.insert(f.end(), scan.begin(), scan.end());
  f.push_back(0xFF);
  f.push_back(0xD9);
  return f;
}

}  // namespace

TEST_SUITE("bitstream") {

TEST_CASE("FF00 and FFFF are not marker codes") {
  CHECK_ERROR_KIND(MarkerCode(0x00), ErrorKind::MalformedMarker);
  CHECK_ERROR_KIND(MarkerCode(0xFF), ErrorKind::MalformedMarker);
  for (unsigned n = 0; n < 8; ++n) {
    const MarkerCode m(static_cast<std::uint8_t>(0xD0 + n));
    CHECK(m.kind() == MarkerKind::RST);
    CHECK(m.rst_index() == n);
    CHECK_FALSE(m.has_length());
  }
  CHECK(MarkerCode(0xE1).kind() == MarkerKind::APP);
  CHECK(MarkerCode(0xC4).kind() == MarkerKind::DHT);
}

TEST_CASE("minimal file without DRI has restart interval 0") {
  const SegmentedJpeg j = parse(fixture("one_mcu.jpg"));
  CHECK(j.restart_interval == 0);
  CHECK(j.pre_scan.front().marker == MarkerCode::soi());
  CHECK(j.pre_scan.back().marker == MarkerCode::sos());
  REQUIRE(j.post_scan.size() == 1);
  CHECK(j.post_scan.front().marker == MarkerCode::eoi());
}

TEST_CASE("DRI value is picked up") {
  CHECK(parse(fixture("six_mcu_ri2.jpg")).restart_interval == 2);
  CHECK(parse(fixture("astronaut_top_ri4.jpg")).restart_interval == 4);
}

TEST_CASE("stuffed FF00 stays verbatim in the scan") {
  const Bytes scan{0x12, 0xFF, 0x00, 0xD4};
  const Bytes file = container(scan);
  const SegmentedJpeg j = parse(file);
  CHECK(j.scan == scan);
  CHECK(serialize(j) == file);
}

TEST_CASE("round trip is bit-identical over corpus and fixtures") {
  auto files = corpus_files();
  for (const char* f : {"one_mcu.jpg", "flat_gray.jpg", "six_mcu.jpg", "chelsea_odd.jpg", "chelsea_444.jpg",
                        "optimized.jpg", "noise.jpg", "astronaut_top_ri4.jpg", "six_mcu_ri2.jpg", "gray.jpg"}) {
    files.push_back(data_path(std::string("fixtures/") + f));
  }
  for (const auto& path : files) {
    CAPTURE(path);
    const Bytes bytes = read_file(path);
    const SegmentedJpeg j = parse(bytes);
    CHECK(serialize(j) == bytes);
    CHECK(j.byte_size() == bytes.size());
  }
}

TEST_CASE("round trip holds for randomly perturbed valid files") {
  std::mt19937_64 rng(20240607);
  const auto files = corpus_files();
  for (int trial = 0; trial < 30; ++trial) {
    const Bytes base = read_file(files[rng() % files.size()]);
    SegmentedJpeg j = parse(base);
    // A COM segment with arbitrary content, FF bytes included, at a random header position.
    Bytes payload(rng() % 300);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng() % 4 == 0 ? 0xFF : rng());
    const std::size_t at = 1 + rng() % (j.pre_scan.size() - 1);
    j.pre_scan.insert(j.pre_scan.begin() + static_cast<std::ptrdiff_t>(at), Segment{MarkerCode(0xFE), payload});
    if (rng() % 2) {
      const CodingTables t = build_tables(j);
      j = restructure(j, t, static_cast<std::uint16_t>(1 + rng() % 12));
    }
    const Bytes bytes = serialize(j);
    CHECK(serialize(parse(bytes)) == bytes);
    CHECK(parse(bytes) == j);
  }
}

TEST_CASE("every FF in a scan is followed by 00 or an RST code") {
  for (const auto& path : corpus_files()) {
    SegmentedJpeg j = parse(read_file(path));
    j = restructure(j, build_tables(j), 3);
    for (std::size_t i = 0; i < j.scan.size(); ++i) {
      if (j.scan[i] != 0xFF) continue;
      REQUIRE(i + 1 < j.scan.size());
      const std::uint8_t n = j.scan[i + 1];
      CHECK((n == 0x00 || (n >= 0xD0 && n <= 0xD7)));
    }
  }
}

TEST_CASE("parse rejects malformed and unsupported inputs") {
  const Bytes good = fixture("one_mcu.jpg");

  SUBCASE("missing SOI") {
    Bytes b = good;
    b[1] = 0xD9;
    CHECK_ERROR_KIND(parse(b), ErrorKind::MalformedMarker);
  }
  SUBCASE("truncated segment") {
    const Bytes b(good.begin(), good.begin() + 30);
    CHECK_ERROR_KIND(parse(b), ErrorKind::MalformedMarker);
  }
  SUBCASE("missing EOI") {
    const Bytes b(good.begin(), good.end() - 2);
    CHECK_ERROR_KIND(parse(b), ErrorKind::MalformedMarker);
  }
  SUBCASE("trailing garbage after EOI") {
    Bytes b = good;
    b.push_back(0x00);
    CHECK_ERROR_KIND(parse(b), ErrorKind::MalformedMarker);
  }
  SUBCASE("progressive") {
    CHECK_ERROR_KIND(parse(fixture("progressive.jpg")), ErrorKind::UnsupportedCoding);
  }
  SUBCASE("arithmetic coding") {
    CHECK_ERROR_KIND(parse(container({0x12, 0x34}, 0xC9)), ErrorKind::UnsupportedCoding);
  }
  SUBCASE("second scan") {
    Bytes b = container({0x12, 0x34});
    b.resize(b.size() - 2);
    put_segment(b, 0xDA, {3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0});
    b.insert(b.end(), {0x55, 0xFF, 0xD9});
    CHECK_ERROR_KIND(parse(b), ErrorKind::MultipleScans);
  }
  SUBCASE("two DRI segments") {
    SegmentedJpeg j = parse(good);
    j.pre_scan.insert(j.pre_scan.end() - 1, Segment{MarkerCode::dri(), {0, 2}});
    j.pre_scan.insert(j.pre_scan.end() - 1, Segment{MarkerCode::dri(), {0, 2}});
    CHECK_ERROR_KIND(parse(serialize(j)), ErrorKind::UnsupportedCoding);
  }
}

TEST_CASE("an empty scan parses but cannot be walked") {
  const Bytes file = container({});
  const SegmentedJpeg j = parse(file);
  CHECK(j.scan.empty());
  CHECK(serialize(j) == file);
  const SegmentedJpeg real = parse(fixture("one_mcu.jpg"));
  SegmentedJpeg emptied = real;
  emptied.scan.clear();
  CHECK_ERROR_KIND(walk_scan(emptied, build_tables(real)), ErrorKind::TruncatedScan);
}

TEST_CASE("modifying one Pattern-4 byte changes exactly that byte of the file") {
  const Bytes original = read_file(corpus_files().front());
  SegmentedJpeg j = parse(original);
  const ScanWalk walk = walk_scan(j, build_tables(j));
  std::size_t target = 0;
  for (std::size_t i = 0; i < j.scan.size(); ++i) {
    if (walk.map.byte_patterns[i] == BytePattern::P4) target = i;
  }
  REQUIRE(target > 0);
  unsigned k = 0;
  while (walk.map.role(target, k) != BitRole::AdditionalBit) ++k;
  j.scan[target] ^= static_cast<std::uint8_t>(0x80u >> k);
  const Bytes modified = serialize(j);
  REQUIRE(modified.size() == original.size());
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < original.size(); ++i) diffs += original[i] != modified[i];
  CHECK(diffs == 1);
}

TEST_CASE("extended blocks of a six-MCU scan at RI 2") {
  const SegmentedJpeg j = parse(fixture("six_mcu_ri2.jpg"));
  const auto blocks = split_extended_blocks(j);
  REQUIRE(blocks.size() == 3);
  // Separated by RST0 then RST1.
  CHECK(j.scan[blocks[0].bytes.end] == 0xFF);
  CHECK(j.scan[blocks[0].bytes.end + 1] == 0xD0);
  CHECK(j.scan[blocks[1].bytes.end + 1] == 0xD1);
  CHECK(blocks[2].bytes.end == j.scan.size());
}

TEST_CASE("split_extended_blocks errors") {
  CHECK_ERROR_KIND(split_extended_blocks(parse(fixture("six_mcu.jpg"))), ErrorKind::NoRestartMarkers);
  SegmentedJpeg j = parse(fixture("six_mcu_ri2.jpg"));
  const auto blocks = split_extended_blocks(j);
  j.scan[blocks[1].bytes.end + 1] = 0xD3;
  CHECK_ERROR_KIND(split_extended_blocks(j), ErrorKind::InconsistentMarkers);
}

TEST_CASE("384x512 at 4:2:0 with RI 4 has 192 extended blocks") {
  for (const auto& path : corpus_files()) {
    SegmentedJpeg j = parse(read_file(path));
    const CodingTables t = build_tables(j);
    if (t.frame.width * t.frame.height != 384 * 512) continue;
    CAPTURE(path);
    CHECK(split_extended_blocks(restructure(j, t, 4)).size() == 192);
  }
}

TEST_CASE("spans and markers partition the scan") {
  for (const auto& path : corpus_files()) {
    SegmentedJpeg j = parse(read_file(path));
    const CodingTables t = build_tables(j);
    for (std::uint16_t ri : {1, 5, 64}) {
      const SegmentedJpeg r = restructure(j, t, ri);
      const auto blocks = split_extended_blocks(r);
      CHECK(blocks.size() == (t.frame.mcu_count() + ri - 1) / ri);
      std::vector<ByteView> views;
      for (const auto& b : blocks) views.emplace_back(r.scan.data() + b.bytes.begin, b.bytes.size());
      CHECK(join_extended_blocks(views) == r.scan);
    }
  }
}

}  // TEST_SUITE
