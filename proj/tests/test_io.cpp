// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "phyfea/io.hpp"
#include "phyfea/json_io.hpp"
#include "phyfea/version.hpp"
#include "support.hpp"

using namespace phyfea;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("phyfea_io_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
            std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

std::string u32(std::uint32_t v) {
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return s;
}

template <class F>
std::string error_of(F f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("label maps round-trip through PGM and PNG") {
  TempDir dir;
  LabelMap m(4, 5, 3);
  m.at(1, 2) = 2;
  m.at(3, 4) = 255;
  m.at(0, 0) = 1;
  for (const char* name : {"a.pgm", "a.png"}) {
    write_label_map(dir.file(name), m);
    const auto back = read_label_map(dir.file(name), 3);
    CHECK(back.rows == 4);
    CHECK(back.cols == 5);
    CHECK(back.labels == m.labels);
    CHECK(back.ignored(19));
  }
  const auto zeros = LabelMap(4, 4, 2);
  write_label_map(dir.file("z.pgm"), zeros);
  CHECK(read_label_map(dir.file("z.pgm")).labels == std::vector<std::int32_t>(16, 0));

  const auto err = error_of([&] { read_label_map(dir.file("a.pgm"), 2); });
  CHECK(err.find("label 2") != std::string::npos);
  CHECK(err.find("row 1, col 2") != std::string::npos);
}

TEST_CASE("colour and deep images are rejected") {
  TempDir dir;
  const LabelMap m(3, 3, 2);
  const std::vector<std::uint8_t> mask(9, 0);
  write_overlay(dir.file("rgb.png"), m, mask);
  write_overlay(dir.file("rgb.ppm"), m, mask);
  CHECK_THROWS_AS(read_label_map(dir.file("rgb.png")), FormatError);
  CHECK_THROWS_AS(read_label_map(dir.file("rgb.ppm")), FormatError);

  write_bytes(dir.file("deep.pgm"), "P5\n2 2\n65535\n" + std::string(8, '\0'));
  CHECK_THROWS_AS(read_label_map(dir.file("deep.pgm")), FormatError);

  write_bytes(dir.file("short.pgm"), "P5\n4 4\n255\n" + std::string(10, '\0'));
  const auto err = error_of([&] { read_label_map(dir.file("short.pgm")); });
  CHECK(err.find("offset") != std::string::npos);

  CHECK_THROWS_AS(read_label_map(dir.file("missing.pgm")), ValidationError);
}

TEST_CASE("overlay marks exactly the masked pixels") {
  TempDir dir;
  FixtureSpec spec;
  const auto labels = gen_fixture(spec).labels;
  const auto enc = find_enclosures(labels, 8);
  REQUIRE(enc.size() == 1);
  std::vector<std::uint8_t> mask(labels.size(), 0);
  for (auto p : enc[0].component.pixels) mask[p] = 1;
  write_overlay(dir.file("o.ppm"), labels, mask);
  std::ifstream in(dir.file("o.ppm"), std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  const std::string rgb = bytes.substr(bytes.size() - 3 * labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<unsigned char>(rgb[3 * i]);
    const auto g = static_cast<unsigned char>(rgb[3 * i + 1]);
    const bool red = r == 255 && g == 0;
    CHECK(red == (mask[i] != 0));
  }
}

TEST_CASE("SFT1 round trip is bit exact") {
  TempDir dir;
  const auto t = testing::random_tensor<float>(Dims{3, 8, 8}, 5, -10, 10);
  write_tensor(dir.file("t.sft"), t);
  CHECK(read_tensor(dir.file("t.sft")) == t);
  const auto bytes = encode_tensor(t);
  CHECK(bytes.size() == 4 + 4 + 12 + 4 * 192);
  CHECK(bytes.substr(0, 4) == "SFT1");
  CHECK(bytes.substr(4, 4) == u32(3));
  CHECK(decode_tensor(bytes) == t);

  const Tensor<float> plane(Dims{2, 3}, std::vector<float>{1, 2, 3, 4, 5, -0.0f});
  CHECK(decode_tensor(encode_tensor(plane)) == plane);
}

TEST_CASE("SFT1 diagnostics") {
  const std::string good = encode_tensor(Tensor<float>(Dims{2, 2}, 1.0f));
  CHECK_THROWS_AS(decode_tensor("XXXX" + good.substr(4)), FormatError);
  CHECK(error_of([&] { decode_tensor("XXXX" + good.substr(4)); }).find("magic") != std::string::npos);

  const std::string truncated = "SFT1" + u32(2) + u32(2) + u32(2) + std::string(12, '\0');
  const auto err = error_of([&] { decode_tensor(truncated); });
  CHECK(err.find("16") != std::string::npos);
  CHECK(err.find("12") != std::string::npos);

  CHECK_THROWS_AS(decode_tensor("SFT1" + u32(4) + u32(1) + u32(1) + u32(1) + u32(1) + u32(0)),
                  FormatError);
  CHECK_THROWS_AS(decode_tensor("SFT1" + u32(2) + u32(2)), FormatError);
  CHECK_THROWS_AS(decode_tensor(good + "x"), FormatError);
  CHECK_THROWS(decode_tensor("SFT1" + u32(2) + u32(0) + u32(2)));
  CHECK_THROWS_AS(read_tensor("/nonexistent/path.sft"), ValidationError);
}

TEST_CASE("fixtures are deterministic and scores follow the probability rule") {
  FixtureSpec spec;
  spec.kind = FixtureKind::random_binary;
  spec.seed = 3;
  spec.with_scores = true;
  const auto a = gen_fixture(spec);
  const auto b = gen_fixture(spec);
  CHECK(a.labels.labels == b.labels.labels);
  CHECK(*a.scores == *b.scores);

  spec.kind = FixtureKind::enclosure;
  const auto fx = gen_fixture(spec);
  const auto& s = *fx.scores;
  const std::size_t plane = fx.labels.size();
  for (std::size_t p = 0; p < plane; ++p) {
    const auto label = fx.labels.labels[p];
    const double expect = label == spec.inner ? 0.9 : 0.7;
    CHECK(std::exp(s[label * plane + p]) == doctest::Approx(expect).epsilon(1e-6));
    double total = 0;
    for (std::size_t c = 0; c < 3; ++c) total += std::exp(s[c * plane + p]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }

  CHECK(parse_fixture("broken_bar") == FixtureKind::broken_bar);
  CHECK(fixture_name(FixtureKind::ring) == "ring");
  CHECK_THROWS_AS(parse_fixture("spiral"), ConfigError);
  spec.rows = 3;
  CHECK_THROWS_AS(gen_fixture(spec), ConfigError);
}

TEST_CASE("json number formatting") {
  CHECK(format_real(1.5e-5) == "1.50000000e-5");
  CHECK(format_real(0.0) == "0.00000000e+0");
  CHECK(format_real(2.0) == "2.00000000e+0");
  CHECK(format_real(-123456.789) == "-1.23456789e+5");
  CHECK(format_real(1e-300) == "1.00000000e-300");

  PenaltyReport<double> r;
  r.alpha = 1e-5;
  r.l_opening = 2.0;
  r.l_dilation = 0.5;
  r.penalty = 1.5e-5;
  const auto text = dump_json(to_json(r));
  CHECK(text.find("\"penalty\": 1.50000000e-5") != std::string::npos);
  CHECK(text.find("l_opening") < text.find("l_dilation"));
  CHECK(Json::parse(text)["penalty"].get<double>() == doctest::Approx(1.5e-5));

  const auto empty = Json::parse(dump_json(to_json(AnomalyReport{})));
  CHECK(empty["enclosures"].empty());
  CHECK(empty["discontinuities"].empty());
}

TEST_CASE("catalog and config json round trip") {
  const auto cat = build_catalog(testing::planted_corpus(), 3, 8, "planted");
  const auto back = catalog_from_json(Json::parse(dump_json(to_json(cat))));
  CHECK(back.num_classes == cat.num_classes);
  CHECK(back.corpus_id == "planted");
  CHECK(back.threshold == 3);
  REQUIRE(back.records.size() == cat.records.size());
  for (std::size_t i = 0; i < cat.records.size(); ++i) {
    CHECK(back.records[i].pair == cat.records[i].pair);
    CHECK(back.records[i].verdict == cat.records[i].verdict);
    CHECK(back.records[i].occurrence_count == cat.records[i].occurrence_count);
    CHECK(back.records[i].co_occurs == cat.records[i].co_occurs);
  }

  auto bad = to_json(cat);
  bad["records"][0]["verdict"] = "feasible";
  CHECK_THROWS_AS(catalog_from_json(bad), CatalogError);

  EngineConfig cfg;
  cfg.alpha = 3e-6;
  cfg.iterations = 7;
  set_losses(cfg, "dilation");
  cfg.precision = Precision::single;
  const auto again = config_from_json(Json::parse(dump_json(to_json(cfg))));
  CHECK(again.alpha == 3e-6);
  CHECK(again.iterations == 7u);
  CHECK_FALSE(again.use_opening);
  CHECK(again.precision == Precision::single);
  CHECK_THROWS_AS(config_from_json(Json{{"alpah", 0.1}}), ConfigError);
  CHECK(config_from_json(Json{{"losses", Json::array({"opening"})}}).use_dilation == false);
}

TEST_CASE("version string") {
  CHECK(version_info().rfind("phyfea-engine ", 0) == 0);
  CHECK(version_info().find(PHYFEA_VERSION) != std::string::npos);
}
