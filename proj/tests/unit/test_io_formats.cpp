#include <gtest/gtest.h>

#include "rcdamage/io_formats.hpp"
#include "rcdamage/pipeline.hpp"
#include "roundtrip.hpp"
#include "support.hpp"

using namespace rcdamage;
using rcdamage::testing::fixtures;
using rcdamage::testing::TempDir;

TEST(Formats, EveryCanonicalFixtureRoundTripsByteForByte) {
  const auto files = rcdamage::testing::canonical_fixtures(fixtures());
  ASSERT_EQ(files.size(), 19u);
  for (const auto &f : files)
    EXPECT_EQ(rcdamage::testing::reserialize(f.kind, f.path),
              rcdamage::testing::original(f.kind, f.path))
        << f.path;
}

TEST(Formats, EveryNegativeFixtureIsRejectedWithLocation) {
  const auto cases = rcdamage::testing::negative_cases(fixtures());
  ASSERT_GE(cases.size(), 25u);
  for (const auto &c : cases) {
    const auto path = fixtures() / "invalid" / c.file;
    try {
      rcdamage::testing::load_as(c.kind, path);
      ADD_FAILURE() << c.file << " was accepted";
    } catch (const rcdamage::error &e) {
      const std::string msg = e.what();
      EXPECT_NE(msg.find(c.expect), std::string::npos) << c.file << ": " << msg;
      EXPECT_EQ(msg.rfind(path.string(), 0), 0u) << c.file << ": " << msg;
    }
  }
}

TEST(Formats, ShortPayloadReportsCounts) {
  try {
    io::load_tensor(fixtures() / "invalid" / "tensor_short_payload.json");
    FAIL();
  } catch (const io::format_error &e) {
    EXPECT_NE(std::string(e.what()).find("40559 floats"), std::string::npos);
  }
}

TEST(Formats, TensorPayloadIsLittleEndianFloat32) {
  const std::vector<double> v{1.0, -2.5};
  const std::string b = io::float32_le_bytes(v);
  ASSERT_EQ(b.size(), 8u);
  EXPECT_EQ(static_cast<unsigned char>(b[3]), 0x3f); // 1.0f = 0x3f800000
  EXPECT_EQ(static_cast<unsigned char>(b[2]), 0x80);
  EXPECT_EQ(static_cast<unsigned char>(b[0]), 0x00);
}

TEST(Formats, TensorSaveLoadPreservesValues) {
  TempDir dir("rcdamage-io");
  auto t = make_tensor(2, 3, 2, 1, 64, 64);
  for (std::size_t i = 0; i < t.values.size(); ++i)
    t.values[i] = static_cast<double>(i) * 0.25 - 3.0;
  io::save(dir.path / "t.json", io::TensorFile{t, "t.bin"});
  const auto back = io::load_tensor(dir.path / "t.json");
  EXPECT_EQ(back.tensor.values, t.values);
  EXPECT_EQ(back.data, "t.bin");
}

TEST(Formats, NumbersKeepRealSpelling) {
  EXPECT_EQ(io::canonical_text(io::json(104.0)), "104.0\n");
  EXPECT_EQ(io::format_number(0.5), "0.5");
  EXPECT_EQ(io::format_number(2122088.0), "2122088");
}

TEST(Formats, MalformedJsonIsLocatedByFile) {
  TempDir dir("rcdamage-io");
  io::write_text(dir.path / "bad.json", "{\"format\": ");
  try {
    io::load_annotations(dir.path / "bad.json");
    FAIL();
  } catch (const io::format_error &e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
  EXPECT_THROW(io::load_annotations(dir.path / "missing.json"), io::format_error);
}

TEST(Csv, AnchorsAndLabels) {
  TempDir dir("rcdamage-csv");
  io::write_text(dir.path / "a.csv", io::anchors_csv(column_rebar_anchors()));
  EXPECT_EQ(io::load_anchors(dir.path / "a.csv"), column_rebar_anchors());

  io::write_text(dir.path / "bad.csv", "width,height\n10,abc\n");
  EXPECT_THROW(io::load_anchors(dir.path / "bad.csv"), input_error);
  io::write_text(dir.path / "neg.csv", "width,height\n10,-1\n");
  EXPECT_THROW(io::load_anchors(dir.path / "neg.csv"), input_error);
  io::write_text(dir.path / "hdr.csv", "w,h\n10,1\n");
  EXPECT_THROW(io::load_anchors(dir.path / "hdr.csv"), input_error);

  io::write_text(dir.path / "dup.csv", "id,label\na,DS0\na,DS1\n");
  EXPECT_THROW(io::load_labels(dir.path / "dup.csv"), input_error);
}

TEST(Inventory, CaseFixtureFusesToPublishedCounts) {
  const auto path = fixtures() / "case" / "inventory.json";
  const auto inv = io::load_inventory(path);
  const auto a = assess_inventory(inv, path.parent_path());
  ASSERT_FALSE(a.building.collapsed);
  const auto n = a.state_counts();
  EXPECT_EQ(n[0], 0u);
  EXPECT_EQ(n[1], 17u);
  EXPECT_EQ(n[2], 26u);
  EXPECT_EQ(n[3], 14u);
  const auto groups = performance_groups(inv, a);
  EXPECT_EQ(groups.size(), 3u);
  std::size_t total = 0;
  for (const auto &g : groups)
    total += g.component_states.size();
  EXPECT_EQ(total, 57u);
}

TEST(Inventory, CollapseFixtureSkipsComponents) {
  const auto path = fixtures() / "collapse" / "inventory.json";
  const auto a = assess_inventory(io::load_inventory(path), path.parent_path());
  EXPECT_TRUE(a.building.collapsed);
  EXPECT_TRUE(a.building.components.empty());
}

TEST(Inventory, MissingDetectionFileIsReported) {
  TempDir dir("rcdamage-inv");
  auto inv = io::load_inventory(fixtures() / "case" / "inventory.json");
  io::save(dir.path / "inventory.json", inv);
  EXPECT_THROW(assess_inventory(inv, dir.path), io::format_error);
}
