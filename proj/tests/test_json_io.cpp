#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "lincont/json_io.hpp"

using namespace lincont;
namespace fs = std::filesystem;

namespace {

const std::vector<StageState>& three() {
  static const std::vector<StageState> s = build_stages({3, 5});
  return s;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lincont_json_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(JsonIo, RationalStrings) {
  EXPECT_EQ(to_json(Rational(-3, 4)), Json("-3/4"));
  EXPECT_EQ(to_json(Rational(5)), Json("5/1"));
  EXPECT_EQ(rational_from_json(Json("6/8")), Rational(3, 4));
  EXPECT_THROW(rational_from_json(Json("1/0")), InputError);
  EXPECT_THROW(rational_from_json(Json("abc")), InputError);
  EXPECT_THROW(rational_from_json(Json(0.5)), InputError);
}

TEST(JsonIo, StageRoundTrip) {
  for (const auto& s : three()) {
    Json j = to_json(s);
    StageState back = stage_from_json(j);
    EXPECT_EQ(back, s);
    EXPECT_EQ(dump(to_json(back)), dump(j));
  }
}

TEST(JsonIo, StageDumpsAreDeterministic) {
  auto again = build_stages({3, 5});
  for (std::size_t i = 0; i < again.size(); ++i)
    EXPECT_EQ(dump(to_json(again[i])), dump(to_json(three()[i])));
}

TEST(JsonIo, WriteAndReadStages) {
  fs::path dir = scratch("stages");
  write_stages(dir, three());
  auto back = read_stages(dir);
  EXPECT_EQ(back, three());
  EXPECT_TRUE(verify_stage(back).pass);
  fs::remove_all(dir);
  EXPECT_THROW(read_stages(dir), InputError);
}

TEST(JsonIo, MalformedInputIsAnInputError) {
  fs::path dir = scratch("bad");
  {
    std::ofstream(dir / "stage-1.json") << "{ not json";
  }
  EXPECT_THROW(read_stages(dir), InputError);
  Json j = to_json(three().front());
  j.erase("eta");
  EXPECT_THROW(stage_from_json(j), InputError);
  Json k = to_json(three().front());
  k["P"] = Json::array({Json::array({"1/2", "1/4"})});
  EXPECT_THROW(stage_from_json(k), InputError);
  EXPECT_THROW(read_json(dir / "missing.json"), InputError);
  fs::remove_all(dir);
}

TEST(JsonIo, LSpecParse) {
  Json j = Json::parse(R"({"complement_boxes": [["0", "0", "1", "1/2"]]})");
  LSpec L = lspec_from_json(j);
  ASSERT_EQ(L.boxes.size(), 1u);
  EXPECT_EQ(L.boxes[0], (Box{0, 0, 1, Rational(1, 2)}));
  EXPECT_EQ(lspec_from_json(to_json(L)), L);
  EXPECT_TRUE(lspec_from_json(Json::parse(R"({"complement_boxes": []})")).boxes.empty());
  EXPECT_THROW(lspec_from_json(Json::parse(R"({"boxes": []})")), InputError);
  EXPECT_THROW(lspec_from_json(Json::parse(R"({"complement_boxes": [["0", "0", "1"]]})")), InputError);
  EXPECT_THROW(lspec_from_json(Json::parse(R"({"complement_boxes": [["0", "0", "0", "1"]]})")),
               InputError);
}

TEST(JsonIo, DarbRoundTrip) {
  std::mt19937_64 rng(2);
  DarbInstance inst = synthetic_darb_instance(rng);
  DarbInstance back = darb_from_json(to_json(inst));
  EXPECT_EQ(dump(to_json(back)), dump(to_json(inst)));
}

TEST(JsonIo, ReportsSerialize) {
  StageCertificate c = verify_stage(three());
  Json j = to_json(c);
  EXPECT_TRUE(j.at("pass").get<bool>());
  GapCertificate g = certify_gaps({{0, 1}, {2, 3}}, 2);
  EXPECT_EQ(to_json(g).at("gamma"), Json("1/4"));
}
