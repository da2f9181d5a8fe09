#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "twistlab/lmfdb.hpp"

using namespace twistlab;
namespace fs = std::filesystem;

static std::string fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() /
               ("twistlab-lmfdb-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

TEST_CASE("valid_label: Cremona and LMFDB shapes") {
  for (const char* ok : {"53a1", "15a7", "17a4", "53.a1", "123456bb2", "10.a10"})
    CHECK(valid_label(ok));
  for (const char* bad :
       {"", "53", "53a", "a1", "53A1", "53 a1", "-53a1", "53.a", "53.", ".a1"})
    CHECK(!valid_label(bad));
}

TEST_CASE("fixtures: the three example curves resolve offline") {
  auto rec = fetch_curve("53a1");
  CHECK(rec.source == RecordSource::Fixture);
  CHECK(rec.label == "53a1");
  CHECK(rec.a_invariants == std::array<i64, 5>{1, -1, 1, 0, 0});
  CHECK(rec.conductor == 53);
  CHECK(rec.rank == 1);
  CHECK(rec.torsion_structure.empty());
  CHECK(rec.mu2 == 0);
  CHECK(rec.lambda2 == 1);
  CHECK(rec.root_number == -1);
  REQUIRE(rec.display_model.has_value());
  CHECK(rec.display_model->A == 405);
  CHECK(rec.display_model->B == 16038);

  // The LMFDB alias resolves to the same record.
  auto alias = fetch_curve("53.a1");
  CHECK(record_to_json(alias) == record_to_json(rec));

  auto r15 = fetch_curve("15a7");
  CHECK(r15.conductor == 15);
  CHECK(r15.lambda2 == 0);
  CHECK(r15.torsion_structure == std::vector<i64>{4});  // E(Q)[2] != 0
  CHECK(r15.aliases == std::vector<std::string>{"15.a4"});

  auto r17 = fetch_curve("17a4");
  CHECK(r17.mu2 == 0);
  CHECK(r17.lambda2 == 0);
  CHECK(r17.display_model->A == -11);
  CHECK(r17.display_model->B == 6);
}

TEST_CASE("fixtures: records agree with recomputed curve data") {
  for (const char* label : {"53a1", "15a7", "17a4"}) {
    CAPTURE(label);
    auto rec = fetch_curve(label);
    auto prof = rec.profile();
    CHECK(prof.conductor() == rec.conductor);
    CHECK(prof.root_number() == *rec.root_number);
    CHECK(prof.ordinary_at_2);
    // Recorded 2-torsion matches the 2-division cubic.
    bool has_two = false;
    for (i64 t : rec.torsion_structure) has_two |= (t % 2 == 0);
    CHECK(has_two == prof.rational_two_torsion);
  }
  CHECK(fetch_curve("53a1").profile().image == Mod2Image::FullS3);
  // 15a7 and 17a4 both carry a rational 2-torsion point, so their mod-2
  // images are the order-2 subgroup, never the full S3.
  CHECK(fetch_curve("15a7").profile().image == Mod2Image::OrderTwo);
  CHECK(fetch_curve("17a4").profile().image == Mod2Image::OrderTwo);
}

TEST_CASE("transform_model: display models land on the minimal ones") {
  struct Wit {
    const char* label;
    i64 A, B, u, r, s, t;
  };
  for (const Wit& w : {Wit{"53a1", 405, 16038, 6, -9, 3, 108},
                       Wit{"15a7", -103707, 12854646, 6, 15, 3, 108},
                       Wit{"17a4", -11, 6, 2, -1, 1, 4}}) {
    CAPTURE(w.label);
    auto rec = fetch_curve(w.label);
    auto display = WeierstrassCurve::from_a_invariants(0, 0, 0, w.A, w.B);
    auto carried = transform_model(display, w.u, w.r, w.s, w.t);
    CHECK(carried.a1 == rec.a_invariants[0]);
    CHECK(carried.a2 == rec.a_invariants[1]);
    CHECK(carried.a3 == rec.a_invariants[2]);
    CHECK(carried.a4 == rec.a_invariants[3]);
    CHECK(carried.a6 == rec.a_invariants[4]);
    // Same curve up to the unimodular change: u^12 scales the discriminant.
    bigint u12 = 1;
    for (int i = 0; i < 12; ++i) u12 *= w.u;
    CHECK(display.disc == carried.disc * u12);
  }
}

TEST_CASE("transform_model: identity, inverse direction, and rejections") {
  auto E = fetch_curve("53a1").curve();
  auto same = transform_model(E, 1, 0, 0, 0);
  CHECK(same.a1 == E.a1);
  CHECK(same.a6 == E.a6);
  CHECK_THROWS_AS(transform_model(E, 0, 0, 0, 0), Error);
  // u = 2 forces divisibility that this model does not have.
  try {
    transform_model(E, 2, 0, 0, 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
}

TEST_CASE("records: JSON round trip is the identity") {
  for (const char* label : {"53a1", "15a7", "17a4"}) {
    auto rec = fetch_curve(label);
    auto text = record_to_json(rec);
    auto back = record_from_json(text, RecordSource::Fixture);
    CHECK(record_to_json(back) == text);
  }
}

TEST_CASE("records: semantic validation failures") {
  auto text = record_to_json(fetch_curve("53a1"));
  auto patched = [&](const std::string& from, const std::string& to) {
    std::string s = text;
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  // Conductor that disagrees with the recomputed one.
  CHECK_THROWS_AS(
      record_from_json(patched("\"conductor\": 53", "\"conductor\": 59"),
                       RecordSource::Fixture),
      Error);
  // Broken transform witness.
  CHECK_THROWS_AS(record_from_json(patched("\"u\": 6", "\"u\": 3"),
                                   RecordSource::Fixture),
                  Error);
  // Invariants out of range.
  CHECK_THROWS_AS(record_from_json(patched("\"mu2\": 0", "\"mu2\": -1"),
                                   RecordSource::Fixture),
                  Error);
  CHECK_THROWS_AS(
      record_from_json(patched("\"root_number\": -1", "\"root_number\": 2"),
                       RecordSource::Fixture),
      Error);
  auto reshaped = [&](const char* field, nlohmann::json value) {
    auto doc = nlohmann::json::parse(text);
    doc[field] = std::move(value);
    return doc.dump();
  };
  CHECK_THROWS_AS(record_from_json(reshaped("schema_version", 7),
                                   RecordSource::Fixture),
                  Error);
  // Valid label shape, but its prefix contradicts the conductor.
  CHECK_THROWS_AS(record_from_json(reshaped("label", "59a1"),
                                   RecordSource::Fixture),
                  Error);
  CHECK_THROWS_AS(record_from_json(reshaped("a_invariants", {1, -1, 1, 0}),
                                   RecordSource::Fixture),
                  Error);
  CHECK_THROWS_AS(record_from_json(reshaped("rank", "one"),
                                   RecordSource::Fixture),
                  Error);
  // A singular model is rejected by the curve layer itself.
  try {
    record_from_json(reshaped("a_invariants", {0, 0, 0, 0, 0}),
                     RecordSource::Fixture);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularCurve);
  }
  // Not JSON at all.
  try {
    record_from_json("{oops", RecordSource::Fixture);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
}

TEST_CASE("cache: round trip, checksum, and misses") {
  std::string dir = fresh_dir("cache");
  auto rec = fetch_curve("53a1");
  cache_store(dir, rec);

  auto hit = cache_load(dir, "53a1");
  REQUIRE(hit.has_value());
  CHECK(hit->source == RecordSource::Cache);
  CHECK(record_to_json(*hit) == record_to_json(rec));

  CHECK(!cache_load(dir, "11a1").has_value());

  // Flip one digit of the stored record: the checksum must notice.
  fs::path entry = fs::path(dir) / "53a1.json";
  std::string body;
  {
    std::ifstream in(entry);
    body.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto pos = body.find("16038");
  REQUIRE(pos != std::string::npos);
  body.replace(pos, 5, "16039");
  {
    std::ofstream out(entry, std::ios::trunc);
    out << body;
  }
  try {
    cache_load(dir, "53a1");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CacheCorrupt);
  }
  fs::remove_all(dir);
}

TEST_CASE("fetch_curve: offline misses and label validation") {
  try {
    fetch_curve("exact nonsense");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
  // Valid label, but not in fixtures and no cache: offline lookup fails.
  try {
    fetch_curve("11a1");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
  // TWISTLAB_OFFLINE forces the same result even when the caller asks for
  // the network.
  ::setenv("TWISTLAB_OFFLINE", "1", 1);
  FetchOptions online;
  online.offline = false;
  try {
    fetch_curve("11a1", online);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
  ::unsetenv("TWISTLAB_OFFLINE");
}

TEST_CASE("fetch_curve: cache is consulted when fixtures miss") {
  std::string cache_dir = fresh_dir("fetch-cache");
  // 11a1, minimal model [0, -1, 1, -10, -20]; stored straight into the cache.
  CurveRecord rec;
  rec.label = "11a1";
  rec.a_invariants = {0, -1, 1, -10, -20};
  rec.conductor = 11;
  rec.rank = 0;
  rec.torsion_structure = {5};
  cache_store(cache_dir, rec);

  FetchOptions opts;
  opts.cache_dir = cache_dir;
  auto hit = fetch_curve("11a1", opts);
  CHECK(hit.source == RecordSource::Cache);
  CHECK(hit.conductor == 11);
  CHECK(!hit.mu2.has_value());

  // The same lookup through the environment variable.
  ::setenv("TWISTLAB_CACHE_DIR", cache_dir.c_str(), 1);
  auto via_env = fetch_curve("11a1");
  CHECK(via_env.source == RecordSource::Cache);
  ::unsetenv("TWISTLAB_CACHE_DIR");
  fs::remove_all(cache_dir);
}

TEST_CASE("fixtures: a file whose label disagrees is rejected") {
  std::string dir = fresh_dir("bad-fixture");
  {
    std::ofstream out(fs::path(dir) / "11a1.json");
    out << record_to_json(fetch_curve("53a1"));
  }
  FetchOptions opts;
  opts.fixtures_dir = dir;
  try {
    fetch_curve("11a1", opts);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadInput);
  }
  fs::remove_all(dir);
}

TEST_CASE("resolve_fixtures_dir: finds the shipped fixtures") {
  auto dir = resolve_fixtures_dir();
  CHECK(!dir.empty());
  CHECK(fs::exists(fs::path(dir) / "53a1.json"));
  CHECK(resolve_fixtures_dir("/definitely/not/here").empty());
}
