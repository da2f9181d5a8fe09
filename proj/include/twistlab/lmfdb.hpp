#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/curve.hpp"

namespace twistlab {

inline constexpr int kCurveRecordSchemaVersion = 1;

enum class RecordSource { Remote, Cache, Fixture };
const char* record_source_name(RecordSource s);

// Short form y^2 = x^3 + A x + B, as printed alongside each worked example.
struct DisplayModel {
  i64 A = 0;
  i64 B = 0;
};

// Witness [u, r, s, t] carrying the display model onto the minimal one.
struct ModelTransform {
  i64 u = 1;
  i64 r = 0;
  i64 s = 0;
  i64 t = 0;
};

struct CurveRecord {
  std::string label;                 // Cremona form, e.g. 53a1
  std::vector<std::string> aliases;  // e.g. the LMFDB label 53.a1
  std::array<i64, 5> a_invariants{};  // minimal model a1, a2, a3, a4, a6
  u64 conductor = 0;
  std::optional<i64> rank;
  std::vector<i64> torsion_structure;  // invariant factors, e.g. [] or [4]
  std::optional<i64> mu2;
  std::optional<i64> lambda2;
  std::optional<int> root_number;
  std::optional<DisplayModel> display_model;
  std::optional<ModelTransform> display_transform;
  RecordSource source = RecordSource::Fixture;

  WeierstrassCurve curve() const;
  // Full profile with the record's invariants attached.
  CurveProfile profile() const;
};

// Cremona ("53a1") or LMFDB ("53.a1") curve labels.
bool valid_label(const std::string& label);

struct FetchOptions {
  bool offline = true;       // fixtures and cache only
  std::string fixtures_dir;  // empty: resolve via env and well-known paths
  std::string cache_dir;     // empty: TWISTLAB_CACHE_DIR, else no cache
  int timeout_ms = 5000;
  int retries = 2;
};

// Resolution order: fixtures, then cache, then (online only) the remote
// database, whose answer is written back to the cache.  TWISTLAB_OFFLINE=1
// forces offline regardless of the options.
CurveRecord fetch_curve(const std::string& label, const FetchOptions& opts = {});

// Document shape shared by fixtures and the cache payload.  Parsing
// revalidates the model (nonsingular), the recorded conductor against the
// recomputed one when computable, and the display-transform witness.
CurveRecord record_from_json(const std::string& text, RecordSource source);
std::string record_to_json(const CurveRecord& rec);

// One checksummed JSON file per label.  Loads return nothing when the label
// is absent and throw CacheCorrupt when the checksum or envelope is broken.
void cache_store(const std::string& dir, const CurveRecord& rec);
std::optional<CurveRecord> cache_load(const std::string& dir,
                                      const std::string& label);

// TWISTLAB_FIXTURES_DIR, then ./fixtures, then directories near the
// executable.  Empty result means no fixture directory exists.
std::string resolve_fixtures_dir(const std::string& override_dir = "");

}  // namespace twistlab
