#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavecrit/bounds.hpp"
#include "wavecrit/diagnostics.hpp"
#include "wavecrit/pdesim.hpp"
#include "wavecrit/solver.hpp"

namespace wavecrit {

// Every CSV starts with "# wavecrit-schema: <name>/<version>"; every JSON
// object carries a "schema" member. Readers reject other schemas.
inline constexpr const char* kProfileSchema = "profile/1";
inline constexpr const char* kTraceSchema = "trace/1";
inline constexpr const char* kSnapshotSchema = "snapshot/1";
inline constexpr const char* kFrontSchema = "front/1";

struct CsvTable {
  std::string schema;
  std::map<std::string, std::string> meta;  ///< "# key: value" lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Numbers are printed with %.17g so a write/read cycle is exact.
void write_csv(const std::string& path, const CsvTable& table);
/// Throws IoError on unreadable files, bad numbers or a schema other than
/// `expected_schema` (empty accepts any).
CsvTable read_csv(const std::string& path, const std::string& expected_schema = "");

void write_profile_csv(const std::string& path, const WaveProfile& p);
/// Throws GridMismatch when the xi column is not uniformly spaced.
WaveProfile read_profile_csv(const std::string& path);

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);
std::vector<TraceEntry> read_trace_csv(const std::string& path);

void write_snapshot_csv(const std::string& path, const SimState& state, double dx);
SimState read_snapshot_csv(const std::string& path, double* dx = nullptr);

void write_front_csv(const std::string& path, const std::vector<FrontSample>& front);
std::vector<FrontSample> read_front_csv(const std::string& path);

using Json = nlohmann::ordered_json;

Json to_json(const ModelParams& p);
Json to_json(const SpectralData& s);
Json to_json(const BoundSet& b);
Json to_json(const CertReport& r);
Json to_json(const Check& c);
Json to_json(const WaveReport& r);
Json to_json(const SpeedEstimate& e);
Json to_json(const ProfileComparison& c);

/// Sets doc["schema"] = schema and writes it indented.
void write_json(const std::string& path, Json doc, const std::string& schema);
Json read_json(const std::string& path, const std::string& expected_schema = "");

}  // namespace wavecrit
