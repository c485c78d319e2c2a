#pragma once

// Result records (JSON) and per-path tables (CSV).

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdh {

using Json = nlohmann::json;

struct ResultRecord {
  std::string command;
  /// Echo of the config the command ran on.
  Json inputs;
  Json outputs;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::string version;
  /// Git blob SHA-1 of inputs.dump().
  std::string input_hash;

  bool operator==(const ResultRecord&) const = default;
};

Json to_json(const ResultRecord& rec);
/// Errors: SchemaError on missing or mistyped fields.
ResultRecord record_from_json(const Json& doc);

/// Git-style content hash: SHA-1 of "blob <len>\0<content>", lowercase hex.
std::string git_blob_hash(const std::string& content);

/// UTC ISO-8601 time; SOURCE_DATE_EPOCH overrides the clock when set.
std::string report_timestamp();

/// Finite doubles as numbers; inf, -inf and nan as strings so records reload losslessly.
Json number_json(double v);
double number_from_json(const Json& v);

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Header line, then one line per row; values printed with %.17g.
void write_csv(std::ostream& out, const Table& table);
std::string format_double(double v);

/// Writes "key,value" rows for every leaf of a nested object, with dotted keys.
void write_flat_csv(std::ostream& out, const Json& outputs);

}  // namespace fdh
