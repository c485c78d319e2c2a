#include "fdh/report.hpp"

#include "fdh/error.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <ostream>

namespace fdh {

Json to_json(const ResultRecord& rec) {
  return Json{{"command", rec.command},     {"inputs", rec.inputs},   {"outputs", rec.outputs},
              {"timestamp", rec.timestamp}, {"seed", rec.seed},       {"version", rec.version},
              {"input_hash", rec.input_hash}};
}

ResultRecord record_from_json(const Json& doc) {
  try {
    ResultRecord rec;
    rec.command = doc.at("command").get<std::string>();
    rec.inputs = doc.at("inputs");
    rec.outputs = doc.at("outputs");
    rec.timestamp = doc.at("timestamp").get<std::string>();
    rec.seed = doc.at("seed").get<std::uint64_t>();
    rec.version = doc.at("version").get<std::string>();
    rec.input_hash = doc.at("input_hash").get<std::string>();
    return rec;
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("malformed result record: ") + e.what());
  }
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error(Errc::IOError, "cannot allocate digest context");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(Errc::IOError, "SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char b = digest[i];
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::string report_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (v == "inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error(Errc::SchemaError, "expected a number, got " + v.dump());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

namespace {

void flatten(std::ostream& out, const Json& v, const std::string& prefix) {
  if (v.is_object()) {
    for (const auto& [k, child] : v.items()) flatten(out, child, prefix.empty() ? k : prefix + "." + k);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(out, v[i], prefix + "." + std::to_string(i));
  } else if (v.is_number_float()) {
    out << prefix << ',' << format_double(v.get<double>()) << '\n';
  } else if (v.is_string()) {
    out << prefix << ',' << v.get<std::string>() << '\n';
  } else {
    out << prefix << ',' << v.dump() << '\n';
  }
}

}  // namespace

void write_flat_csv(std::ostream& out, const Json& outputs) {
  out << "key,value\n";
  flatten(out, outputs, "");
}

}  // namespace fdh
