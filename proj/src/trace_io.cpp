#include "orthostream/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace ortho {

namespace {

void put_number(std::ostringstream& out, double v) {
  if (std::isfinite(v)) out << v;
  else if (std::isnan(v)) out << "nan";
  else out << (v > 0 ? "inf" : "-inf");
}

// JSON has no NaN; non-finite values become null.
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_or_nan(const nlohmann::json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string trace_to_csv(const RunTrace& trace, bool with_metadata) {
  std::set<std::string> names;
  for (const auto& r : trace.records)
    for (const auto& [k, v] : r.metrics) names.insert(k);

  std::ostringstream out;
  out << std::setprecision(17);
  if (with_metadata && !trace.metadata.empty())
    for (const auto& [k, v] : trace.metadata.items()) out << "# " << k << ": " << v.dump() << '\n';
  out << "t,objective_estimate,fw_gap_estimate,elapsed";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',';
    put_number(out, r.objective_estimate);
    out << ',';
    put_number(out, r.fw_gap_estimate);
    out << ',';
    put_number(out, r.elapsed);
    for (const auto& n : names) {
      out << ',';
      if (auto it = r.metrics.find(n); it != r.metrics.end()) put_number(out, it->second);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json trace_to_json(const RunTrace& trace) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : trace.records) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [k, v] : r.metrics) m[k] = finite_or_null(v);
    recs.push_back({{"t", r.t},
                    {"objective_estimate", finite_or_null(r.objective_estimate)},
                    {"fw_gap_estimate", finite_or_null(r.fw_gap_estimate)},
                    {"elapsed", r.elapsed},
                    {"metrics", std::move(m)}});
  }
  return {{"metadata", trace.metadata}, {"records", std::move(recs)}};
}

RunTrace trace_from_json(const nlohmann::json& j) {
  RunTrace trace;
  trace.metadata = j.value("metadata", nlohmann::json::object());
  for (const auto& r : j.at("records")) {
    TraceRecord rec;
    rec.t = r.at("t").get<std::size_t>();
    rec.objective_estimate = number_or_nan(r.at("objective_estimate"));
    rec.fw_gap_estimate = number_or_nan(r.at("fw_gap_estimate"));
    rec.elapsed = number_or_nan(r.at("elapsed"));
    for (const auto& [k, v] : r.at("metrics").items()) rec.metrics[k] = number_or_nan(v);
    trace.append(std::move(rec));
  }
  return trace;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

}  // namespace ortho
