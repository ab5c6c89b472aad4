#ifndef ORTHOSTREAM_TRACE_IO_HPP
#define ORTHOSTREAM_TRACE_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "orthostream/fw_core.hpp"

namespace ortho {

// RunTrace CSV: optional "# key: value" comment lines carrying metadata,
// then a header "t,objective_estimate,fw_gap_estimate,elapsed,<metric...>"
// with metric columns sorted by name and left empty where not probed.
//
// RunTrace JSON: {"metadata": {...}, "records": [{"t", "objective_estimate",
// "fw_gap_estimate", "elapsed", "metrics": {name: value}}]}.

std::string trace_to_csv(const RunTrace& trace, bool with_metadata = true);
nlohmann::json trace_to_json(const RunTrace& trace);
RunTrace trace_from_json(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Git blob id, sha1("blob <len>\0" + content), as lowercase hex.
std::string git_blob_hash(const std::string& content);

}  // namespace ortho

#endif  // ORTHOSTREAM_TRACE_IO_HPP
