#pragma once

#include <string>
#include <string_view>

#include "exitwalk/verifier.hpp"

namespace exitwalk {

std::string sha256_hex(std::string_view data);

/// Hash of "blob <len>\0" + body, like a git object id.
std::string git_blob_sha256(std::string_view body);

/// Self-describing report: config echo and body hash in the header, rows
/// in the body.  Everything except the generated-at line is a pure
/// function of the config.
struct Report {
    std::string subcommand;
    std::string config_json;
    bool with_timestamp = true;
    std::string body;

    std::string render() const;
};

/// Writes to the path, or stdout when the path is empty.
void write_report(const Report& report, const std::string& out_path);

std::string verdict_jsonl(const InequalityVerdict& v);
std::string verdict_csv_row(const InequalityVerdict& v);
inline const char* verdict_csv_header() { return "instance,kind,left,right,margin,holds"; }

}  // namespace exitwalk
