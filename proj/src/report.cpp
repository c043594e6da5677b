#include "exitwalk/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>
#include <nlohmann/json.hpp>

#include "exitwalk/errors.hpp"

namespace exitwalk {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string git_blob_sha256(std::string_view body) {
    std::string framed = "blob " + std::to_string(body.size());
    framed.push_back('\0');
    framed.append(body);
    return sha256_hex(framed);
}

std::string Report::render() const {
    std::ostringstream out;
    out << "# exitwalk " << subcommand << "\n";
    if (with_timestamp) {
        auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
        out << "# generated " << buf << "\n";
    }
    out << "# config " << config_json << "\n";
    out << "# algorithm " << kRngAlgorithm << "\n";
    out << "# content-sha256 " << git_blob_sha256(body) << "\n";
    out << body;
    return out.str();
}

void write_report(const Report& report, const std::string& out_path) {
    std::string text = report.render();
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot open output file: " + out_path);
    out << text;
}

std::string verdict_jsonl(const InequalityVerdict& v) {
    nlohmann::json j;
    j["instance"] = std::to_string(fnv1a64(v.instance));
    j["kind"] = v.kind;
    j["left"] = {{"num", num_str(v.left)}, {"den", den_str(v.left)}};
    j["right"] = {{"num", num_str(v.right)}, {"den", den_str(v.right)}};
    j["left_float"] = to_double(v.left);
    j["right_float"] = to_double(v.right);
    j["margin"] = {{"num", num_str(v.margin)}, {"den", den_str(v.margin)}};
    j["margin_float"] = to_double(v.margin);
    j["exact"] = v.exact;
    j["holds"] = v.holds;
    return j.dump();
}

std::string verdict_csv_row(const InequalityVerdict& v) {
    std::ostringstream oss;
    oss.precision(17);
    oss << fnv1a64(v.instance) << "," << v.kind << "," << to_double(v.left) << ","
        << to_double(v.right) << "," << to_double(v.margin) << "," << (v.holds ? 1 : 0);
    return oss.str();
}

}  // namespace exitwalk
