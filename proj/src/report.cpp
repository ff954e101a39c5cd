#include "rbgf/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rbgf {

using nlohmann::json;

std::string lemma_report_json(const LemmaReport& rep, std::uint64_t config_hash) {
    json out = json::array();
    for (const auto& cl : rep.clauses) {
        json c;
        c["lemma"] = rep.lemma;
        c["clause"] = cl.name;
        c["C_fit"] = cl.C_fit;
        c["pass"] = cl.pass;
        c["ratio_spread"] = cl.ratio_spread;
        c["config_hash"] = config_hash;
        c["tool_version"] = tool_version();
        json samples = json::array();
        for (const auto& s : cl.samples) {
            samples.push_back(
                {{"t", s.t}, {"x", s.x}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"ratio", s.ratio}});
        }
        c["samples"] = samples;
        out.push_back(c);
    }
    return out.dump(2);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) throw config_error("cannot write " + path);
        f << content;
    }
    fs::rename(tmp, p);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os.precision(12);
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    write_text_atomic(path, os.str());
}

}  // namespace rbgf
