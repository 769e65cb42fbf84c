#include "blockloc/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blockloc/diag.hpp"
#include "blockloc/parser.hpp"

namespace blockloc {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open manifest", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Deliberately small TOML subset: top-level `key = value` and [section]
// prefixes, values being strings, integers, booleans, or string arrays.
// Comments start with '#'. Manifests are flat, so this covers them.
json parse_toml_subset(const std::string& text, const std::string& path) {
    json doc = json::object();
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = std::string::npos;
        bool in_str = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                hash = i;
                break;
            }
        }
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                raise(ErrCode::ManifestError, "bad section header", path, lineno);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise(ErrCode::ManifestError, "expected key = value", path, lineno);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (value.empty()) raise(ErrCode::ManifestError, "empty value", path, lineno);
        json parsed;
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                raise(ErrCode::ManifestError, "unterminated string", path, lineno);
            parsed = value.substr(1, value.size() - 2);
        } else if (value.front() == '[') {
            if (value.back() != ']')
                raise(ErrCode::ManifestError, "arrays must be single-line", path, lineno);
            parsed = json::array();
            std::string inner = trim(value.substr(1, value.size() - 2));
            size_t i = 0;
            while (i < inner.size()) {
                while (i < inner.size() && (inner[i] == ' ' || inner[i] == ',')) ++i;
                if (i >= inner.size()) break;
                if (inner[i] != '"')
                    raise(ErrCode::ManifestError, "arrays hold strings only", path, lineno);
                size_t close = inner.find('"', i + 1);
                if (close == std::string::npos)
                    raise(ErrCode::ManifestError, "unterminated string", path, lineno);
                parsed.push_back(inner.substr(i + 1, close - i - 1));
                i = close + 1;
            }
        } else if (value == "true" || value == "false") {
            parsed = value == "true";
        } else {
            try {
                parsed = std::stoll(value);
            } catch (...) {
                raise(ErrCode::ManifestError, "unrecognized value '" + value + "'", path, lineno);
            }
        }
        doc[key] = std::move(parsed);
    }
    return doc;
}

} // namespace

ProjectManifest ProjectManifest::load(const std::string& path) {
    std::string text = read_file(path);
    json doc;
    bool looks_json = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        looks_json = c == '{';
        break;
    }
    if (looks_json) {
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            raise(ErrCode::ManifestError, std::string("manifest is not valid JSON: ") + e.what(),
                  path);
        }
    } else {
        doc = parse_toml_subset(text, path);
    }

    ProjectManifest m;
    m.dir = std::filesystem::path(path).parent_path().string();
    if (!doc.contains("sources") || !doc["sources"].is_array() || doc["sources"].empty())
        raise(ErrCode::ManifestError, "manifest needs a non-empty 'sources' array", path);
    for (const auto& s : doc["sources"]) m.sources.push_back(s.get<std::string>());
    if (!doc.contains("top")) raise(ErrCode::ManifestError, "manifest needs 'top'", path);
    m.top = doc["top"].get<std::string>();
    m.clock = doc.value("clock", m.clock);
    m.reset = doc.value("reset", m.reset);
    m.waveform = doc.value("waveform", m.waveform);
    m.report = doc.value("report", m.report);
    m.backend = doc.value("backend", m.backend);
    m.coverage = doc.value("coverage", m.coverage);

    // sources must resolve now; waveform/report/etc are checked by the
    // commands that need them
    for (const auto& s : m.sources) {
        std::string full = m.resolve(s);
        if (!std::filesystem::exists(full))
            raise(ErrCode::ManifestError, "source file does not exist: " + full, path);
    }
    return m;
}

std::string ProjectManifest::resolve(const std::string& rel) const {
    if (rel.empty()) return rel;
    std::filesystem::path p(rel);
    if (p.is_absolute() || dir.empty()) return rel;
    return (std::filesystem::path(dir) / p).string();
}

Design load_design(const ProjectManifest& manifest) {
    Design d;
    std::vector<SourceUnit> units;
    for (const auto& s : manifest.sources) units.push_back(load_source_file(manifest.resolve(s)));
    d.ast = parse_sources(std::move(units));
    d.hier = elaborate(d.ast, manifest.top);
    BlockizeOptions opts;
    if (!manifest.reset.empty()) opts.reset_names.push_back(manifest.reset);
    if (!manifest.clock.empty()) opts.clock_names.push_back(manifest.clock);
    d.blocks = blockize(d.hier, opts);
    return d;
}

} // namespace blockloc
