#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridplant/csv.hpp"
#include "hybridplant/errors.hpp"

namespace hybridplant {

// Flat key-value config with [section] grouping, TOML-ish:
//
//   [scenario]
//   mode = dynamic      # comment
//   t_end = 20.0
//   [wind]
//   speeds = 8, 10
//
// Keys are addressed as "section.key". Values stay strings until typed.
class Config {
public:
    Config() = default;

    static Config from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config " + path.string());
        Config cfg;
        cfg.path_ = path.string();
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            if (s.empty()) continue;
            if (s.front() == '[') {
                auto close = s.find(']');
                if (close == std::string::npos)
                    throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) + ": unterminated section header");
                section = trim(s.substr(1, close - 1));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(cfg.path_ + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
                val = val.substr(1, val.size() - 2);
            cfg.kv_[section.empty() ? key : section + "." + key] = val;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    std::string require_string(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError(context() + "missing required key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : to_double(key, it->second);
    }

    double require_double(const std::string& key) const {
        return to_double(key, require_string(key));
    }

    long get_int(const std::string& key, long dflt) const {
        double v = get_double(key, static_cast<double>(dflt));
        return static_cast<long>(v);
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(context() + "key '" + key + "' is not a boolean: '" + v + "'");
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> dflt = {}) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        std::vector<double> out;
        std::string cell;
        for (char c : it->second + ",") {
            if (c == ',') {
                if (!trim(cell).empty()) out.push_back(to_double(key, trim(cell)));
                cell.clear();
            } else {
                cell += c;
            }
        }
        return out;
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::string context() const { return path_.empty() ? std::string{} : path_ + ": "; }

    double to_double(const std::string& key, const std::string& v) const {
        try {
            return parse_double(v, "config key '" + key + "'");
        } catch (const ValidationError& e) {
            throw ConfigError(context() + e.what());
        }
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }

    static std::string strip_comment(const std::string& line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) return trim(line.substr(0, i));
        }
        return trim(line);
    }

    std::map<std::string, std::string> kv_;
    std::string path_;
};

} // namespace hybridplant
