#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lorentz/errors.hpp"

namespace lorentz {

/// Plain-text `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; duplicate keys are an error.
class KeyValueFile {
  public:
    static KeyValueFile parse_text(const std::string& text, const std::string& origin = "<text>") {
        KeyValueFile kv;
        kv.raw_ = text;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw spec_error(origin + ":" + std::to_string(lineno) + ": expected key=value");
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty())
                throw spec_error(origin + ":" + std::to_string(lineno) + ": empty key");
            if (kv.values_.count(key))
                throw spec_error(origin + ": duplicate key '" + key + "'");
            kv.values_[key] = val;
        }
        return kv;
    }

    static KeyValueFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw spec_error("cannot open spec file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw spec_error("missing required key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        return get_string(key);
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long get_int(const std::string& key) const {
        const std::string s = get_string(key);
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(s, &pos);
        } catch (const std::exception&) {
            throw spec_error("key '" + key + "': expected integer, got '" + s + "'");
        }
        if (pos != s.size()) throw spec_error("key '" + key + "': trailing characters in '" + s + "'");
        return v;
    }
    long get_int(const std::string& key, long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string s = get_string(key);
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw spec_error("key '" + key + "': expected boolean, got '" + s + "'");
    }

    std::vector<double> get_double_list(const std::string& key) const {
        const std::string s = get_string(key);
        std::vector<double> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
        if (out.empty()) throw spec_error("key '" + key + "': empty list");
        return out;
    }

    /// Catch typos: every key present in the file must belong to the allowed
    /// set of the consumer.
    void require_known_keys(const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : values_)
            if (!allowed.count(k)) throw spec_error("unknown key '" + k + "'");
    }

    const std::string& raw_text() const { return raw_; }

  private:
    static std::string trim(const std::string& s) {
        auto b = s.begin(), e = s.end();
        while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
        while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
        return std::string(b, e);
    }

    static double to_double(const std::string& key, const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw spec_error("key '" + key + "': expected number, got '" + s + "'");
        }
        if (pos != s.size()) throw spec_error("key '" + key + "': trailing characters in '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
    std::string raw_;
};

/// FNV-1a, used to fingerprint spec files in run manifests.
inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace lorentz
