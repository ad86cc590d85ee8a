#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rhlab/errors.hpp"

namespace rhlab {

/// Flat `key = value` config file. Blank lines and lines starting with '#'
/// are skipped. Values keep internal whitespace; surrounding space is trimmed.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig parse(std::istream& in, const std::string& origin) {
        KvConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                fail(ErrorKind::Parse, origin + ":" + std::to_string(lineno) +
                                           ": expected key = value");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                fail(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KvConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::Input, "cannot open " + path);
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end())
            fail(ErrorKind::Config, "missing config key: " + key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    long long get_int(const std::string& key) const { return to_int(key, get(key)); }
    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, get(key)); }
    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static long long to_int(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        long long out = 0;
        try {
            out = std::stoll(v, &pos);
        } catch (...) {
            fail(ErrorKind::Parse, "config key " + key + ": not an integer: " + v);
        }
        if (pos != v.size())
            fail(ErrorKind::Parse, "config key " + key + ": not an integer: " + v);
        return out;
    }

    static double to_double(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        double out = 0;
        try {
            out = std::stod(v, &pos);
        } catch (...) {
            fail(ErrorKind::Parse, "config key " + key + ": not a number: " + v);
        }
        if (pos != v.size())
            fail(ErrorKind::Parse, "config key " + key + ": not a number: " + v);
        return out;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace rhlab
