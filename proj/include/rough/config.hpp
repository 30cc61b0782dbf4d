#pragma once

#include <map>
#include <string>
#include <vector>

#include "rough/errors.hpp"

namespace rough {

/// Flat `key = value` configuration with optional `[section]` headers;
/// sectioned keys are addressed as "section.key". Lines starting with `#`
/// are comments.
struct Config {
    std::map<std::string, std::string> kv;

    static Config parse(std::istream& is);
    static Config load(const std::string& filename);

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string str(const std::string& key, const std::string& dflt) const;
    std::string require(const std::string& key) const;
    double num(const std::string& key, double dflt) const;
    long long integer(const std::string& key, long long dflt) const;
    /// Comma-separated list of numbers; empty when absent.
    std::vector<double> list(const std::string& key) const;
};

}  // namespace rough
