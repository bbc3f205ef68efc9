#pragma once
/// Flag resolution with the precedence command line > environment > config
/// file > built-in default. Values from the environment and the config file
/// are turned into ordinary arguments for any flag the command line left out.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mzp/ingest.hpp"

namespace mzp::cli {

struct FlagSpec {
    std::string name;  ///< long name without dashes, e.g. "zone-budget"
    bool boolean = false;
    std::string negated;  ///< for booleans: the "off" spelling, e.g. "no-perturb"

    std::string env() const {
        std::string e = "MZP_";
        for (char c : name) e += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return e;
    }
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& key) {
    const char* v = std::getenv(key.c_str());
    return v ? std::optional<std::string>(v) : std::nullopt;
}

/// True if argv already sets `--name`, `--name=...` or the negated spelling.
inline bool given(const std::vector<std::string>& args, const FlagSpec& f) {
    for (const auto& a : args) {
        if (a == "--") break;
        for (const std::string& n : {f.name, f.negated}) {
            if (n.empty()) continue;
            const std::string flag = "--" + n;
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        }
    }
    return false;
}

inline bool parse_bool(const std::string& text, const std::string& where) {
    std::string s;
    for (char c : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw InputError(where + ": expected a boolean, got '" + text + "'");
}

/// Config files are JSON objects keyed by flag name; '-' and '_' are interchangeable.
inline std::optional<json> config_value(const json& config, const FlagSpec& f) {
    if (!config.is_object()) return std::nullopt;
    std::string underscored = f.name;
    for (char& c : underscored)
        if (c == '-') c = '_';
    for (const std::string& key : {f.name, underscored})
        if (config.contains(key)) return config.at(key);
    return std::nullopt;
}

inline std::string config_text(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw InputError(where + ": expected a string, number or boolean");
}

/// Append arguments for flags absent from `args`, taking each value from the
/// environment first and the config document second.
inline std::vector<std::string> resolve(std::vector<std::string> args, const std::vector<FlagSpec>& flags,
                                        const json& config, const EnvLookup& env = process_env) {
    std::vector<std::string> extra;
    for (const auto& f : flags) {
        if (given(args, f)) continue;
        std::optional<std::string> value;
        std::string where;
        if (auto e = env(f.env())) {
            value = *e;
            where = "environment variable " + f.env();
        } else if (auto c = config_value(config, f)) {
            where = "config key '" + f.name + "'";
            value = config_text(*c, where);
        }
        if (!value) continue;
        if (f.boolean) {
            const bool on = parse_bool(*value, where);
            if (on) extra.push_back("--" + f.name);
            else if (!f.negated.empty()) extra.push_back("--" + f.negated);
        } else {
            extra.push_back("--" + f.name);
            extra.push_back(*value);
        }
    }
    auto end = std::find(args.begin(), args.end(), std::string("--"));
    args.insert(end, extra.begin(), extra.end());
    return args;
}

/// Value of `--config PATH` / `--config=PATH`, else MZP_CONFIG.
inline std::optional<std::string> config_path(const std::vector<std::string>& args, const EnvLookup& env = process_env) {
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--") break;
        if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
    }
    return env("MZP_CONFIG");
}

inline json load_config(const std::optional<std::string>& path) {
    if (!path) return json::object();
    json doc = read_json_file(*path);
    if (!doc.is_object()) throw ParseError(*path + ": config must be a JSON object");
    return doc;
}

}  // namespace mzp::cli
