#include "app/config.hpp"

#include "lightmu/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lightmu::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double plain_number(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(fmt::format("'{}' is not a number", s));
    return v;
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

} // namespace

double parse_number(const std::string& text) {
    const auto s = trim(text);
    if (s.empty()) throw ConfigError("empty number");
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const double den = plain_number(trim(s.substr(slash + 1)));
        if (den == 0.0) throw ConfigError(fmt::format("'{}' divides by zero", s));
        return plain_number(trim(s.substr(0, slash))) / den;
    }
    return plain_number(s);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
    Config c;
    c.raw_ = text;
    c.origin_ = origin;
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError(fmt::format("{}: key '{}' outside a [section]", origin, section));
        }
        for (const auto& [key, value] : body) {
            // Strip trailing "; comment".
            auto v = value.get_value<std::string>();
            if (const auto semi = v.find(';'); semi != std::string::npos) v = v.substr(0, semi);
            c.given_[section][key] = trim(v);
        }
    }
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
    const auto s = given_.find(section);
    if (s == given_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

void Config::record(const std::string& section, const std::string& key, const std::string& value) {
    used_.emplace(section, key);
    effective_[section][key] = value;
}

double Config::number(const std::string& section, const std::string& key, double fallback) {
    double v = fallback;
    if (const auto* s = find(section, key)) {
        try {
            v = parse_number(*s);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
        }
    }
    record(section, key, format_number(v));
    return v;
}

long Config::integer(const std::string& section, const std::string& key, long fallback) {
    long v = fallback;
    if (const auto* s = find(section, key)) {
        const auto* end = s->data() + s->size();
        const auto [ptr, ec] = std::from_chars(s->data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError(fmt::format("[{}] {}: '{}' is not an integer", section, key, *s));
        }
    }
    record(section, key, std::to_string(v));
    return v;
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) {
    const auto* s = find(section, key);
    const std::string v = s ? *s : fallback;
    record(section, key, v);
    return v;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) {
    std::vector<double> v = fallback;
    if (const auto* s = find(section, key)) {
        v.clear();
        std::istringstream is(*s);
        for (std::string item; std::getline(is, item, ',');) {
            try {
                v.push_back(parse_number(item));
            } catch (const ConfigError& e) {
                throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
            }
        }
    }
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ", " : "") + format_number(v[i]);
    record(section, key, joined);
    return v;
}

void Config::reject_unused() const {
    for (const auto& [section, keys] : given_) {
        for (const auto& [key, value] : keys) {
            if (!used_.count({section, key})) {
                throw ConfigError(fmt::format("{}: unknown key [{}] {}", origin_, section, key));
            }
        }
    }
}

std::string Config::effective_ini() const {
    std::string out;
    for (const auto& [section, keys] : effective_) {
        out += fmt::format("[{}]\n", section);
        for (const auto& [key, value] : keys) out += fmt::format("{} = {}\n", key, value);
    }
    return out;
}

} // namespace lightmu::app
