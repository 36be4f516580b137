// config.hpp: sectioned key = value run configuration
//
//   [lattice]
//   sites = 4
//   J = 0.1          ; numbers accept "inf" and simple fractions "a/b"
//
// Every lookup records the value used (given or default); the record is the
// effective configuration echoed into output headers and metadata.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace lightmu::app {

class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    double number(const std::string& section, const std::string& key, double fallback);
    long integer(const std::string& section, const std::string& key, long fallback);
    std::string text(const std::string& section, const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& section, const std::string& key,
                                const std::vector<double>& fallback);
    bool has(const std::string& section, const std::string& key) const;

    // Throws ConfigError naming any key in the file that no lookup touched.
    void reject_unused() const;

    const std::string& raw() const noexcept { return raw_; }
    const std::string& origin() const noexcept { return origin_; }
    using Table = std::map<std::string, std::map<std::string, std::string>>;
    const Table& effective() const noexcept { return effective_; }
    std::string effective_ini() const;

private:
    const std::string* find(const std::string& section, const std::string& key) const;
    void record(const std::string& section, const std::string& key, const std::string& value);

    std::string raw_;
    std::string origin_{"<defaults>"};
    Table given_;
    Table effective_;
    std::set<std::pair<std::string, std::string>> used_;
};

// "inf", "-inf", "1/30", "2.5e-3"
double parse_number(const std::string& text);

} // namespace lightmu::app
