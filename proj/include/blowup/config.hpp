#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

// Line-oriented "key = value" files; '#' starts a comment. Every subcommand has a typed
// schema, unknown keys and malformed values raise ConfigError.
enum class ValueType { Integer, Real, Text, Flag, RealList };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string fallback;  // default, in the same textual form as the file
    std::string help;
};

class Config {
public:
    Config() = default;
    explicit Config(std::vector<KeySpec> schema);

    // apply one textual assignment; line is used in error messages (0 = not from a file)
    void set(const std::string& key, const std::string& value, int line = 0);

    long get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    std::string get_text(const std::string& key) const;
    bool get_flag(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    // every key in schema order with its effective value
    std::vector<std::pair<std::string, std::string>> echo() const;
    const std::vector<KeySpec>& schema() const { return schema_; }

private:
    const KeySpec& spec(const std::string& key) const;
    std::vector<KeySpec> schema_;
    std::map<std::string, std::string> values_;
};

const std::vector<std::string>& subcommands();
const std::vector<KeySpec>& schema_for(const std::string& subcommand);

Config parse_config(const std::string& text, const std::string& subcommand);
Config load_config(const std::string& path, const std::string& subcommand);
// defaults only
Config default_config(const std::string& subcommand);

// human-readable schema listing for --help output and the README
std::string describe_schema(const std::string& subcommand);

}  // namespace blowup
