#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "outwave/grid.hpp"

namespace outwave {

/// Strict-subset TOML reader: [tables], key = value with strings, numbers,
/// booleans and flat arrays, '#' comments. Enough for scenario files.
class TomlConfig {
  public:
    using Value = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

    static TomlConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        ensure(in.good(), "cannot open config: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static TomlConfig parse(const std::string& text) {
        TomlConfig cfg;
        std::stringstream in(text);
        std::string line, table;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip_comment(line);
            std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                ensure(t.back() == ']', err(lineno, "unterminated table header"));
                table = trim(t.substr(1, t.size() - 2));
                ensure(!table.empty(), err(lineno, "empty table name"));
                cfg.tables_[table];
                continue;
            }
            auto eq = t.find('=');
            ensure(eq != std::string::npos, err(lineno, "expected key = value"));
            std::string key = trim(t.substr(0, eq));
            std::string val = trim(t.substr(eq + 1));
            ensure(!key.empty() && !val.empty(), err(lineno, "empty key or value"));
            cfg.tables_[table][key] = parse_value(val, lineno);
        }
        return cfg;
    }

    bool has(const std::string& table, const std::string& key) const {
        auto t = tables_.find(table);
        return t != tables_.end() && t->second.count(key) > 0;
    }

    bool has_table(const std::string& table) const { return tables_.count(table) > 0; }

    double number(const std::string& table, const std::string& key) const {
        return std::get<double>(get(table, key));
    }
    double number_or(const std::string& table, const std::string& key,
                     double fallback) const {
        return has(table, key) ? number(table, key) : fallback;
    }
    bool boolean_or(const std::string& table, const std::string& key,
                    bool fallback) const {
        return has(table, key) ? std::get<bool>(get(table, key)) : fallback;
    }
    std::string text(const std::string& table, const std::string& key) const {
        return std::get<std::string>(get(table, key));
    }
    std::string text_or(const std::string& table, const std::string& key,
                        const std::string& fallback) const {
        return has(table, key) ? text(table, key) : fallback;
    }
    std::vector<double> numbers(const std::string& table,
                                const std::string& key) const {
        const Value& v = get(table, key);
        if (auto* arr = std::get_if<std::vector<double>>(&v)) return *arr;
        return {std::get<double>(v)};
    }
    std::vector<std::string> texts(const std::string& table,
                                   const std::string& key) const {
        const Value& v = get(table, key);
        if (auto* arr = std::get_if<std::vector<std::string>>(&v)) return *arr;
        return {std::get<std::string>(v)};
    }

  private:
    std::map<std::string, std::map<std::string, Value>> tables_;

    static std::string err(int lineno, const std::string& what) {
        return "config parse error at line " + std::to_string(lineno) + ": " + what;
    }

    static void strip_comment(std::string& line) {
        bool in_str = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line.erase(i);
                return;
            }
        }
    }

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    const Value& get(const std::string& table, const std::string& key) const {
        auto t = tables_.find(table);
        ensure(t != tables_.end(), "missing config table: [" + table + "]");
        auto k = t->second.find(key);
        ensure(k != t->second.end(),
               "missing config key: " + table + "." + key);
        return k->second;
    }

    static Value parse_scalar(const std::string& v, int lineno) {
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        try {
            size_t used = 0;
            double d = std::stod(v, &used);
            ensure(used == v.size(), err(lineno, "trailing junk in number"));
            return d;
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(err(lineno, "cannot parse value '" + v + "'"));
        }
    }

    static Value parse_value(const std::string& v, int lineno) {
        if (v.front() != '[') return parse_scalar(v, lineno);
        ensure(v.back() == ']', err(lineno, "unterminated array"));
        std::string body = v.substr(1, v.size() - 2);
        std::vector<std::string> items;
        std::string cur;
        bool in_str = false;
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) items.push_back(trim(cur));
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool all_nums = true;
        for (const auto& it : items) {
            Value s = parse_scalar(it, lineno);
            if (auto* d = std::get_if<double>(&s)) {
                nums.push_back(*d);
            } else if (auto* str = std::get_if<std::string>(&s)) {
                all_nums = false;
                strs.push_back(*str);
            } else {
                throw std::runtime_error(err(lineno, "unsupported array element"));
            }
        }
        if (all_nums) return nums;
        ensure(nums.empty(), err(lineno, "mixed array types"));
        return strs;
    }
};

}  // namespace outwave
