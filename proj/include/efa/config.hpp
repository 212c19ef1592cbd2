#ifndef EFA_CONFIG_HPP
#define EFA_CONFIG_HPP

#include "efa/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace efa
{
/// Line-based `key = value` file with `[section]` headers; `#` starts a comment.
/// Keys are addressed as "section.key"; keys before the first header live in section "".
class Config
{
public:
    static Config parse(std::istream& in, const std::string& source = "<config>")
    {
        Config      c;
        std::string line, section;
        int         lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (const auto h = line.find('#'); h != std::string::npos)
                line.erase(h);
            line = trim(line);
            if (line.empty())
                continue;
            const auto where = source + ":" + std::to_string(lineno);
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError(where + ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw ConfigError(where + ": empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + ": expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            if (key.empty())
                throw ConfigError(where + ": empty key");
            const auto full = section.empty() ? key : section + "." + key;
            if (!c.values_.emplace(full, trim(line.substr(eq + 1))).second)
                throw ConfigError(where + ": duplicate key '" + full + "'");
        }
        return c;
    }

    static Config parse_string(const std::string& text)
    {
        std::istringstream in(text);
        return parse(in);
    }

    static Config load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const
    {
        const auto* v = find(key);
        return v ? *v : fallback;
    }

    std::string require_string(const std::string& key) const
    {
        const auto* v = find(key);
        if (!v)
            throw ConfigError("missing config key '" + key + "'");
        return *v;
    }

    double get_double(const std::string& key, double fallback) const
    {
        const auto* v = find(key);
        return v ? parse_number(*v, key) : fallback;
    }

    double require_double(const std::string& key) const { return parse_number(require_string(key), key); }

    int get_int(const std::string& key, int fallback) const
    {
        const double d = get_double(key, fallback);
        if (d != std::floor(d))
            throw ConfigError("config key '" + key + "' must be an integer");
        return static_cast< int >(d);
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        const auto* v = find(key);
        if (!v)
            return fallback;
        if (*v == "true" || *v == "yes" || *v == "1")
            return true;
        if (*v == "false" || *v == "no" || *v == "0")
            return false;
        throw ConfigError("config key '" + key + "' must be a boolean");
    }

    std::vector< double > get_doubles(const std::string& key, std::vector< double > fallback = {}) const
    {
        const auto* v = find(key);
        if (!v)
            return fallback;
        std::vector< double > out;
        for (const auto& item : split(*v, ','))
            out.push_back(parse_number(item, key));
        return out;
    }

    std::vector< std::string > get_strings(const std::string& key) const
    {
        const auto* v = find(key);
        return v ? split(*v, ',') : std::vector< std::string >{};
    }

    /// All keys "section.k" of one section, stripped of the prefix.
    std::map< std::string, std::string > section(const std::string& name) const
    {
        std::map< std::string, std::string > out;
        const auto                           prefix = name + ".";
        for (const auto& [k, v] : values_)
            if (k.rfind(prefix, 0) == 0)
            {
                used_.insert(k);
                out.emplace(k.substr(prefix.size()), v);
            }
        return out;
    }

    /// Throws if any key was never read; catches typos in config files.
    void reject_unused() const
    {
        for (const auto& [k, v] : values_)
            if (!used_.count(k))
                throw ConfigError("unknown config key '" + k + "'");
    }

    /// Number with an optional `a/b` fraction form, e.g. "1/80".
    static double parse_number(const std::string& text, const std::string& key = "value")
    {
        const auto s     = trim(text);
        const auto slash = s.find('/');
        if (slash != std::string::npos)
        {
            const double num = parse_number(s.substr(0, slash), key);
            const double den = parse_number(s.substr(slash + 1), key);
            if (den == 0.0)
                throw ConfigError("config key '" + key + "': zero denominator");
            return num / den;
        }
        double      v   = 0.0;
        const auto* end = s.data() + s.size();
        const auto  r   = std::from_chars(s.data(), end, v);
        if (s.empty() || r.ec != std::errc{} || r.ptr != end)
            throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
        return v;
    }

private:
    const std::string* find(const std::string& key) const
    {
        const auto it = values_.find(key);
        if (it == values_.end())
            return nullptr;
        used_.insert(key);
        return &it->second;
    }

    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector< std::string > split(const std::string& s, char sep)
    {
        std::vector< std::string > out;
        std::string                item;
        std::istringstream         in(s);
        while (std::getline(in, item, sep))
        {
            item = trim(item);
            if (!item.empty())
                out.push_back(item);
        }
        return out;
    }

    std::map< std::string, std::string > values_;
    mutable std::set< std::string >      used_;
};
} // namespace efa

#endif // EFA_CONFIG_HPP
