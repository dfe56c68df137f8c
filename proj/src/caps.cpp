#include "hforge/caps.hpp"

#include "hforge/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <string>

namespace hforge {

Caps Caps::parse(std::string_view text)
{
    Caps caps;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw DomainError("caps: expected key=value, got '" + std::string(item) + "'");
        const auto key = item.substr(0, eq);
        const auto value_text = item.substr(eq + 1);
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc{} || ptr != value_text.data() + value_text.size())
            throw DomainError("caps: bad number '" + std::string(value_text) + "'");
        if (key == "policies")
            caps.policies = value;
        else if (key == "states")
            caps.states = value;
        else if (key == "sat_vars")
            caps.sat_vars = value;
        else
            throw DomainError("caps: unknown key '" + std::string(key) + "'");
    }
    return caps;
}

Caps Caps::from_env()
{
    const char* env = std::getenv("HARDNESS_FORGE_CAPS");
    return env ? parse(env) : Caps{};
}

} // namespace hforge
