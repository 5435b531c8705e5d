#pragma once

#include "fountain/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <initializer_list>
#include <string>

namespace fountain {

// Configs fail closed: any key outside the list is an error.
inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where)
{
    if (!j.is_object())
        fail(Errc::parse_error, std::string(where) + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(Errc::parse_error, std::string(where) + ": unknown field \"" + key + "\"");
    if (j.contains("version") && j.at("version") != 1)
        fail(Errc::parse_error, std::string(where) + ": unsupported version");
}

} // namespace fountain
