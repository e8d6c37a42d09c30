#pragma once

#include <functional>
#include <optional>

#include "epcgate/error.hpp"

// Runs fn and hands back the domain error it threw, if any. Lets tests
// assert on code/position/detail instead of just "it threw something".
inline std::optional<epcgate::Error> capture_error(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const epcgate::Error& e) {
        return e;
    }
    return std::nullopt;
}
