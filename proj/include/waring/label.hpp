#pragma once

#include <compare>
#include <ostream>

#include "waring/errors.hpp"

namespace waring {

/// (a, b): a conjugate pairs and b real points; weight 2a + b.
struct Label {
    int a = 0;
    int b = 0;

    constexpr Label() = default;
    constexpr Label(int pairs, int reals) : a(pairs), b(reals)
    {
        if (a < 0 || b < 0 || (a == 0 && b == 0))
            throw InvalidArgument("Label: need (a, b) in N^2 \\ {(0, 0)}");
    }

    constexpr auto operator<=>(const Label&) const = default;
};

constexpr int weight(Label l) noexcept { return 2 * l.a + l.b; }

inline std::ostream& operator<<(std::ostream& os, Label l)
{
    return os << '(' << l.a << ',' << l.b << ')';
}

} // namespace waring
