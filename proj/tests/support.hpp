#pragma once

#include <algorithm>
#include <cmath>

// Relative closeness |a - b| <= rel * max(|a|, |b|); exact zeros compare equal.
inline bool near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }
