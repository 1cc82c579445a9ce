// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace bmdf {

enum class WBranch { Principal, MinusOne };

/// Real Lambert W: the w with w * exp(w) == x on the requested branch.
///
/// Principal is defined for x >= -1/e and returns w >= -1; MinusOne is
/// defined for -1/e <= x < 0 and returns w <= -1. Arguments within 1e-15 of
/// -1/e return exactly -1 on either branch. Throws DomainError otherwise.
double lambert_w(double x, WBranch branch = WBranch::Principal);

inline double lambert_w0(double x) { return lambert_w(x, WBranch::Principal); }
inline double lambert_wm1(double x) { return lambert_w(x, WBranch::MinusOne); }

}  // namespace bmdf
