// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#include "posesym/error.hpp"

// Out-of-line anchor so the exception vtables live in the core library.
namespace posesym {
static_assert(static_cast<int>(ErrorKind::numerical) == 3);
}  // namespace posesym
