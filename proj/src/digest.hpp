// Copyright 2026 The pgpfwd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

#include "pgpfwd/bytes.hpp"

namespace pgpfwd::detail {

Bytes sha1(ByteView data);

// OpenPGP hash algorithm id (0x08 SHA-256, 0x09 SHA-384, 0x0A SHA-512).
// Throws Error(kUnsupportedAlgorithm) for any other id.
Bytes digest_by_id(std::uint8_t hash_id, ByteView data);

}  // namespace pgpfwd::detail
