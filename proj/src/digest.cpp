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

#include "digest.hpp"

#include <memory>
#include <string>

#include <openssl/evp.h>

#include "pgpfwd/errors.hpp"

namespace pgpfwd::detail {

namespace {

Bytes run_digest(const EVP_MD* md, ByteView data) {
  Bytes out(static_cast<std::size_t>(EVP_MD_get_size(md)));
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1) {
    throw Error(ErrorCode::kUnsupportedAlgorithm, "digest failed");
  }
  out.resize(len);
  return out;
}

}  // namespace

Bytes sha1(ByteView data) { return run_digest(EVP_sha1(), data); }

Bytes digest_by_id(std::uint8_t hash_id, ByteView data) {
  switch (hash_id) {
    case 0x08: return run_digest(EVP_sha256(), data);
    case 0x09: return run_digest(EVP_sha384(), data);
    case 0x0A: return run_digest(EVP_sha512(), data);
    default:
      throw Error(ErrorCode::kUnsupportedAlgorithm,
                  "hash id " + std::to_string(hash_id));
  }
}

}  // namespace pgpfwd::detail
