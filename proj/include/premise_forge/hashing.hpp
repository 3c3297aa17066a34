// Copyright 2026 The premise-forge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <string_view>

namespace premise_forge {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Standard (RFC 4648, padded) base64.
std::string base64_encode(std::span<const unsigned char> bytes);
std::string base64_encode(std::string_view bytes);

}  // namespace premise_forge
