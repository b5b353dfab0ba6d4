/*
 * Copyright 2026 The recaudit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string_view>

namespace recaudit {

inline constexpr std::string_view kVersion = "0.1.0";

// Name and revision of the pseudo-random generator used for splits, shuffles
// and factor initialization. Recorded in manifests so runs are reproducible
// across builds and machines.
inline constexpr std::string_view kRngAlgorithm = "xoshiro256ss-v1";

// Name of the content-hash function recorded in manifests.
inline constexpr std::string_view kHashAlgorithm = "fnv1a64";

}  // namespace recaudit
