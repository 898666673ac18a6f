// Copyright 2026-present the featstress project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "featstress/kernels.hpp"

namespace featstress::kern {

#if defined(FEATSTRESS_ENABLE_AVX2)

namespace detail {
const Ops& avx2_table();
}

bool avx2_available() {
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
}

const Ops& avx2_ops() { return detail::avx2_table(); }

#else

bool avx2_available() { return false; }
const Ops& avx2_ops() { return scalar_ops(); }

#endif

const Ops& active() {
  static const Ops& chosen = avx2_available() ? avx2_ops() : scalar_ops();
  return chosen;
}

}  // namespace featstress::kern
