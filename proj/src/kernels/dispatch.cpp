// Copyright 2026 The Anytime Authors
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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "anytime/kernels.hpp"

namespace anytime::kernels {
namespace {

const KernelTable* select_from_environment() {
  const char* env = std::getenv("ANYTIME_SIMD");
  const std::string_view choice = env ? env : "auto";
  if (choice == "scalar") return &scalar_table();
  const KernelTable* wide = avx2_table();
  return wide ? wide : &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{select_from_environment()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

const KernelTable& set_active(const KernelTable& table) {
  return *slot().exchange(&table, std::memory_order_acq_rel);
}

}  // namespace anytime::kernels
