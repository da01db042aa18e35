// Copyright 2026 The strategic-lqg Authors.
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

#pragma once

namespace slqg {

// Worker count for the OpenMP kernels. requested > 0 wins; otherwise
// the STRATEGIC_LQG_THREADS environment variable (0 or unset = auto);
// otherwise the OpenMP default. Always at least 1.
int resolve_thread_count(int requested);

}  // namespace slqg
