/*
 Copyright 2026 The tdopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef TDOPT_PARALLEL_HPP
#define TDOPT_PARALLEL_HPP

#include <functional>

namespace tdopt {

/// Worker count: TDOPT_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [begin, end) over contiguous chunks. Each index must
/// write only its own output slot, which keeps results independent of the
/// thread count. The first exception thrown by any worker is rethrown.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace tdopt

#endif  // TDOPT_PARALLEL_HPP
