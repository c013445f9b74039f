/*
 * Copyright 2026 The pcomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCOMP_STATS_HPP_
#define PCOMP_STATS_HPP_

#include <span>

namespace pcomp::stats {

// Throw DomainError on empty input.
double mean(std::span<const double> values);
// Population standard deviation (divides by n).
double population_std(std::span<const double> values);
// Sample median; the mean of the two middle values for even lengths.
double median(std::span<const double> values);

}  // namespace pcomp::stats

#endif  // PCOMP_STATS_HPP_
