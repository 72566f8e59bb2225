// Copyright 2026 The pairnas Authors.
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


// Convenience header pulling in the whole library.

#ifndef PAIRNAS_PAIRNAS_HPP_
#define PAIRNAS_PAIRNAS_HPP_

#include "pairnas/error.hpp"
#include "pairnas/importance.hpp"
#include "pairnas/metrics.hpp"
#include "pairnas/oracle.hpp"
#include "pairnas/pairs.hpp"
#include "pairnas/pipeline.hpp"
#include "pairnas/random.hpp"
#include "pairnas/ranker.hpp"
#include "pairnas/search.hpp"
#include "pairnas/space.hpp"

#endif  // PAIRNAS_PAIRNAS_HPP_
