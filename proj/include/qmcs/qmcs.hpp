// Copyright 2026 The qmcs Authors
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


/**
 * @file
 * Umbrella header for the library. File formats live in qmcs/io.hpp, which
 * additionally needs nlohmann/json.
 */

#pragma once

#include "qmcs/amplitude_estimation.hpp"
#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/gibbs.hpp"
#include "qmcs/markov.hpp"
#include "qmcs/mean_estimation.hpp"
#include "qmcs/parallel.hpp"
#include "qmcs/partition.hpp"
#include "qmcs/powering.hpp"
#include "qmcs/quantum_walk.hpp"
#include "qmcs/tvd.hpp"
