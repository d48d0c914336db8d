/*
 * Copyright (c) 2026, the cvbench authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CVBENCH_CVBENCH_HPP
#define CVBENCH_CVBENCH_HPP

#include "cvbench/clustering.hpp"
#include "cvbench/core.hpp"
#include "cvbench/datagen.hpp"
#include "cvbench/evaluation.hpp"
#include "cvbench/external_indexes.hpp"
#include "cvbench/internal_indexes.hpp"
#include "cvbench/io.hpp"
#include "cvbench/parallel.hpp"
#include "cvbench/pipeline.hpp"
#include "cvbench/stats.hpp"
#include "cvbench/supervised.hpp"

#endif
