/* Copyright 2026 The csreject Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CSREJECT_CSREJECT_HPP_
#define CSREJECT_CSREJECT_HPP_

#include "csreject/baselines.hpp"
#include "csreject/core.hpp"
#include "csreject/data.hpp"
#include "csreject/gradcheck.hpp"
#include "csreject/harness.hpp"
#include "csreject/losses.hpp"
#include "csreject/models.hpp"
#include "csreject/posterior.hpp"
#include "csreject/random.hpp"
#include "csreject/surrogate.hpp"
#include "csreject/theory.hpp"
#include "csreject/weaksup.hpp"

#endif  // CSREJECT_CSREJECT_HPP_
