/*
 * Copyright 2026 The HRR Authors
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

#pragma once

#include "hrr/error.hpp"
#include "hrr/hash.hpp"
#include "hrr/doc_model.hpp"
#include "hrr/tokenizer.hpp"
#include "hrr/chunker.hpp"
#include "hrr/embedding.hpp"
#include "hrr/vector_index.hpp"
#include "hrr/rerank.hpp"
#include "hrr/retrievers.hpp"
#include "hrr/eval.hpp"
#include "hrr/remote.hpp"
#include "hrr/config.hpp"
#include "hrr/engine.hpp"
#include "hrr/synthetic.hpp"
