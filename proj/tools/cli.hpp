/*
 * Copyright 2026 The graphgp Authors
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

#ifndef GRAPHGP_TOOLS_CLI_HPP
#define GRAPHGP_TOOLS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "graphgp/graph.hpp"

namespace graphgp::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

/// Runs one command line; args[0] is the program name. Nothing is written to
/// std::cout or std::cerr directly.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Graph sources:
///   sensor[:N[:k]]            random sensor graph (default N = 30, k = 6)
///   ba[:N[:m0[:m]]]           Barabasi-Albert graph (default 30, 10, 5)
///   edges:PATH or PATH        edge-list file
///   knn:PATH:k                k-NN graph over a coordinates CSV
///   threshold:PATH:t          distance-threshold graph over a coordinates CSV
Graph load_graph(const std::string& spec, std::uint64_t seed);

}  // namespace graphgp::cli

#endif  // GRAPHGP_TOOLS_CLI_HPP
