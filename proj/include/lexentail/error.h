// Copyright 2026 The lex-entail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEXENTAIL_ERROR_H_
#define LEXENTAIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace lexentail {

// Base class for every error raised by the harness. Subsystems derive their
// own types so callers can tell a corrupt corpus from a backend outage.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lexentail

#endif  // LEXENTAIL_ERROR_H_
