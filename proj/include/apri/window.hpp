// Copyright 2026 The APRI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apri/outcomes.hpp"
#include "apri/schema_io.hpp"

namespace apri {

/// One classification case: an outcome index per (variable, window slot),
/// stored slot-major at [slot * variables + var]. A variable's MISSING index
/// marks an absent value. Slot 0 is the current record, slot s its s-th
/// predecessor in the same group.
struct CaseRecord {
  std::vector<std::uint32_t> outcomes;
  std::uint64_t id = 0;
  std::string group;
  std::optional<std::uint32_t> actual_class;
};

/// A raw input record with field values in schema order.
struct RawRecord {
  std::vector<std::string> fields;
  std::string class_value{kMissingToken};
  std::string group;
  std::uint64_t id = 0;
};

/// Streaming moving-window state. Keeps the last window-1 encoded records of
/// every group.
class WindowState {
 public:
  WindowState(int window, std::size_t variables, const OutcomeTable& outcomes);

  /// Appends a record's slot-0 outcomes and writes the full case into out.
  void push(std::string_view group, std::span<const std::uint32_t> current,
            std::vector<std::uint32_t>& out);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  int window_;
  std::size_t vars_;
  std::vector<std::uint32_t> missing_;  // MISSING index per variable
  std::unordered_map<std::string, std::deque<std::vector<std::uint32_t>>, Hash,
                     std::equal_to<>>
      history_;
};

/// Builds one case per record. Predecessors beyond a group boundary are
/// MISSING; the class label comes from the current record.
std::vector<CaseRecord> window_expand(std::span<const RawRecord> records,
                                      const Schema& schema,
                                      const OutcomeTable& outcomes);

/// Encodes the slot-0 outcomes of a streamed record.
void encode_record(const RecordView& r, const OutcomeTable& outcomes,
                   std::vector<std::uint32_t>& out);

}  // namespace apri
