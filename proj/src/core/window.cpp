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

#include "apri/window.hpp"

#include <algorithm>

namespace apri {

WindowState::WindowState(int window, std::size_t variables,
                         const OutcomeTable& outcomes)
    : window_(window), vars_(variables) {
  for (const auto& v : outcomes.vars) missing_.push_back(v.missing_index());
}

void WindowState::push(std::string_view group,
                       std::span<const std::uint32_t> current,
                       std::vector<std::uint32_t>& out) {
  out.resize(vars_ * static_cast<std::size_t>(window_));
  std::copy(current.begin(), current.end(), out.begin());
  if (window_ == 1) return;
  auto it = history_.find(group);
  if (it == history_.end())
    it = history_.emplace(std::string(group), std::deque<std::vector<std::uint32_t>>{})
             .first;
  auto& hist = it->second;  // most recent first
  for (int s = 1; s < window_; ++s) {
    auto dst = out.begin() + static_cast<std::ptrdiff_t>(s * vars_);
    if (static_cast<std::size_t>(s) <= hist.size())
      std::copy(hist[s - 1].begin(), hist[s - 1].end(), dst);
    else
      std::copy(missing_.begin(), missing_.end(), dst);
  }
  hist.emplace_front(current.begin(), current.end());
  if (hist.size() > static_cast<std::size_t>(window_ - 1)) hist.pop_back();
}

std::vector<CaseRecord> window_expand(std::span<const RawRecord> records,
                                      const Schema& schema,
                                      const OutcomeTable& outcomes) {
  const std::size_t nv = outcomes.vars.size();
  WindowState state(schema.window, nv, outcomes);
  std::vector<CaseRecord> cases;
  cases.reserve(records.size());
  std::vector<std::uint32_t> current(nv);
  for (const auto& r : records) {
    for (std::size_t i = 0; i < nv; ++i)
      current[i] = outcomes.vars[i].encode_text(r.fields.at(i));
    CaseRecord c;
    c.id = r.id;
    c.group = r.group;
    c.actual_class = outcomes.class_index(r.class_value);
    state.push(r.group, current, c.outcomes);
    cases.push_back(std::move(c));
  }
  return cases;
}

void encode_record(const RecordView& r, const OutcomeTable& outcomes,
                   std::vector<std::uint32_t>& out) {
  out.resize(outcomes.vars.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = outcomes.vars[i].encode(r.fields[i], r.numeric[i]);
}

}  // namespace apri
