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

#include "apri/schema_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "apri/error.hpp"

namespace apri {
namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw Error(ErrorKind::kParse,
              "schema line " + std::to_string(line_no) + ": " + msg);
}

double parse_fraction(std::string_view tok, std::string_view directive,
                      int line_no) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail(line_no, std::string(directive) + " expects a number, got '" +
                      std::string(tok) + "'");
  if (!(v >= 0.0 && v <= 1.0))
    fail(line_no, std::string(directive) + " must lie in [0,1], got " +
                      std::string(tok));
  return v;
}

template <typename Int>
Int parse_int(std::string_view tok, std::string_view directive, int line_no) {
  Int v{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail(line_no, std::string(directive) + " expects an integer, got '" +
                      std::string(tok) + "'");
  return v;
}

}  // namespace

int Schema::field_index(std::string_view name) const {
  for (std::size_t i = 0; i < field_vars.size(); ++i)
    if (field_vars[i].name == name) return static_cast<int>(i);
  return -1;
}

Schema parse_schema(std::string_view text) {
  Schema schema;
  std::set<std::string, std::less<>> names;
  bool have_class = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string_view d = tok[0];
    auto want_args = [&](std::size_t lo, std::size_t hi) {
      if (tok.size() - 1 < lo || tok.size() - 1 > hi)
        fail(line_no, "wrong number of arguments for '" + std::string(d) + "'");
    };
    auto claim_name = [&](std::string_view name) {
      if (!names.insert(std::string(name)).second)
        fail(line_no, "duplicate variable name '" + std::string(name) + "'");
    };

    if (d == "class") {
      want_args(1, 1);
      if (have_class) fail(line_no, "class declared twice");
      claim_name(tok[1]);
      schema.class_var = tok[1];
      have_class = true;
    } else if (d == "var") {
      want_args(2, 3);
      VariableSpec v;
      v.name = tok[1];
      if (tok[2] == "categorical") {
        if (tok.size() == 4)
          fail(line_no, "categorical variable takes no discretizer");
        v.kind = VarKind::kCategorical;
      } else if (tok[2] == "continuous") {
        v.kind = VarKind::kContinuous;
        v.discretizer = Discretizer::kEntropy;
        if (tok.size() == 4) {
          if (tok[3] == "entropy")
            v.discretizer = Discretizer::kEntropy;
          else if (tok[3] == "quantile")
            v.discretizer = Discretizer::kQuantile;
          else
            fail(line_no, "unknown discretizer '" + std::string(tok[3]) + "'");
        }
      } else {
        fail(line_no, "unknown kind '" + std::string(tok[2]) + "'");
      }
      claim_name(v.name);
      schema.field_vars.push_back(std::move(v));
    } else if (d == "t_prime") {
      want_args(1, 1);
      schema.t_prime = parse_fraction(tok[1], d, line_no);
    } else if (d == "t_field") {
      want_args(1, 1);
      schema.t_field = parse_fraction(tok[1], d, line_no);
    } else if (d == "window") {
      want_args(1, 1);
      schema.window = parse_int<int>(tok[1], d, line_no);
      if (schema.window < 1) fail(line_no, "window must be >= 1");
    } else if (d == "group") {
      want_args(1, 1);
      schema.group_key = std::string(tok[1]);
    } else if (d == "max_parents") {
      want_args(1, 1);
      schema.max_parents = parse_int<int>(tok[1], d, line_no);
      if (schema.max_parents < 0) fail(line_no, "max_parents must be >= 0");
    } else if (d == "max_bins") {
      want_args(1, 1);
      schema.max_bins = parse_int<int>(tok[1], d, line_no);
      if (schema.max_bins < 1) fail(line_no, "max_bins must be >= 1");
    } else if (d == "smoothing") {
      want_args(1, 1);
      double a = 0;
      auto [p, ec] = std::from_chars(tok[1].data(),
                                     tok[1].data() + tok[1].size(), a);
      if (ec != std::errc() || p != tok[1].data() + tok[1].size() ||
          !(a >= 0.0) || std::isinf(a))
        fail(line_no, "smoothing must be a finite number >= 0");
      schema.smoothing = a;
    } else if (d == "max_model_cells") {
      want_args(1, 1);
      schema.max_model_cells = parse_int<std::uint64_t>(tok[1], d, line_no);
    } else if (d == "positive") {
      want_args(1, 1);
      schema.positive_class = std::string(tok[1]);
    } else if (d == "seed") {
      want_args(1, 1);
      schema.seed = parse_int<std::uint64_t>(tok[1], d, line_no);
    } else if (d == "reservoir") {
      want_args(1, 1);
      schema.reservoir_capacity = parse_int<std::size_t>(tok[1], d, line_no);
      if (schema.reservoir_capacity < 1) fail(line_no, "reservoir must be >= 1");
    } else if (d == "max_outcomes") {
      want_args(1, 1);
      schema.max_outcomes = parse_int<std::size_t>(tok[1], d, line_no);
    } else {
      fail(line_no, "unknown directive '" + std::string(d) + "'");
    }
  }
  if (!have_class) throw Error(ErrorKind::kParse, "schema declares no class");
  if (schema.group_key && names.count(*schema.group_key))
    throw Error(ErrorKind::kParse, "group column '" + *schema.group_key +
                                       "' must not be a declared variable");
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::kIo, "cannot open schema file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string format_schema(const Schema& s) {
  auto num = [](double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
  };
  std::ostringstream out;
  out << "class " << s.class_var << '\n';
  for (const auto& v : s.field_vars) {
    out << "var " << v.name << ' ';
    if (v.continuous())
      out << "continuous "
          << (v.discretizer == Discretizer::kQuantile ? "quantile" : "entropy");
    else
      out << "categorical";
    out << '\n';
  }
  out << "t_prime " << num(s.t_prime) << '\n'
      << "t_field " << num(s.t_field) << '\n'
      << "window " << s.window << '\n';
  if (s.group_key) out << "group " << *s.group_key << '\n';
  out << "max_parents " << s.max_parents << '\n'
      << "max_bins " << s.max_bins << '\n'
      << "smoothing " << num(s.smoothing) << '\n'
      << "max_model_cells " << s.max_model_cells << '\n';
  if (s.positive_class) out << "positive " << *s.positive_class << '\n';
  out << "seed " << s.seed << '\n'
      << "reservoir " << s.reservoir_capacity << '\n'
      << "max_outcomes " << s.max_outcomes << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV

bool split_csv_record(std::string_view line, std::vector<std::string>& out) {
  out.clear();
  std::string cell;
  bool quoted = false;
  bool after_quote = false;  // just closed a quoted section
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
      after_quote = false;
    } else if (c == '"') {
      if (!cell.empty() || after_quote) return false;
      quoted = true;
    } else {
      if (after_quote) return false;
      cell.push_back(c);
    }
  }
  if (quoted) return false;
  out.push_back(std::move(cell));
  return true;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

// Reads one logical record, joining physical lines while a quote is open.
bool read_record(std::istream& in, std::string& record) {
  record.clear();
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (any) record.push_back('\n');
    record += line;
    any = true;
    std::size_t quotes = 0;
    for (char c : record) quotes += (c == '"');
    if (quotes % 2 == 0) return true;
  }
  return any;
}

}  // namespace

CsvSource CsvSource::from_file(std::filesystem::path path) {
  CsvSource src;
  src.name_ = path.string();
  src.path_ = std::move(path);
  auto in = src.open();
  std::string rec;
  if (!read_record(*in, rec) || !split_csv_record(rec, src.header_))
    throw Error(ErrorKind::kData, "missing or malformed header in '" +
                                      src.name_ + "'");
  return src;
}

CsvSource CsvSource::from_text(std::string text) {
  CsvSource src;
  src.name_ = "<memory>";
  src.text_ = std::make_shared<const std::string>(std::move(text));
  auto in = src.open();
  std::string rec;
  if (!read_record(*in, rec) || !split_csv_record(rec, src.header_))
    throw Error(ErrorKind::kData, "missing or malformed header in " + src.name_);
  return src;
}

std::unique_ptr<std::istream> CsvSource::open() const {
  if (path_) {
    auto in = std::make_unique<std::ifstream>(*path_, std::ios::binary);
    if (!*in)
      throw Error(ErrorKind::kIo, "cannot open data file '" + name_ + "'");
    return in;
  }
  return std::make_unique<std::istringstream>(*text_);
}

void CsvSource::for_each_row(
    const std::function<void(std::span<const std::string>, bool)>& fn) const {
  auto in = open();
  std::string rec;
  std::vector<std::string> cells;
  read_record(*in, rec);  // header
  while (read_record(*in, rec)) {
    if (rec.empty()) continue;
    bool ok = split_csv_record(rec, cells);
    fn(cells, ok);
  }
  if (in->bad())
    throw Error(ErrorKind::kIo, "read error on '" + name_ + "'");
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(CsvSource source, const Schema& schema)
    : source_(std::move(source)), schema_(schema) {
  const auto& header = source_.header();
  auto find = [&](const std::string& col) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == col) return i;
    throw Error(ErrorKind::kData, "missing required column '" + col +
                                      "' in header of '" + source_.name() + "'");
  };
  class_col_ = find(schema_.class_var);
  for (const auto& v : schema_.field_vars) field_cols_.push_back(find(v.name));
  if (schema_.group_key) group_col_ = find(*schema_.group_key);
}

PassStats iterate_pass(Dataset& ds,
                       const std::function<void(const RecordView&)>& visitor) {
  const std::size_t arity = ds.source_.header().size();
  const std::size_t nf = ds.field_cols_.size();
  std::vector<std::string_view> fields(nf);
  std::vector<double> numeric(nf);
  std::uint64_t index = 0, rows = 0, rejected = 0, nan_missing = 0;

  ds.source_.for_each_row([&](std::span<const std::string> cells, bool ok) {
    ++index;
    if (!ok || cells.size() != arity) {
      ++rejected;
      return;
    }
    std::uint64_t nan_here = 0;
    for (std::size_t i = 0; i < nf; ++i) {
      const std::string& cell = cells[ds.field_cols_[i]];
      fields[i] = cell;
      numeric[i] = std::numeric_limits<double>::quiet_NaN();
      if (!ds.schema_.field_vars[i].continuous() || cell == kMissingToken)
        continue;
      double v = 0;
      const char* b = cell.data();
      const char* e = b + cell.size();
      if (b != e && *b == '+') ++b;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e || b == e) {
        ++rejected;
        return;
      }
      if (std::isnan(v)) {
        fields[i] = kMissingToken;
        ++nan_here;
      } else {
        numeric[i] = v;
      }
    }
    nan_missing += nan_here;
    RecordView rv;
    ++rows;
    rv.ordinal = index;
    rv.fields = fields;
    rv.numeric = numeric;
    rv.class_value = cells[ds.class_col_];
    if (ds.group_col_) rv.group = cells[*ds.group_col_];
    visitor(rv);
  });

  ds.stats_.passes += 1;
  ds.stats_.rows = rows;
  ds.stats_.rejected = rejected;
  ds.stats_.nan_missing = nan_missing;
  return ds.stats_;
}

}  // namespace apri
