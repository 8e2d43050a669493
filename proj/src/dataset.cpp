#include "cfaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "cfaudit/rng.hpp"

namespace cfaudit {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error(message);
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = line.find(delim, begin);
    if (end == std::string::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, end - begin));
    begin = end + 1;
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

bool Column::admits(double value) const {
  if (kind == ColumnKind::continuous) return true;
  return std::find(categories.begin(), categories.end(), value) != categories.end();
}

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::size_t labels = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& col = columns_[i];
    if (col.name.empty()) fail("schema: column " + std::to_string(i) + " has an empty name");
    if (col.kind == ColumnKind::categorical && col.categories.empty())
      fail("schema: categorical column '" + col.name + "' has an empty code set");
    switch (col.role) {
      case ColumnRole::legitimate: legitimate_idx_.push_back(i); break;
      case ColumnRole::sensitive: sensitive_idx_.push_back(i); break;
      case ColumnRole::label:
        label_idx_ = i;
        ++labels;
        break;
    }
  }
  if (labels != 1) fail("schema: expected exactly one label column, found " + std::to_string(labels));
  if (legitimate_idx_.empty()) fail("schema: at least one legitimate column is required");
  if (sensitive_idx_.empty()) fail("schema: at least one sensitive column is required");
  const Column& label = columns_[label_idx_];
  if (label.kind != ColumnKind::categorical || label.categories.size() != 2)
    fail("schema: label column '" + label.name + "' must be categorical with exactly two codes");
  for (std::size_t i = 0; i < columns_.size(); ++i)
    for (std::size_t j = i + 1; j < columns_.size(); ++j)
      if (columns_[i].name == columns_[j].name)
        fail("schema: duplicate column name '" + columns_[i].name + "'");
}

std::vector<std::string> FeatureSchema::legitimate_names() const {
  std::vector<std::string> names;
  names.reserve(legitimate_idx_.size());
  for (std::size_t i : legitimate_idx_) names.push_back(columns_[i].name);
  return names;
}

std::size_t FeatureSchema::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw std::invalid_argument("schema: unknown column '" + name + "'");
}

Dataset::Dataset(FeatureSchema schema, std::vector<Vector> rows,
                 double favorable_label_raw, const std::string& sensitive_column)
    : schema_(std::move(schema)), rows_(std::move(rows)), favorable_raw_(favorable_label_raw) {
  const Column& label = schema_.label_column();
  if (!label.admits(favorable_raw_))
    fail("dataset: favorable label " + format_double(favorable_raw_) +
         " is not a code of label column '" + label.name + "'");
  unfavorable_raw_ = label.categories[0] == favorable_raw_ ? label.categories[1]
                                                           : label.categories[0];
  sensitive_name_ = sensitive_column.empty()
                        ? schema_.columns()[schema_.sensitive_indices().front()].name
                        : sensitive_column;
  sensitive_idx_ = schema_.column_index(sensitive_name_);
  if (schema_.columns()[sensitive_idx_].role != ColumnRole::sensitive)
    fail("dataset: column '" + sensitive_name_ + "' does not have the sensitive role");
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (rows_[i].size() != schema_.column_count())
      fail("dataset: row " + std::to_string(i) + " has " + std::to_string(rows_[i].size()) +
           " values, schema has " + std::to_string(schema_.column_count()) + " columns");
}

Dataset Dataset::with_sensitive(const std::string& name) const {
  return Dataset(schema_, rows_, favorable_raw_, name);
}

DataPoint Dataset::point(std::size_t i) const {
  const Vector& row = rows_.at(i);
  DataPoint p;
  p.x.reserve(schema_.legitimate_count());
  for (std::size_t c : schema_.legitimate_indices()) p.x.push_back(row[c]);
  p.s = static_cast<int>(std::llround(row[sensitive_idx_]));
  p.y = label_from_raw(row[schema_.label_index()]);
  return p;
}

std::vector<DataPoint> Dataset::points() const {
  std::vector<DataPoint> out;
  out.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) out.push_back(point(i));
  return out;
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 double favorable_label_raw) {
  std::ifstream in(path);
  if (!in) fail("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) fail("load_csv: '" + path + "' is empty, header row required");
  const std::vector<std::string> header = split_fields(line, ',');
  if (header.size() != schema.column_count())
    fail("load_csv: '" + path + "' header has " + std::to_string(header.size()) +
         " columns, schema has " + std::to_string(schema.column_count()));
  for (std::size_t c = 0; c < header.size(); ++c)
    if (trim(header[c]) != schema.columns()[c].name)
      fail("load_csv: '" + path + "' header column " + std::to_string(c + 1) + " is '" +
           trim(header[c]) + "', schema expects '" + schema.columns()[c].name + "'");

  std::vector<Vector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;  // trailing newline
    const std::vector<std::string> cells = split_fields(line, ',');
    if (cells.size() != schema.column_count())
      fail("load_csv: " + path + ":" + std::to_string(line_no) + ": expected " +
           std::to_string(schema.column_count()) + " cells, found " + std::to_string(cells.size()));
    Vector row(schema.column_count());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c]))
        fail("load_csv: " + path + ":" + std::to_string(line_no) + ": column '" +
             schema.columns()[c].name + "': value '" + trim(cells[c]) + "' is not numeric");
    }
    rows.push_back(std::move(row));
  }
  return Dataset(schema, std::move(rows), favorable_label_raw);
}

CleanResult clean(const Dataset& dataset) {
  const FeatureSchema& schema = dataset.schema();
  std::vector<Vector> kept;
  kept.reserve(dataset.size());
  for (const Vector& row : dataset.rows()) {
    bool ok = true;
    for (std::size_t c = 0; c < schema.column_count() && ok; ++c)
      ok = schema.columns()[c].admits(row[c]);
    if (ok) kept.push_back(row);
  }
  const std::size_t removed = dataset.size() - kept.size();
  return CleanResult{Dataset(schema, std::move(kept), dataset.favorable_label_raw(),
                             dataset.sensitive_column()),
                     removed};
}

Dataset sample(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  if (n > dataset.size())
    fail("sample: requested " + std::to_string(n) + " rows from a dataset of " +
         std::to_string(dataset.size()));
  // Partial Fisher-Yates over the index vector; the first n entries are the
  // sample, in sampled order.
  std::vector<std::size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  std::vector<Vector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[j]);
    rows.push_back(dataset.rows()[idx[i]]);
  }
  return Dataset(dataset.schema(), std::move(rows), dataset.favorable_label_raw(),
                 dataset.sensitive_column());
}

SplitResult split(const Dataset& dataset) {
  SplitResult out;
  out.features.reserve(dataset.size());
  out.sensitive.reserve(dataset.size());
  out.labels.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    DataPoint p = dataset.point(i);
    out.features.push_back(std::move(p.x));
    out.sensitive.push_back(p.s);
    out.labels.push_back(p.y);
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("write_csv: cannot open '" + path + "' for writing");
  const auto& columns = dataset.schema().columns();
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c].name;
  out << '\n';
  for (const Vector& row : dataset.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  if (!out) fail("write_csv: write to '" + path + "' failed");
}

namespace {

ColumnRole parse_role(const std::string& word, const std::string& where) {
  if (word == "legitimate") return ColumnRole::legitimate;
  if (word == "sensitive") return ColumnRole::sensitive;
  if (word == "label") return ColumnRole::label;
  fail(where + ": unknown role '" + word + "'");
}

}  // namespace

SchemaFile load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("load_schema: cannot open '" + path + "'");

  std::vector<Column> columns;
  double favorable = 0.0;
  bool favorable_seen = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    std::string text = trim(line);
    if (auto hash = text.find('#'); hash != std::string::npos) text = trim(text.substr(0, hash));
    if (text.empty()) continue;

    std::istringstream words(text);
    std::string directive;
    words >> directive;
    if (directive == "column") {
      Column col;
      std::string kind, role;
      words >> col.name >> kind >> role;
      if (col.name.empty() || kind.empty() || role.empty())
        fail(where + ": expected 'column <name> <kind> <role>'");
      if (kind == "continuous") {
        col.kind = ColumnKind::continuous;
      } else if (kind.rfind("categorical(", 0) == 0 && kind.back() == ')') {
        col.kind = ColumnKind::categorical;
        const std::string inner = kind.substr(12, kind.size() - 13);
        for (const std::string& item : split_fields(inner, ',')) {
          double code = 0.0;
          if (!parse_double(item, code))
            fail(where + ": categorical code '" + item + "' is not numeric");
          if (code != std::floor(code))
            fail(where + ": categorical code '" + item + "' must be an integer");
          col.categories.push_back(code);
        }
      } else {
        fail(where + ": unknown kind '" + kind + "' (continuous or categorical(...))");
      }
      col.role = parse_role(role, where);
      columns.push_back(std::move(col));
    } else if (directive == "favorable_label") {
      std::string value;
      words >> value;
      if (!parse_double(value, favorable)) fail(where + ": favorable_label value is not numeric");
      favorable_seen = true;
    } else {
      fail(where + ": unknown directive '" + directive + "'");
    }
  }
  if (!favorable_seen) fail("load_schema: '" + path + "' is missing a favorable_label line");
  return SchemaFile{FeatureSchema(std::move(columns)), favorable};
}

void save_schema(const SchemaFile& schema_file, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("save_schema: cannot open '" + path + "' for writing");
  for (const Column& col : schema_file.schema.columns()) {
    out << "column " << col.name << ' ';
    if (col.kind == ColumnKind::continuous) {
      out << "continuous";
    } else {
      out << "categorical(";
      for (std::size_t i = 0; i < col.categories.size(); ++i)
        out << (i ? "," : "") << format_double(col.categories[i]);
      out << ')';
    }
    switch (col.role) {
      case ColumnRole::legitimate: out << " legitimate\n"; break;
      case ColumnRole::sensitive: out << " sensitive\n"; break;
      case ColumnRole::label: out << " label\n"; break;
    }
  }
  out << "favorable_label " << format_double(schema_file.favorable_label_raw) << '\n';
  if (!out) fail("save_schema: write to '" + path + "' failed");
}

}  // namespace cfaudit
