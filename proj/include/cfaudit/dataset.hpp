#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cfaudit/matrix.hpp"

namespace cfaudit {

enum class ColumnKind { continuous, categorical };
enum class ColumnRole { legitimate, sensitive, label };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  ColumnRole role = ColumnRole::legitimate;
  std::vector<double> categories;  // valid codes; categorical columns only

  /// True when `value` is inside the column's domain. Continuous columns
  /// admit everything; categorical columns admit their listed codes only.
  bool admits(double value) const;
};

/// Ordered column description of a tabular dataset. Validated on
/// construction: exactly one label column, at least one sensitive and one
/// legitimate column, every categorical column has a non-empty code set,
/// and the label column is categorical with exactly two codes.
class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<Column> columns);

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t column_count() const { return columns_.size(); }

  const std::vector<std::size_t>& legitimate_indices() const { return legitimate_idx_; }
  const std::vector<std::size_t>& sensitive_indices() const { return sensitive_idx_; }
  std::size_t label_index() const { return label_idx_; }
  const Column& label_column() const { return columns_[label_idx_]; }

  std::size_t legitimate_count() const { return legitimate_idx_.size(); }
  std::vector<std::string> legitimate_names() const;

  /// Index of a column by name; throws std::invalid_argument if unknown.
  std::size_t column_index(const std::string& name) const;

 private:
  std::vector<Column> columns_;
  std::vector<std::size_t> legitimate_idx_;
  std::vector<std::size_t> sensitive_idx_;
  std::size_t label_idx_ = 0;
};

/// One row seen through the model's eyes: legitimate features, the audited
/// sensitive value, and the label mapped so 1 is the favorable outcome.
struct DataPoint {
  Vector x;
  int s = 0;
  int y = 0;
};

/// Immutable table of raw values plus the schema that interprets them.
/// Rows hold the values exactly as ingested (or generated); label mapping
/// to {0, 1} happens when points are materialized, so writing the dataset
/// back out reproduces the original raw values.
class Dataset {
 public:
  Dataset(FeatureSchema schema, std::vector<Vector> rows,
          double favorable_label_raw, const std::string& sensitive_column = "");

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<Vector>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  double favorable_label_raw() const { return favorable_raw_; }
  double unfavorable_label_raw() const { return unfavorable_raw_; }

  /// Name of the sensitive column used for s in DataPoint and split().
  const std::string& sensitive_column() const { return sensitive_name_; }
  /// Copy of this dataset auditing a different sensitive column.
  Dataset with_sensitive(const std::string& name) const;

  /// favorable raw -> 1, anything else -> 0.
  int label_from_raw(double raw) const { return raw == favorable_raw_ ? 1 : 0; }
  /// Inverse mapping on the two label codes (involution with label_from_raw).
  double raw_from_label(int y) const { return y == 1 ? favorable_raw_ : unfavorable_raw_; }

  DataPoint point(std::size_t i) const;
  std::vector<DataPoint> points() const;

 private:
  FeatureSchema schema_;
  std::vector<Vector> rows_;
  double favorable_raw_ = 0.0;
  double unfavorable_raw_ = 0.0;
  std::string sensitive_name_;
  std::size_t sensitive_idx_ = 0;
};

struct CleanResult {
  Dataset dataset;
  std::size_t removed_rows = 0;
};

struct SplitResult {
  Matrix features;              // legitimate columns only, schema order
  std::vector<int> sensitive;   // audited sensitive column, row-aligned
  std::vector<int> labels;      // mapped labels, row-aligned
};

struct SchemaFile {
  FeatureSchema schema;
  double favorable_label_raw = 0.0;
};

/// Parses a comma-delimited file whose header row must match the schema
/// column names in order. Cells must be numeric; any parse failure aborts
/// with a diagnostic naming the line and column.
Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 double favorable_label_raw);

/// Drops every row holding a categorical value outside its column's code
/// set. Continuous columns never cause removal. Order is preserved.
CleanResult clean(const Dataset& dataset);

/// Uniform sample of exactly n rows without replacement, deterministic for
/// a given seed; the result keeps the sampled order. Throws if n exceeds
/// the dataset size.
Dataset sample(const Dataset& dataset, std::size_t n, std::uint64_t seed);

/// Splits into (legitimate feature matrix, sensitive vector, label vector),
/// row-aligned with the dataset.
SplitResult split(const Dataset& dataset);

/// Writes the raw table back out in the load_csv format.
void write_csv(const Dataset& dataset, const std::string& path);

/// Schema file: one `column <name> <kind> <role>` line per column, where
/// kind is `continuous` or `categorical(c1,c2,...)`, plus one
/// `favorable_label <value>` line. `#` starts a comment.
SchemaFile load_schema(const std::string& path);
void save_schema(const SchemaFile& schema_file, const std::string& path);

/// Round-trip formatting for a double (shortest representation that parses
/// back to the same value).
std::string format_double(double value);

}  // namespace cfaudit
