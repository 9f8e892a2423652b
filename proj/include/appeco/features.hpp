#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

inline constexpr const char* kFeatureSchemaVersion = "appeco-features-1";

// Stable, versioned feature name registry. Categorical features are
// truncated to the top 10 population-level categories plus an "other"
// bucket, so the schema is identical for every app of a run.
struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<std::string> groups;  // temporal|demographic|retention|social|sirs

  static FeatureSchema build(const AttributeTable& attributes, bool include_sirs);
  std::size_t size() const { return names.size(); }
  std::vector<std::size_t> group_columns(const std::string& group) const;
};

struct FeatureOptions {
  bool include_sirs = false;
  int sirs_budget = 4000;
  int sirs_predict_horizon = 360;  // weekly subsample becomes the pred features
  std::uint64_t seed = 0;
  int retention_max_offset = 30;
};

struct FeatureVector {
  std::vector<double> values;  // NaN marks missing, never silent zeros
  bool has_temporal = false;
  bool has_demographic = false;
  bool has_retention_fit = false;
  bool has_social = false;
  bool has_sirs = false;
};

// The 12-month observation window is `window` (length 12 x 30 days). App
// users for the demographic/social groups are ever-adopters as of the window
// end; the retention cohort is users whose first event falls inside the
// window, censored at the window end.
FeatureVector extract_features(const FeatureSchema& schema, const ActivityLog& log,
                               const SocialGraph& graph, const AttributeTable& attributes,
                               AppId app, DayRange window, const FeatureOptions& options);

struct FeatureMatrix {
  FeatureSchema schema;
  std::vector<AppId> apps;
  std::vector<std::vector<double>> rows;  // raw values, NaN = missing
};

FeatureMatrix feature_matrix(const ActivityLog& log, const SocialGraph& graph,
                             const AttributeTable& attributes, std::span<const AppId> apps,
                             DayRange window, const FeatureOptions& options,
                             unsigned threads = 0);

// Missing entries replaced by the per-feature median over the training rows
// (0 when a feature is missing on every training row), with a companion
// `miss_<name>` indicator column appended for every feature that is missing
// anywhere in the matrix.
struct ImputedMatrix {
  std::vector<std::string> names;
  std::vector<std::string> groups;
  std::vector<std::vector<double>> rows;
};

ImputedMatrix impute_matrix(const FeatureMatrix& matrix,
                            std::span<const std::uint32_t> train_rows);

void save_feature_matrix_csv(const std::string& path, const FeatureMatrix& matrix);

}  // namespace appeco
