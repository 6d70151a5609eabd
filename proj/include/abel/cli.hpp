#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "abel/criteria.hpp"
#include "abel/trig.hpp"

namespace abel::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Family as written in the config. QuadPoly parameters stay exact.
struct FamilySpec {
  FamilyKind kind = FamilyKind::QuadPoly;
  Rational t_A, t_B;
  double a0 = 0.0, b0 = 0.0, b1 = 0.0, b2 = 1.0;
  /// Set when the config gave a general trigonometric pair that was normalized.
  std::optional<GeneralTrig> general;

  /// Throws PreconditionError when the parameters violate the family's requirements.
  CoefficientFamily build() const;
  json to_json() const;
};

enum class SweepParameter { TA, TB, A0, B0 };

struct SweepRange {
  SweepParameter parameter = SweepParameter::TA;
  /// Exact endpoints; for QuadPoly parameters every grid point is exact as well.
  Rational lo, hi;
  int steps = 1;

  Rational exact_value(int i) const;
  double value(int i) const { return to_double(exact_value(i)); }
  MonotoneParameter monotone() const;
  /// lambda = -t_A, -t_B, a0 or b0 at the parameter value v.
  double lambda_of(double v) const;
};

struct CurveOptions {
  int samples = 2001;
  double x_lo = 0.05;
  double x_hi = 10.0;
  int x_count = 60;
  /// Interval in x in which the fold of the Lambda curve is sought for the alpha/beta export.
  std::optional<std::pair<double, double>> fold_x;
};

struct ScanOptions {
  double b0_lo = -0.5, b0_hi = 0.5;
  int steps = 20;
};

/// Thresholds behind the hopf_origin / hopf_infinity flags of an atlas row.
struct FlagOptions {
  /// Both c2 and c3 below this magnitude: the origin is degenerate beyond first order.
  double hopf_tol = 1e-3;
  /// A cycle below origin_ratio * x_max sits close to the origin.
  double origin_ratio = 0.02;
  /// A cycle above infinity_ratio * x_max sits close to the top of the search range.
  double infinity_ratio = 0.75;
};

struct OutputPaths {
  std::string report = "report.json";
  std::string atlas_csv = "atlas.csv";
  std::string atlas_json = "atlas.json";
  std::string infinity = "infinity.json";
  std::string manifolds = "manifolds.csv";
};

struct AnalysisConfig {
  FamilySpec family;
  IntegratorOptions integrator{};
  CycleSearchOptions cycles{};
  std::optional<SweepRange> sweep;
  CurveOptions curves{};
  InfinityOptions infinity{};
  std::optional<ScanOptions> connection_scan;
  FlagOptions flags{};
  OutputPaths outputs{};

  /// Fills every absent field with its default. Throws ConfigError on malformed input.
  static AnalysisConfig from_json(const json& doc);
  static AnalysisConfig from_file(const std::filesystem::path& path);
  /// The effective configuration, defaults included.
  json to_json() const;
  void validate() const;
};

/// One grid point of a parameter sweep.
struct AtlasRow {
  int index = 0;
  double value = 0.0;  ///< swept parameter value; 0 for a single analysis
  FamilySpec family;
  std::string status = "ok";
  std::vector<CycleRecord> cycles;
  double x_max = 0.0;
  std::string c1 = "false";
  std::string c2 = "unknown";
  std::string c3 = "unknown";
  std::string uniqueness = "inconclusive";
  std::optional<HopfCoefficients> hopf;
  bool hopf_origin = false;
  bool hopf_infinity = false;
  /// More than two cycles for a QuadPoly family.
  bool bound_violation = false;

  int N() const { return static_cast<int>(cycles.size()); }
  json to_json() const;
};

AtlasRow evaluate_row(const AnalysisConfig& cfg, const FamilySpec& family, int index = 0, double value = 0.0);

/// Single-family report. Throws PreconditionError when the family cannot be built.
json run_analyze(const AnalysisConfig& cfg);

struct SweepSummary {
  std::vector<AtlasRow> rows;
  int max_N = 0;
  std::vector<int> violations;  ///< indices of rows with bound_violation
};

/// Rows in grid order. When csv is given, the version header and each row are written and flushed
/// as soon as every earlier row is done.
SweepSummary run_sweep(const AnalysisConfig& cfg, int jobs, std::ostream* csv = nullptr);

std::string atlas_csv_header();
std::string atlas_csv_line(const AtlasRow& row);
json atlas_json(const AnalysisConfig& cfg, const SweepSummary& s);

/// Writes the requested curve files into out_dir and returns their names.
std::vector<std::string> run_curves(const AnalysisConfig& cfg, const std::filesystem::path& out_dir);

/// Requires a trigonometric family. Manifold samples go to the optional CSV stream.
json run_trig_infinity(const AnalysisConfig& cfg, std::ostream* manifolds = nullptr);
void write_manifold_csv(const InfinityReport& r, std::ostream& os);

json to_json(const CycleRecord& c);
json to_json(const ZeroStructure& z);
json to_json(const UniquenessPrecheck& u);
json to_json(const CriteriaReport& r);
json to_json(const SemistabilityVerdict& v);
json to_json(const InfinityReport& r);
json to_json(const HopfCoefficients& h);

/// Runs one command ("analyze", "sweep", "curves" or "trig-infinity") and returns the exit code:
/// 0 on success, 1 for a malformed config, 2 when the family violates a precondition.
int dispatch(const std::string& command, const std::filesystem::path& config_path,
             const std::filesystem::path& out_dir, int jobs, std::ostream& log);

}  // namespace abel::cli
