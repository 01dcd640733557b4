#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "xiga/solution.hpp"
#include "xiga/system.hpp"
#include "xiga/verification.hpp"

namespace xiga::studies {

/// One benchmark solve. Fields that do not apply to a study stay NaN.
struct RunRecord {
  std::string study;
  int p = 1;
  double h = 0.0;
  double h_int = std::numeric_limits<double>::quiet_NaN();
  double gamma_N = 0.0;
  double gamma_G = 0.0;
  std::vector<std::pair<std::string, std::string>> params;  // study-specific columns
  int dofs = 0;
  double l2 = std::numeric_limits<double>::quiet_NaN();
  double h1 = std::numeric_limits<double>::quiet_NaN();
  double e_geo = std::numeric_limits<double>::quiet_NaN();
  double cond = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
};

/// CSV with columns (study,p,h,h_int,gamma_N,gamma_G,params...,dofs,L2,H1,
/// e_geo,cond); the params columns are taken from the first row.
std::string csv_table(const std::vector<RunRecord>& rows);
void write_csv(const std::string& path, const std::vector<RunRecord>& rows);

/// Fitted L2/H1 slopes against h, one line per (p, params) group with at
/// least two mesh sizes.
std::string rates_summary(const std::vector<RunRecord>& rows);

/// A solved problem whose discretization outlives its samplers.
struct Solved {
  std::shared_ptr<system::Discretization> disc;
  Eigen::VectorXd u;
  double residual = 0.0;
  solution::FieldSampler sampler() const { return {*disc, u}; }
};

Solved solve_problem(const problem::Problem& prob);

/// Optional overrides for the parameter grids; empty lists keep the study
/// defaults. `cache_dir` holds serialized reference fields.
struct StudyOptions {
  std::vector<int> ps;
  std::vector<double> hs;
  std::vector<double> gamma_gs;
  std::string cache_dir = ".";
};

std::vector<std::string> study_ids();
std::vector<RunRecord> run_study(const std::string& id, const StudyOptions& opt = {});

// --- sliver bar: 4x1 grid on [0,4]x[0,1], plane cut at x = 3 + delta ----
problem::Problem sliver_problem(verification::BarLoad load, double delta, int p, double gamma_G);
verification::ExactField sliver_exact(verification::BarLoad load, double delta);
RunRecord sliver_case(verification::BarLoad load, double delta, int p, double gamma_G,
                      bool with_cond);

// --- rotated bar: 1 x 0.5 bar at an angle inside [0,2]^2, quartic field --
problem::Problem rotated_bar_problem(double angle_deg, double h, int p, double gamma_G);
verification::ExactField rotated_bar_exact(double angle_deg);
RunRecord rotated_bar_case(double angle_deg, double h, int p, double gamma_G);

// --- junction: axis-aligned bar split into 1..4 same-material phases ----
// config 0: no split, 1: vertical split, 2: T junction, 3: cross,
// 4: cross rotated by 45 degrees. All bar phases carry the same material.
problem::Problem junction_problem(int config, double h, int p);
RunRecord junction_case(int config, double h, int p);

// --- circular inclusion: radius 0.5 in [-1,1]^2, closed-form field ------
problem::Problem inclusion_problem(double h, double h_int, int p);
RunRecord inclusion_case(double h, double h_int, int p);

// --- multi-material square inclusion in a quartered matrix --------------
// presets: "single", "five", "thirteen"
problem::Problem multimaterial_problem(const std::string& preset, double h, int p);
/// Reference solve on h = 0.015625, serialized to cache_dir and reused.
Solved multimaterial_reference(const std::string& preset, int p, const std::string& cache_dir);
RunRecord multimaterial_case(const std::string& preset, double h, int p, const Solved& ref);

}  // namespace xiga::studies
