#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbf/error.hpp"
#include "pbf/green_ansatz.hpp"
#include "pbf/model.hpp"

namespace pbf::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Flat key=value run configuration. Blank lines and '#' comments are ignored;
// unknown or repeated keys are errors.
struct RunConfig {
  int p = 2;
  int M = 6;
  std::optional<int> M_keep;  // defaults to M - 1
  double rank_tol = kDefaultRankTol;
  double relation_tol = 1e-10;
  std::size_t max_ambient = kDefaultMaxAmbient;

  Variant variant = Variant::Eq1;
  double omega_b = 1.0;
  double omega_f = 1.0;
  double lambda = 1.0;
  Complex lambda1{}, lambda2{};
  std::optional<Complex> lambda3, lambda4;
  bool hermitize = false;
  std::map<Grade, std::pair<double, double>> grade_omega;

  std::vector<std::pair<Label, Complex>> initial{{Label{1, 0, 0}, Complex{1.0, 0.0}}};
  double t_max = 10.0;
  int steps = 200;

  std::optional<std::filesystem::path> rep;  // defaults to <out>/rep.pbf
  std::filesystem::path out = ".";

  std::optional<int> debug_klein_fault;

  int m_keep() const { return M_keep.value_or(M - 1); }
  std::filesystem::path rep_path() const { return rep.value_or(out / "rep.pbf"); }
  ModelParams model_params() const;
  BuildOptions build_options() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Range checks shared by every command.
void validate(const RunConfig& config);

Complex parse_complex(std::string_view text);
std::vector<std::pair<Label, Complex>> parse_initial_state(std::string_view text);

}  // namespace pbf::cli
