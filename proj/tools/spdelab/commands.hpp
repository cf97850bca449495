#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spdelab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 2,
  kBlowUpQuota = 3,
  kQuadratureFailure = 4,
};

/// Flags shared by every subcommand. Unset optionals fall back to the
/// config file, then to built-in defaults.
struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::filesystem::path out;
  std::optional<double> tol;
  bool dry_run = false;
};

struct LambdaOptions {
  CommonOptions common;
  std::optional<double> nu;
  bool closed_form = false;
};

struct ConvergeOptions {
  CommonOptions common;
  std::vector<double> eps;
  std::optional<int> replicates;
  std::optional<int> refine;
};

struct ChaosOptions {
  CommonOptions common;
  std::vector<double> eps;
  int samples = 200;
  std::optional<double> nu;
  double gamma = 1.0 / 3.0;
  double chi = 1.5;
  double alpha = 0.75;
};

struct QvOptions {
  CommonOptions common;
  double nu = 1.0;
  int max_mode = 512;
  int grid_size = 2048;
  int samples = 200;
};

// Each command writes its JSON report to `out` and returns an exit code.
// Library errors propagate as exceptions; run_guarded maps them to codes.
int cmd_lambda(const LambdaOptions& opt, std::ostream& out);
int cmd_converge(const ConvergeOptions& opt, std::ostream& out);
int cmd_chaos(const ChaosOptions& opt, std::ostream& out);
int cmd_qv(const QvOptions& opt, std::ostream& out);

/// Runs `fn`, mapping ValidationError/ResolutionError -> 2, BlowUpError -> 3,
/// ConvergenceError -> 4; the message goes to `err`.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace spdelab::cli
