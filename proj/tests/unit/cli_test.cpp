#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "digest.hpp"
#include "run_config.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/keyvalue.hpp"

namespace spdelab::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const fs::path kConfigs = SPDELAB_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spdelab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Small Burgers run: seconds, not minutes.
const char* kTinyRun = R"(
[scheme]
f = finite_difference
h = indicator_pi
mu = (1,1);(0,-1)
[model]
nu = 1
K = 24
G = 0.5*u1^2
lambda = closed_form
v0 = cos 1 0.3
[time]
dt = 1e-3
T = 0.02
sample_interval = 0.01
[ensemble]
eps = 1/4, 1/8, 1/16
replicates = 3
seed = 11
)";

TEST(KeyValueTest, SectionsCommentsAndNumbers) {
  const auto doc = parse_key_value("a = 1 # note\n[s]\nb = x y\n");
  EXPECT_EQ(doc.get("", "a"), "1");
  EXPECT_EQ(doc.get("s", "b"), "x y");
  EXPECT_EQ(doc.get_or("s", "c", "z"), "z");
  EXPECT_THROW(doc.get("s", "c"), ValidationError);
  EXPECT_DOUBLE_EQ(parse_real("1/8"), 0.125);
  EXPECT_TRUE(std::isinf(parse_real("inf")));
  EXPECT_THROW(parse_real("abc"), ValidationError);
  EXPECT_EQ(parse_real_list("1, 1/2 ,0.25"), (std::vector<double>{1.0, 0.5, 0.25}));
  EXPECT_EQ(parse_integer("42"), 42);
}

TEST(DigestTest, MatchesGitBlobIds) {
  // `git hash-object` of an empty file and of "hello\n".
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(RunConfigTest, BundledBurgersConfig) {
  const auto rc = load_run_config(kConfigs / "burgers_forward.cfg");
  EXPECT_EQ(rc.sim.max_mode, 128);
  EXPECT_DOUBLE_EQ(rc.sim.dt, 2.5e-4);
  EXPECT_DOUBLE_EQ(rc.sim.horizon, 0.5);
  EXPECT_EQ(rc.ensemble.replicates, 32);
  EXPECT_EQ(rc.ensemble.eps, (std::vector<double>{0.125, 0.0625, 0.03125, 0.015625}));
  EXPECT_EQ(rc.sim.lambda_mode, LambdaMode::closed_form);
  EXPECT_DOUBLE_EQ(resolve_lambda(rc.sim).value, 0.25);
  EXPECT_EQ(rc.sim.G[0], Polynomial::parse("0.5*u1^2", 1));
  EXPECT_NO_THROW(rc.sim.validate());
}

TEST(RunConfigTest, MultiComponentAndExplicitLambda) {
  const auto rc = parse_run_config(
      "[scheme]\nf = identity\nh = one\nmu = (1,1);(0,-1)\n"
      "[model]\ncomponents = 2\nF1 = -u1\nG2 = u1*u2\nlambda = 0.3\nv0_2 = sin 2 0.1\n");
  EXPECT_EQ(rc.sim.components, 2);
  EXPECT_TRUE(rc.sim.F[1].is_zero());
  EXPECT_EQ(rc.sim.G[1], Polynomial::parse("u1*u2", 2));
  EXPECT_EQ(rc.sim.lambda_mode, LambdaMode::explicit_value);
  EXPECT_DOUBLE_EQ(rc.sim.lambda_value, 0.3);
  ASSERT_EQ(rc.sim.v0.terms.size(), 1u);
  EXPECT_EQ(rc.sim.v0.terms[0].component, 1);
}

TEST(RunConfigTest, Errors) {
  EXPECT_THROW(parse_run_config("[model]\nnu = 1\n"), ValidationError);
  EXPECT_THROW(parse_run_config("[scheme]\nf = identity\nh = one\nmu = (1,1);(0,-1)\n[model]\nG = u2\n"),
               ValidationError);
}

TEST(LambdaCommandTest, IdentityIsOneQuarter) {
  LambdaOptions opt;
  opt.common.config = kConfigs / "identity_a1_b0.txt";
  std::ostringstream out;
  EXPECT_EQ(cmd_lambda(opt, out), kOk);
  EXPECT_NEAR(json::parse(out.str())["value"].get<double>(), 0.25, 1e-10);
}

TEST(LambdaCommandTest, GalerkinClosedFormAgrees) {
  LambdaOptions opt;
  opt.common.config = kConfigs / "galerkin_a1_b0.txt";
  opt.closed_form = true;
  std::ostringstream out;
  ASSERT_EQ(cmd_lambda(opt, out), kOk);
  const auto j = json::parse(out.str());
  EXPECT_LT(std::abs(j["difference"].get<double>()), 1e-6);
  EXPECT_EQ(j["closed_form"]["method"], "closed_form");
}

TEST(LambdaCommandTest, SymmetricSchemeIsZero) {
  const auto dir = scratch("sym");
  LambdaOptions opt;
  opt.common.config = write_file(dir, "s.txt", "f = identity\nh = one\nmu = (1,0.5);(-1,-0.5)\n");
  opt.common.out = dir / "out";
  std::ostringstream out;
  ASSERT_EQ(cmd_lambda(opt, out), kOk);
  EXPECT_NEAR(json::parse(out.str())["value"].get<double>(), 0.0, 1e-10);
  EXPECT_TRUE(fs::exists(dir / "out" / "lambda.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(LambdaCommandTest, InvalidSchemeExitsWithValidationCode) {
  const auto dir = scratch("bad");
  LambdaOptions opt;
  opt.common.config = write_file(dir, "s.txt", "f = identity\nh = one\nmu = (1,2);(0,-1)\n");
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_lambda(opt, out); }, err), kValidationFailure);
  EXPECT_NE(err.str().find("mu_zero_mass"), std::string::npos);
}

TEST(RunGuardedTest, ExceptionMapping) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([]() -> int { throw BlowUpError("x", 0.1); }, err), kBlowUpQuota);
  EXPECT_EQ(run_guarded([]() -> int { throw ConvergenceError("x", 1, 1); }, err), kQuadratureFailure);
  EXPECT_EQ(run_guarded([]() -> int { throw ResolutionError("x"); }, err), kValidationFailure);
  EXPECT_EQ(run_guarded([] { return 0; }, err), kOk);
}

TEST(ConvergeCommandTest, WritesTablesAndManifest) {
  const auto dir = scratch("converge");
  ConvergeOptions opt;
  opt.common.config = write_file(dir, "run.cfg", kTinyRun);
  opt.common.out = dir / "out";
  std::ostringstream out;
  ASSERT_EQ(cmd_converge(opt, out), kOk);
  const auto summary = json::parse(out.str());
  EXPECT_DOUBLE_EQ(summary["lambda"]["value"].get<double>(), 0.25);

  const std::string traj = slurp(dir / "out" / "trajectory_eps_0.0625.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')),
            "t,sup_err_corrected,sup_err_uncorrected,halpha_err_corrected,halpha_err_uncorrected");
  EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 4);  // header + t = 0, 0.01, 0.02
  const std::string fin = slurp(dir / "out" / "sup_err_corrected_final.csv");
  EXPECT_EQ(fin.substr(0, fin.find('\n')), "eps,mean,stderr,n_samples");

  const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
  ASSERT_TRUE(manifest["outputs"].contains("psi_scaling.csv"));
  for (const auto& [name, digest] : manifest["outputs"].items()) {
    EXPECT_EQ(git_blob_sha1(slurp(dir / "out" / name)), digest.get<std::string>()) << name;
  }
  EXPECT_EQ(manifest["config_digest"], git_blob_sha1(kTinyRun));
}

TEST(ConvergeCommandTest, ZeroLambdaGivesIdenticalColumns) {
  const auto dir = scratch("zero");
  std::string text = kTinyRun;
  text.replace(text.find("closed_form"), 11, "zero");
  ConvergeOptions opt;
  opt.common.config = write_file(dir, "run.cfg", text);
  opt.common.out = dir / "out";
  std::ostringstream out;
  ASSERT_EQ(cmd_converge(opt, out), kOk);
  std::istringstream csv(slurp(dir / "out" / "trajectory_eps_0.125.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_EQ(f[1], f[2]);
    EXPECT_EQ(f[3], f[4]);
  }
}

TEST(ConvergeCommandTest, WorkerCountDoesNotChangeBytes) {
  const auto dir = scratch("workers");
  ConvergeOptions opt;
  opt.common.config = write_file(dir, "run.cfg", kTinyRun);
  std::ostringstream out;
  opt.common.out = dir / "w1";
  opt.common.workers = 1;
  ASSERT_EQ(cmd_converge(opt, out), kOk);
  opt.common.out = dir / "w8";
  opt.common.workers = 8;
  ASSERT_EQ(cmd_converge(opt, out), kOk);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "w1")) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;  // carries wall-clock times
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "w8" / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 10);
}

TEST(ConvergeCommandTest, DryRunWritesNothing) {
  const auto dir = scratch("dry");
  ConvergeOptions opt;
  opt.common.config = write_file(dir, "run.cfg", kTinyRun);
  opt.common.out = dir / "out";
  opt.common.dry_run = true;
  std::ostringstream out;
  EXPECT_EQ(cmd_converge(opt, out), kOk);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(json::parse(out.str())["status"], "ok");
}

TEST(ConvergeCommandTest, BlowUpQuotaExitCode) {
  const auto dir = scratch("blowup");
  std::string text = kTinyRun;
  text.replace(text.find("v0 = cos 1 0.3"), 14, "v0 = const 200\nF = u1^2");
  ConvergeOptions opt;
  opt.common.config = write_file(dir, "run.cfg", text);
  opt.common.out = dir / "out";
  std::ostringstream out;
  EXPECT_EQ(cmd_converge(opt, out), kBlowUpQuota);
  const auto summary = json::parse(out.str());
  EXPECT_EQ(summary["blow_ups"][0]["count"], 3);
}

TEST(ChaosCommandTest, WritesCsvAndJson) {
  const auto dir = scratch("chaos");
  ChaosOptions opt;
  opt.common.config = kConfigs / "finite_difference_a1_b0.txt";
  opt.common.out = dir / "out";
  opt.eps = {0.08, 0.04, 0.02};
  opt.samples = 10;
  std::ostringstream out;
  ASSERT_EQ(cmd_chaos(opt, out), kOk);
  const auto j = json::parse(out.str());
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_TRUE(j["distance_slope"].is_number());
  EXPECT_TRUE(fs::exists(dir / "out" / "chaos_distance.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "chaos_xi_atom0.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "chaos_xi_atom1.csv"));
}

TEST(QvCommandTest, ReportsExactAndMonteCarlo) {
  QvOptions opt;
  opt.max_mode = 64;
  opt.grid_size = 257;
  opt.samples = 50;
  std::ostringstream out;
  ASSERT_EQ(cmd_qv(opt, out), kOk);
  const auto j = json::parse(out.str());
  EXPECT_NEAR(j["pi_over_nu"].get<double>(), 3.141592653589793, 1e-15);
  EXPECT_LT(std::abs(j["z_score"].get<double>()), 5.0);
  opt.samples = 1;
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_qv(opt, out); }, err), kValidationFailure);
}

}  // namespace
}  // namespace spdelab::cli
