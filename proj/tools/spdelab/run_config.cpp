#include "run_config.hpp"

#include "spdelab/errors.hpp"
#include "spdelab/keyvalue.hpp"

namespace spdelab::cli {
namespace {

double real_or(const KeyValueDocument& doc, const std::string& section, const std::string& key,
               double fallback) {
  return doc.has(section, key) ? parse_real(doc.get(section, key)) : fallback;
}

long long integer_or(const KeyValueDocument& doc, const std::string& section,
                     const std::string& key, long long fallback) {
  return doc.has(section, key) ? parse_integer(doc.get(section, key)) : fallback;
}

// `F1` (or `F` when n = 1), defaulting to the zero polynomial.
PolynomialMap polynomial_map(const KeyValueDocument& doc, const std::string& name, int n) {
  std::vector<Polynomial> components;
  for (int i = 1; i <= n; ++i) {
    const std::string key = name + std::to_string(i);
    std::string text = "0";
    if (doc.has("model", key)) {
      text = doc.get("model", key);
    } else if (n == 1 && doc.has("model", name)) {
      text = doc.get("model", name);
    }
    components.push_back(Polynomial::parse(text, n));
  }
  return PolynomialMap(std::move(components));
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  const KeyValueDocument doc = parse_key_value(text);
  RunConfig rc;
  rc.text = text;
  SimConfig& s = rc.sim;
  s.scheme = parse_scheme(text, base_dir);

  s.nu = real_or(doc, "model", "nu", s.nu);
  s.components = static_cast<int>(integer_or(doc, "model", "components", s.components));
  s.max_mode = static_cast<int>(integer_or(doc, "model", "K", s.max_mode));
  s.pad = real_or(doc, "model", "pad", s.pad);
  s.F = polynomial_map(doc, "F", s.components);
  s.G = polynomial_map(doc, "G", s.components);
  s.lambda_tol = real_or(doc, "model", "lambda_tol", s.lambda_tol);
  rc.lambda_spec = doc.get_or("model", "lambda", "quadrature");
  if (rc.lambda_spec == "quadrature") {
    s.lambda_mode = LambdaMode::quadrature;
  } else if (rc.lambda_spec == "closed_form") {
    s.lambda_mode = LambdaMode::closed_form;
  } else if (rc.lambda_spec == "zero") {
    s.lambda_mode = LambdaMode::zero;
  } else {
    s.lambda_mode = LambdaMode::explicit_value;
    s.lambda_value = parse_real(rc.lambda_spec);
  }
  s.v0 = {};
  for (int c = 0; c < s.components; ++c) {
    const std::string key = "v0_" + std::to_string(c + 1);
    std::string spec;
    if (doc.has("model", key)) {
      spec = doc.get("model", key);
    } else if (s.components == 1) {
      spec = doc.get_or("model", "v0", "0");
    }
    const InitialSpec part = InitialSpec::parse(spec, c);
    s.v0.terms.insert(s.v0.terms.end(), part.terms.begin(), part.terms.end());
  }

  s.dt = real_or(doc, "time", "dt", s.dt);
  s.horizon = real_or(doc, "time", "T", s.horizon);
  s.refine_level = static_cast<int>(integer_or(doc, "time", "refine", s.refine_level));
  s.sample_interval = real_or(doc, "time", "sample_interval", s.sample_interval);

  s.alpha = real_or(doc, "output", "alpha", s.alpha);

  if (doc.has("ensemble", "eps")) rc.ensemble.eps = parse_real_list(doc.get("ensemble", "eps"));
  rc.ensemble.replicates =
      static_cast<int>(integer_or(doc, "ensemble", "replicates", rc.ensemble.replicates));
  rc.ensemble.seed = static_cast<std::uint64_t>(integer_or(doc, "ensemble", "seed", 0));
  s.seed = rc.ensemble.seed;
  if (!rc.ensemble.eps.empty()) s.eps = rc.ensemble.eps.front();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path.string()), path.parent_path());
}

}  // namespace spdelab::cli
