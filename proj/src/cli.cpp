#include "mixpois/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "mixpois/errors.hpp"
#include "mixpois/family.hpp"
#include "mixpois/numeric.hpp"
#include "mixpois/oracle.hpp"
#include "mixpois/pmf.hpp"
#include "mixpois/validity.hpp"

namespace mixpois::cli {
namespace {

using Json = nlohmann::ordered_json;

// Raised for incomplete or inconsistent flags; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised after output was written for an invalid law; maps to exit code 1.
struct InvalidExit {};

struct FamilyFlags {
  std::string family;
  std::optional<double> a, b, p, lambda1, lambda2, mu, sigma2, alpha, sigma, delta;

  void attach(CLI::App& app) {
    app.add_option("--family", family, "Mixing family")
        ->required()
        ->check(CLI::IsMember({"two-point", "asym-laplace", "gaussian", "extreme-stable"}));
    app.add_option("--a", a, "two-point: magnitude of the negative atom");
    app.add_option("--b", b, "two-point: positive atom");
    app.add_option("--p", p, "two-point/asym-laplace: probability of the negative component");
    app.add_option("--lambda1", lambda1, "asym-laplace: left-tail rate");
    app.add_option("--lambda2", lambda2, "asym-laplace: right-tail rate");
    app.add_option("--mu", mu, "gaussian: mean");
    app.add_option("--sigma2", sigma2, "gaussian: variance");
    app.add_option("--alpha", alpha, "extreme-stable: index in (0, 2]");
    app.add_option("--sigma", sigma, "extreme-stable: scale");
    app.add_option("--delta", delta, "extreme-stable: location");
  }

  FamilySpec build() const {
    auto need = [&](const std::optional<double>& v, const char* flag) {
      if (!v) throw UsageError(std::string("--") + flag + " is required for --family " + family);
      return *v;
    };
    auto forbid = [&](std::initializer_list<std::pair<const std::optional<double>*, const char*>> flags) {
      for (const auto& [v, name] : flags) {
        if (v->has_value()) throw UsageError(std::string("--") + name + " does not apply to --family " + family);
      }
    };
    try {
      if (family == "two-point") {
        forbid({{&lambda1, "lambda1"}, {&lambda2, "lambda2"}, {&mu, "mu"}, {&sigma2, "sigma2"},
                {&alpha, "alpha"}, {&sigma, "sigma"}, {&delta, "delta"}});
        return FamilySpec::two_point(need(a, "a"), need(b, "b"), need(p, "p"));
      }
      if (family == "asym-laplace") {
        forbid({{&a, "a"}, {&b, "b"}, {&mu, "mu"}, {&sigma2, "sigma2"},
                {&alpha, "alpha"}, {&sigma, "sigma"}, {&delta, "delta"}});
        return FamilySpec::asym_laplace(need(lambda1, "lambda1"), need(lambda2, "lambda2"), need(p, "p"));
      }
      if (family == "gaussian") {
        forbid({{&a, "a"}, {&b, "b"}, {&p, "p"}, {&lambda1, "lambda1"}, {&lambda2, "lambda2"},
                {&alpha, "alpha"}, {&sigma, "sigma"}, {&delta, "delta"}});
        return FamilySpec::gaussian(need(mu, "mu"), need(sigma2, "sigma2"));
      }
      forbid({{&a, "a"}, {&b, "b"}, {&p, "p"}, {&lambda1, "lambda1"}, {&lambda2, "lambda2"},
              {&mu, "mu"}, {&sigma2, "sigma2"}});
      return FamilySpec::extreme_stable(need(alpha, "alpha"), need(sigma, "sigma"), need(delta, "delta"));
    } catch (const InvalidParameter& e) {
      throw UsageError(e.what());
    }
  }
};

Json params_json(const FamilySpec& spec) {
  Json j;
  if (const auto* s = spec.get_if<TwoPoint>()) {
    j = {{"a", s->a}, {"b", s->b}, {"p", s->p}};
  } else if (const auto* s = spec.get_if<AsymLaplace>()) {
    j = {{"lambda1", s->lambda1}, {"lambda2", s->lambda2}, {"p", s->p}};
  } else if (const auto* s = spec.get_if<GaussianMix>()) {
    j = {{"mu", s->mu}, {"sigma2", s->sigma2}};
  } else if (const auto* s = spec.get_if<ExtremeStable>()) {
    j = {{"alpha", s->alpha}, {"sigma", s->sigma}, {"delta", s->delta}, {"beta", 1}};
  }
  return j;
}

Json header_json(const FamilySpec& spec) { return Json{{"family", spec.name()}, {"params", params_json(spec)}}; }

Json report_json(const ValidityReport& r) {
  Json j;
  j["verdict"] = std::string(to_string(r.verdict));
  if (r.verdict == Verdict::VerifiedUpTo) j["verifiedUpTo"] = r.verifiedUpTo;
  j["rule"] = r.rule;
  if (r.witness) {
    j["witness"] = {{"n", r.witness->n ? Json(*r.witness->n) : Json(nullptr)},
                    {"value", r.witness->value},
                    {"constraint", r.witness->constraint}};
  } else {
    j["witness"] = nullptr;
  }
  j["phi"] = r.phi ? Json(*r.phi) : Json(nullptr);
  if (r.verdict == Verdict::VerifiedUpTo) j["monotoneTrend"] = r.monotoneTrend;
  return j;
}

Json necessity_json(const NecessityReport& r) {
  return {{"cond1", std::string(to_string(r.cond1))},
          {"cond2", std::string(to_string(r.cond2))},
          {"cond3", std::string(to_string(r.cond3))},
          {"overall", r.overall ? "pass" : "fail"}};
}

Json optional_number(std::optional<double> v) { return v && std::isfinite(*v) ? Json(*v) : Json(nullptr); }

Json tail_json(const TailDescriptor& d) {
  auto index = [](double q) -> Json {
    if (q == kHeavyTail) return "heavy";
    if (std::isinf(q)) return "inf";
    return q;
  };
  return {{"qLeft", index(d.qLeft)},     {"qLeftStrict", d.qLeftStrict}, {"qRight", index(d.qRight)},
          {"qRightStrict", d.qRightStrict}, {"eAFinite", d.eAFinite},       {"e2AFinite", d.e2AFinite},
          {"pNeg", optional_number(d.pNeg)}, {"pPos", optional_number(d.pPos)}};
}

void write_pmf_csv(std::ostream& os, std::span<const double> probs) {
  os << "n,pmf\n";
  for (std::size_t n = 0; n < probs.size(); ++n) os << n << ',' << format_shortest(probs[n], true) << '\n';
}

// Rows 0..nmax: closed form where available, otherwise the recursion.
std::vector<double> pmf_prefix(const FamilySpec& spec, int nmax) {
  if (spec.kind() == FamilyKind::GaussianMix || spec.kind() == FamilyKind::ExtremeStable) {
    return pgf_coeffs(spec, nmax).p;
  }
  std::vector<double> out;
  for (int n = 0; n <= nmax; ++n) out.push_back(pmf_closed(spec, n));
  return out;
}

void require_valid(const FamilySpec& spec, std::ostream& err) {
  const auto r = check_family(spec);
  if (r.passes()) return;
  err << "error: " << spec.describe() << " is not a valid mixing law (" << r.rule << ")\n";
  throw InvalidExit{};
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_validate(const FamilySpec& spec, std::optional<int> odd_max, std::ostream& out) {
  const auto report = check_family(spec);
  Json j = header_json(spec);
  j.update(report_json(report));
  const auto desc = tail_descriptor(spec);
  j["tails"] = tail_json(desc);
  j["necessary"] = necessity_json(check_necessary(desc));
  if (odd_max) {
    try {
      j["numeric"] = report_json(check_sufficient_numeric(spec, *odd_max));
    } catch (const UnsupportedFamily& e) {
      j["numeric"] = Json{{"unsupported", e.what()}};
    }
  }
  out << j.dump(2) << '\n';
  return report.passes() ? 0 : 1;
}

int cmd_pmf(const FamilySpec& spec, std::optional<int> nmax, double epsilon, int ncap, const std::string& format,
            std::ostream& out, std::ostream& err) {
  require_valid(spec, err);
  if (nmax) {
    if (*nmax < 0) throw UsageError("--nmax must be >= 0");
    const auto probs = pmf_prefix(spec, *nmax);
    if (format == "csv") {
      write_pmf_csv(out, probs);
    } else {
      Json j = header_json(spec);
      j["pmf"] = probs;
      out << j.dump(2) << '\n';
    }
    return 0;
  }
  const auto table = pmf_table(spec, epsilon, ncap);
  if (format == "csv") {
    write_pmf_csv(out, table.probs);
  } else {
    Json j = header_json(spec);
    j["pmf"] = table.probs;
    j["truncation"] = std::string(to_string(table.reason));
    j["accumulated"] = table.accumulated;
    j["tailGap"] = table.tailGap;
    out << j.dump(2) << '\n';
  }
  if (table.reason == Truncation::CapReached) {
    err << "note: table capped at n = " << table.last_index() << ", unaccounted mass "
        << format_shortest(table.tailGap) << '\n';
  }
  return 0;
}

int cmd_pgf(const FamilySpec& spec, double z, std::ostream& out) {
  const bool ok = check_family(spec).passes();
  Json j = header_json(spec);
  j["z"] = z;
  j["value"] = pgf_eval(spec, z);
  j["valid"] = ok;
  out << j.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_sample(const FamilySpec& spec, std::size_t count, std::uint64_t seed, double epsilon, int ncap,
               const std::string& format, std::ostream& out, std::ostream& err) {
  require_valid(spec, err);
  const auto table = pmf_table(spec, epsilon, ncap);
  const auto counts = sample_count(table, seed, count);
  if (format == "json") {
    Json j = header_json(spec);
    j["seed"] = seed;
    j["counts"] = counts;
    out << j.dump(2) << '\n';
  } else {
    for (int y : counts) out << y << '\n';
  }
  return 0;
}

int cmd_oracle(const FamilySpec& spec, int n, std::int64_t samples, std::uint64_t seed, unsigned threads,
               std::ostream& out) {
  if (n < 0) throw UsageError("--n must be >= 0");
  const bool ok = check_family(spec).passes();
  const auto est = oracle::mc_estimate(spec, n, samples, seed, {threads});
  std::optional<double> exact;
  try {
    if (spec.kind() == FamilyKind::GaussianMix || spec.kind() == FamilyKind::ExtremeStable) {
      exact = pgf_coeffs(spec, n, Gate::Skip).p.back();
    } else {
      exact = pmf_closed(spec, n, Gate::Skip);
    }
  } catch (const DomainError&) {
  }
  Json j = header_json(spec);
  j["n"] = est.n;
  j["value"] = est.value;
  j["stderr"] = est.std_error;
  j["samples"] = est.samples;
  j["seed"] = est.seed;
  j["shardSize"] = oracle::kShardSize;
  j["exact"] = optional_number(exact);
  if (exact && est.std_error > 0.0) {
    j["ratio"] = std::fabs(est.value - *exact) / est.std_error;
  } else {
    j["ratio"] = nullptr;
  }
  j["valid"] = ok;
  out << j.dump(2) << '\n';
  return 0;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

int cmd_figure(int which, const std::string& dir, std::ostream& out) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stem = "figure" + std::to_string(which);
  std::ostringstream mixing;
  std::vector<double> probs;
  if (which == 1) {
    // atom at -2 with mass 0.009, atom at 2 with mass 0.991
    const auto spec = FamilySpec::two_point(2.0, 2.0, 0.009);
    const auto& s = *spec.get_if<TwoPoint>();
    mixing << "x,mass\n"
           << format_shortest(-s.a, true) << ',' << format_shortest(s.p, true) << '\n'
           << format_shortest(s.b, true) << ',' << format_shortest(1.0 - s.p, true) << '\n';
    probs = pmf_prefix(spec, 12);
  } else {
    const auto spec = FamilySpec::asym_laplace(2.3, 0.3, 0.058);
    mixing << "x,density\n";
    constexpr int kPoints = 400;
    for (int i = 0; i < kPoints; ++i) {
      const double x = -4.0 + 16.0 * i / (kPoints - 1);
      mixing << format_shortest(x, true) << ',' << format_shortest(std::exp(log_density(spec, x)), true) << '\n';
    }
    probs = pmf_prefix(spec, 30);
  }
  std::ostringstream pmf;
  write_pmf_csv(pmf, probs);
  const fs::path mixing_path = fs::path(dir) / (stem + "_mixing.csv");
  const fs::path pmf_path = fs::path(dir) / (stem + "_pmf.csv");
  write_file(mixing_path, mixing.str());
  write_file(pmf_path, pmf.str());
  out << Json{{"figure", which}, {"files", {mixing_path.string(), pmf_path.string()}}}.dump(2) << '\n';
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed Poisson distributions with real-valued mixing laws", "mixpois"};
  app.require_subcommand(1);

  FamilyFlags flags;
  std::string format;
  std::string out_path;
  std::optional<int> odd_max;
  std::optional<int> nmax;
  double epsilon = kDefaultEpsilon;
  int ncap = kDefaultCap;
  double z = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  int n = 0;
  std::int64_t samples = 1'000'000;
  unsigned threads = 0;
  int which = 1;

  auto* validate = app.add_subcommand("validate", "Check existence of the mixed Poisson law");
  auto* pmf = app.add_subcommand("pmf", "Probability mass function");
  auto* pgf = app.add_subcommand("pgf", "Probability generating function at z");
  auto* sample = app.add_subcommand("sample", "Draw counts by inversion");
  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo estimate of f(n) against the exact value");
  auto* figure = app.add_subcommand("figure", "Write figure data (mixing law and PMF) as CSV");

  for (auto* sub : {validate, pmf, pgf, sample, oracle_cmd}) {
    flags.attach(*sub);
    sub->add_option("--out", out_path, "Write output to this file instead of standard output");
  }
  validate->add_option("--odd-max", odd_max, "Also run the finite-horizon odd-moment check up to this odd n");
  pmf->add_option("--nmax", nmax, "Emit f(0..nmax) instead of a mass-truncated table");
  for (auto* sub : {pmf, sample}) {
    sub->add_option("--epsilon", epsilon, "Stop once the tabulated mass reaches 1 - epsilon")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--ncap", ncap, "Largest tabulated count")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  }
  pgf->add_option("--z", z, "Argument in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  sample->add_option("--count", count, "Number of draws")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Random seed");
  oracle_cmd->add_option("--n", n, "Count index")->required();
  oracle_cmd->add_option("--samples", samples, "Monte Carlo sample size")
      ->check(CLI::Range(static_cast<std::int64_t>(oracle::kMinSamples), std::numeric_limits<std::int64_t>::max()));
  oracle_cmd->add_option("--seed", seed, "Random seed");
  oracle_cmd->add_option("--threads", threads, "Worker threads (0 = all cores); does not change results");
  figure->add_option("--which", which, "Figure number")->required()->check(CLI::IsMember({1, 2}));
  figure->add_option("--out", out_path, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (figure->parsed()) return cmd_figure(which, out_path, out);
    const FamilySpec spec = flags.build();
    Output sink(out_path, out);
    std::ostream& os = sink.get();
    if (validate->parsed()) return cmd_validate(spec, odd_max, os);
    if (pmf->parsed()) return cmd_pmf(spec, nmax, epsilon, ncap, format.empty() ? "csv" : format, os, err);
    if (pgf->parsed()) return cmd_pgf(spec, z, os);
    if (sample->parsed()) return cmd_sample(spec, count, seed, epsilon, ncap, format, os, err);
    return cmd_oracle(spec, n, samples, seed, threads, os);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidExit&) {
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mixpois::cli
