#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "sq/body_json.hpp"
#include "sq/engine.hpp"
#include "sq/fitting.hpp"
#include "sq/inequalities.hpp"
#include "sq/measure.hpp"

namespace sq::cli {
namespace {

struct Options {
  std::uint64_t seed = 0;
  long samples = 100000;
  long probes = 0;
  double slack = 1.0;
  double eps = 1e-6;
  std::string body;
  std::string cert;
  int k = 0;
  int n = 0;
  int subdim = 0;
  std::string out;
  std::string format = "json";
};

struct VerificationFailure : Error {
  using Error::Error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Top-level scalars as key,value lines; nested values are JSON-encoded.
std::string to_csv(const Json& j) {
  std::string out = "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v = scalar_text(it.value());
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : v) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = quoted + "\"";
    }
    out += it.key() + "," + v + "\n";
  }
  return out;
}

void emit(const Json& j, const Options& o, std::ostream& out) {
  const std::string text = o.format == "csv" ? to_csv(j) : j.dump(2) + "\n";
  if (o.out.empty())
    out << text;
  else
    write_text(o.out, text);
}

Body need_body(const Options& o) {
  if (o.body.empty()) throw InvalidArgument("--body is required");
  return parse_body_spec(o.body, o.seed);
}

Ellipsoid reference_for(const Body& body, double eps) {
  try {
    return john_inscribed(body, eps);
  } catch (const UnsupportedRepresentation&) {
    return Ellipsoid::unit_ball(body.dim());
  }
}

Json volume_json(const Body& body, const Options& o, const RngStream& rng) {
  const auto E = reference_for(body, o.eps);
  Json j{{"dim", body.dim()}, {"mc", to_json(mc_volume(body, E, o.samples, rng))}};
  const auto exact = exact_volume(body);
  j["exact"] = exact ? Json(*exact) : Json(nullptr);
  return j;
}

Json cmd_volume(const Options& o) {
  const Body body = need_body(o);
  Json j = volume_json(body, o, RngStream(o.seed, 1));
  j["schema"] = 1;
  j["command"] = "volume";
  j["body"] = body.describe();
  return j;
}

Json cmd_mahler(const Options& o) {
  const Body body = need_body(o);
  const Body dual = polar(body);
  const Json a = volume_json(body, o, RngStream(o.seed, 1));
  const Json b = volume_json(dual, o, RngStream(o.seed, 2));
  auto value = [](const Json& v) {
    return v["exact"].is_null() ? v["mc"]["value"].get<double>() : v["exact"].get<double>();
  };
  auto rel = [](const Json& v) {
    return v["exact"].is_null() ? v["mc"]["std_error"].get<double>() / v["mc"]["value"].get<double>() : 0.0;
  };
  const double product = value(a) * value(b);
  const double omega = unit_ball_volume(body.dim());
  const double normalized = product / (omega * omega);
  const double sigma = normalized * std::hypot(rel(a), rel(b));
  return Json{{"schema", 1},
              {"command", "mahler"},
              {"body", body.describe()},
              {"dim", body.dim()},
              {"volume", a},
              {"polar_volume", b},
              {"mahler", product},
              {"normalized", normalized},
              {"std_error", sigma},
              {"santalo_ok", normalized <= 1.0 + 3.0 * sigma + 1e-12}};
}

Json cmd_john(const Options& o) {
  const Body body = need_body(o);
  const auto E = john_inscribed(body, o.eps);
  const long probes = o.probes > 0 ? o.probes : default_probe_count(body.dim());
  const auto cert = roundness(body, E, probes, RngStream(o.seed, 1));
  const double bound = std::sqrt(static_cast<double>(body.dim()));
  return Json{{"schema", 1},
              {"command", "john"},
              {"body", body.describe()},
              {"dim", body.dim()},
              {"eps", o.eps},
              {"certificate", to_json(cert)},
              {"sqrt_n", bound},
              {"within_sqrt_n", cert.s <= bound * (1.0 + o.eps) + kContainmentTol}};
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.slack = o.slack;
  cfg.probes = o.probes;
  cfg.eps = o.eps;
  cfg.search_samples = std::max(1000L, o.samples / 10);
  cfg.witness_samples = o.samples;
  return cfg;
}

Json certificate_payload(const TheoremCertificate& cert, const std::string& command, const Options& o) {
  Json j = to_json(cert);
  j["command"] = command;
  j["seed"] = o.seed;
  j["body_spec"] = o.body;
  return j;
}

Json cmd_subquotient(const Options& o) {
  const Body body = need_body(o);
  if (o.n < 1) throw InvalidArgument("--n must be positive");
  const auto cert = run_theorem(body, o.k, o.n, pipeline_config(o), RngStream(o.seed, 1));
  if (!cert.verified) throw VerificationFailure(certificate_payload(cert, "subquotient", o).dump(2));
  return certificate_payload(cert, "subquotient", o);
}

Json cmd_corollary(const Options& o) {
  const Body body = need_body(o);
  const auto cert = run_corollary(body, pipeline_config(o), RngStream(o.seed, 1));
  if (!cert.verified) throw VerificationFailure(certificate_payload(cert, "corollary", o).dump(2));
  return certificate_payload(cert, "corollary", o);
}

Json cmd_averaging(const Options& o) {
  const Body body = need_body(o);
  const int N = body.dim();
  const int d = o.subdim > 0 ? o.subdim : std::max(1, N / 2);
  if (d > N) throw InvalidArgument("--subdim exceeds the body dimension");
  const long outer = 100;
  const long inner = std::max(1L, o.samples / outer);
  auto first = [](const Vector& x) { return x(0) * x(0); };
  auto gauge_power = [&body, N](const Vector& x) { return std::pow(body.gauge(x), -static_cast<double>(N)); };
  const auto a = slice_average_experiment(first, N, d, outer, inner, RngStream(o.seed, 1));
  const auto b = slice_average_experiment(gauge_power, N, d, outer, inner, RngStream(o.seed, 2));
  auto row = [](const AveragingResult& r) {
    const double z = (r.full.value - r.averaged.value) / std::hypot(r.full.std_error, r.averaged.std_error);
    return Json{{"full", to_json(r.full)}, {"averaged", to_json(r.averaged)}, {"z", z}};
  };
  return Json{{"schema", 1},
              {"command", "averaging"},
              {"body", body.describe()},
              {"dim", N},
              {"subdim", d},
              {"first_coordinate_squared", row(a)},
              {"first_coordinate_squared_exact", 1.0 / N},
              {"gauge_power", row(b)}};
}

Json cmd_lab(const Options& o) {
  if (o.out.empty()) throw InvalidArgument("--out <directory> is required");
  const auto rep = run_inequality_lab(o.samples, RngStream(o.seed, 1));
  std::filesystem::create_directories(o.out);
  const std::filesystem::path dir(o.out);
  write_text((dir / "stirling.csv").string(), stirling_csv(rep.stirling));
  write_text((dir / "ratio.csv").string(), ratio_csv(rep.ratios));
  write_text((dir / "beta.csv").string(), beta_csv(rep.beta));
  write_text((dir / "santalo.csv").string(), santalo_csv(rep.santalo));
  Json findings = findings_json(rep);
  write_text((dir / "findings.json").string(), findings.dump(2) + "\n");
  return findings;
}

Json cmd_verify(const Options& o) {
  const Body body = need_body(o);
  if (o.cert.empty()) throw InvalidArgument("--cert is required");
  const auto cert = certificate_from_json(Json::parse(read_text(o.cert)));
  const long probes = o.probes > 0 ? o.probes : default_probe_count(cert.E_final.dim());
  const auto rep = verify_certificate(body, cert, probes, RngStream(o.seed, 1));
  Json j{{"schema", 1}, {"command", "verify"}, {"report", to_json(rep)}, {"s_final", cert.s_final}};
  if (!rep.pass) throw VerificationFailure(j.dump(2));
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subquotient extraction and convex-geometry experiments"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--probes", o.probes, "boundary probes (0: automatic)")->check(CLI::NonNegativeNumber);
    sub->add_option("--slack", o.slack, "subspace-search slack")->check(CLI::NonNegativeNumber);
    sub->add_option("--eps", o.eps, "John ellipsoid tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto with_body = [&o, &common](CLI::App* sub) {
    common(sub);
    sub->add_option("--body", o.body, "body file, inline JSON, or built-in (cube:N, cross:N, ball:N, ...)");
    return sub;
  };

  with_body(app.add_subcommand("volume", "volume of a body"));
  with_body(app.add_subcommand("mahler", "Mahler volume product"));
  with_body(app.add_subcommand("john", "John ellipsoid and roundness"));
  auto* sq_cmd = with_body(app.add_subcommand("subquotient", "256-round subquotient at level k"));
  sq_cmd->add_option("--k", o.k, "induction level")->check(CLI::NonNegativeNumber);
  sq_cmd->add_option("--n", o.n, "target dimension")->check(CLI::PositiveNumber);
  with_body(app.add_subcommand("corollary", "subquotient of automatically chosen dimension"));
  auto* avg = with_body(app.add_subcommand("averaging", "full-sphere vs subspace-averaged integrals"));
  avg->add_option("--subdim", o.subdim, "subspace dimension")->check(CLI::PositiveNumber);
  auto* lab = app.add_subcommand("inequality-lab", "scalar identity and inequality tables");
  common(lab);
  auto* ver = with_body(app.add_subcommand("verify", "re-check a certificate against its body"));
  ver->add_option("--cert", o.cert, "certificate JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Json result;
    if (command == "volume") result = cmd_volume(o);
    else if (command == "mahler") result = cmd_mahler(o);
    else if (command == "john") result = cmd_john(o);
    else if (command == "subquotient") result = cmd_subquotient(o);
    else if (command == "corollary") result = cmd_corollary(o);
    else if (command == "averaging") result = cmd_averaging(o);
    else if (command == "inequality-lab") result = cmd_lab(o);
    else result = cmd_verify(o);
    if (command == "inequality-lab") {
      o.out.clear();
      o.format = o.format == "csv" ? "csv" : "json";
    }
    emit(result, o, out);
    return kExitOk;
  } catch (const VerificationFailure& e) {
    err << e.what() << "\n";
    return kExitVerification;
  } catch (const WitnessViolated& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const BoundViolated& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const FrameMismatch& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace sq::cli
