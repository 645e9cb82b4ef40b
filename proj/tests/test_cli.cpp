#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tubecheck/cli.hpp"
#include "tubecheck/error.hpp"

using namespace tubecheck;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorCode::PreconditionViolated, "");
}

MPoly lift(const MPoly& p, const TowerSpecPtr& s) {
  return p.map_coefficients([&](const TowerElement& c) { return c.embed(s); });
}

// Equality up to the order of tower generators.
bool same_poly(const MPoly& a, const MPoly& b) {
  const TowerSpecPtr s = TowerSpec::join(a.coefficient_spec(), b.coefficient_spec());
  return lift(a, s) == lift(b, s);
}

struct Run {
  int code;
  nlohmann::json report;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tubecheck");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  nlohmann::json j;
  if (!out.str().empty() && out.str()[0] == '{') j = nlohmann::json::parse(out.str());
  return {code, j, err.str()};
}

MPoly random_poly(oracle::Rng& rng, const SpacePtr& space, const TowerSpecPtr& spec, bool laurent) {
  MPoly p(space);
  const long terms = rng.range(0, 5);
  for (long k = 0; k < terms; ++k) {
    MPoly::Exponents e(space->size(), 0);
    for (int j = 1; j <= space->dimension(); ++j) e[space->x(j)] = static_cast<std::int16_t>(rng.range(0, 2));
    if (laurent) e[space->index("a")] = static_cast<std::int16_t>(rng.range(-2, 2));
    p += MPoly::monomial(space, e, rng.element(spec, 50));
  }
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse examples") {
    const MPoly p = parse_expression("x1^2 - x2*x3");
    const SpacePtr s = p.space();
    CHECK(s->dimension() == 3);
    auto x = [&](int j) { return MPoly::variable(s, s->x(j)); };
    CHECK(p == x(1) * x(1) - x(2) * x(3));

    const MPoly q = parse_expression("2*sqrt(3*t)*x1*x2^2");
    CHECK(q.size() == 1);
    RadicalBuilder rb;
    auto h = rb.sqrt(RatFunc(3) * RatFunc::t());
    rb.build();
    const SpacePtr qs = q.space();
    const MPoly expected = MPoly::variable(qs, qs->x(1)) * MPoly::variable(qs, qs->x(2)).pow(2) *
                           (rb.root(h) * TowerElement(2));
    CHECK(same_poly(q, expected));
    CHECK(parse_expression(q.to_string()) == q);

    // Precedence, unary minus, rational literals, i, constant radicands.
    CHECK(parse_expression("-x1^2") == -(parse_expression("x1*x1")));
    CHECK(parse_expression("1 + 2*3^2 - 4/8") == parse_expression("37/2"));
    CHECK(parse_expression("(x1 + x2)^2") == parse_expression("x1^2 + 2*x1*x2 + x2^2"));
    CHECK(parse_expression("i^2") == parse_expression("-1"));
    CHECK(parse_expression("sqrt(-4)") == parse_expression("2*i"));
    CHECK(parse_expression("sqrt(8)*sqrt(2)") == parse_expression("4"));
    CHECK(parse_expression("cbrt(t)^3") == parse_expression("t"));
    CHECK(parse_expression("x1/(t + 1)") == parse_expression("(t + 1)^-1*x1"));
    CHECK(parse_expression("  x1\t*  x2 ") == parse_expression("x1*x2"));
  }

  TEST_CASE("parse errors") {
    Error e = error_of([] { parse_expression("x1 + + x2"); });
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(std::string(e.what()).find("column 6") != std::string::npos);
    CHECK(error_of([] { parse_expression("x1 +"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("(x1"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("x1 x2"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("w1"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("x1^y"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("1/x1"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("1/(t - t)"); }).code() == ErrorCode::SyntaxError);
    CHECK(error_of([] { parse_expression("sqrt(x1)"); }).code() == ErrorCode::UnsupportedRadicand);
    CHECK(error_of([] { parse_expression("sqrt(sqrt(t))"); }).code() == ErrorCode::UnsupportedRadicand);
    CHECK(error_of([] { parse_expression("sqrt(t) + sqrt(4*t)"); }).code() == ErrorCode::DependentGenerators);
  }

  TEST_CASE("parser round trip on 200 random polynomials") {
    oracle::Rng rng(2024);
    RadicalBuilder rb;
    rb.sqrt(RatFunc(3) * RatFunc::t());
    rb.sqrt(RatFunc(2));
    rb.sqrt(RatFunc::t() + RatFunc(1));
    rb.cbrt(RatFunc::t());
    rb.use_imaginary_unit();
    const TowerSpecPtr spec = rb.build();
    const SpacePtr plain = VariableSpace::tube(3);
    const SpacePtr laurent = VariableSpace::tube(2, {{"a", VarKind::Parameter, true}});
    for (int k = 0; k < 200; ++k) {
      const bool use_laurent = k % 4 == 3;
      const SpacePtr s = use_laurent ? laurent : plain;
      const MPoly p = random_poly(rng, s, spec, use_laurent);
      const std::string text = p.to_string();
      const MPoly back = parse_expression(text, s);
      CHECK_MESSAGE(same_poly(back, p), text);
      CHECK(lift(back, TowerSpec::join(p.coefficient_spec(), back.coefficient_spec())).to_string() ==
            lift(p, TowerSpec::join(p.coefficient_spec(), back.coefficient_spec())).to_string());
    }
  }

  TEST_CASE("report JSON round trip and verdict names") {
    Report r;
    r.command = "verify-sphericity";
    r.arguments = {{"family", "St"}, {"symbolic", ""}};
    r.verdict = ReportVerdict::NonEquivalent;
    r.residual_terms = 7;
    r.values = {{"residual", "x1 - y2"}, {"list", {1, 2, 3}}};
    r.timing_ms = 12.5;
    const std::string text = r.to_json().dump();
    const Report back = Report::from_json(nlohmann::json::parse(text));
    CHECK(back.to_json().dump() == text);
    for (auto v : {ReportVerdict::Verified, ReportVerdict::Failed, ReportVerdict::NonEquivalent,
                   ReportVerdict::Inconclusive, ReportVerdict::Error}) {
      CHECK(parse_verdict(verdict_name(v)) == v);
    }
    CHECK(exit_code(back) == 0);
    nlohmann::json bad = r.to_json();
    bad["schema_version"] = 99;
    CHECK(error_of([&] { Report::from_json(bad); }).code() == ErrorCode::PreconditionViolated);
    CHECK(error_of([] { Report::from_json(nlohmann::json::object()); }).code() == ErrorCode::PreconditionViolated);
  }

  TEST_CASE("configuration") {
    const Config c = Config::parse("# comment\nprecision = 512\nphi_samples=50\n\noutput_dir = /tmp/x # trailing\n");
    CHECK(c.precision == 512);
    CHECK(c.phi_samples == 50);
    CHECK(c.output_dir == "/tmp/x");
    CHECK(c.random_points == 20);
    CHECK(error_of([] { Config::parse("unknown=1"); }).code() == ErrorCode::PreconditionViolated);
    CHECK(error_of([] { Config::parse("precision"); }).code() == ErrorCode::PreconditionViolated);
    CHECK(error_of([] { Config::parse("precision=abc"); }).code() == ErrorCode::PreconditionViolated);
    CHECK(error_of([] { Config::load("/nonexistent/tubecheck.conf"); }).code() == ErrorCode::PreconditionViolated);
  }

  TEST_CASE("command examples and exit codes") {
    auto r = cli({"verify-sphericity", "--family", "St", "--symbolic"});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "verified");
    CHECK(r.report["residual_terms"] == 0);

    r = cli({"j-invariant", "--t", "-3"});
    CHECK(r.code == 2);
    CHECK(r.report["verdict"] == "error");
    CHECK(r.report["values"]["error"] == "SingularCubic");

    r = cli({"separate-quartics", "--t1", "2", "--t2", "3"});
    CHECK(r.code == 0);
    CHECK(r.report["verdict"] == "non-equivalent");

    r = cli({"separate-quartics", "--t1", "2", "--t2", "2"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "inconclusive");

    r = cli({"j-invariant", "--t", "1"});
    CHECK(r.code == 0);
    CHECK(r.report["values"]["j"] == "9938375/21952");

    r = cli({"trace", "--expr", "x1^2 + x2^2 + x1^3"});
    CHECK(r.code == 1);
    CHECK(r.report["verdict"] == "failed");

    r = cli({"trace", "--family", "FrakP", "--n", "7"});
    CHECK(r.code == 0);

    r = cli({"signature", "--family", "FrakP", "--n", "8", "--p", "1", "--tau", "0", "--expect", "5,3"});
    CHECK(r.code == 0);
    r = cli({"signature", "--family", "FrakP", "--n", "8", "--p", "1", "--tau", "0", "--expect", "6,2"});
    CHECK(r.code == 1);

    r = cli({"verify-homogeneity", "--family", "St", "--points", "3", "--seed", "5"});
    CHECK(r.code == 0);
    CHECK(r.report["values"]["round_trips"] == 3);

    r = cli({"verify-homogeneity", "--family", "M1", "--point", "0,0,0"});
    CHECK(r.code == 2);
    CHECK(r.report["values"]["error"] == "UnsupportedTemplate");

    r = cli({"separate-bases", "--family1", "M1", "--family2", "M2", "--n", "4"});
    CHECK(r.code == 0);
    CHECK(r.report["values"]["degree"] == 3);

    r = cli({"phi-scan", "--samples", "50"});
    CHECK(r.code == 0);
    CHECK(r.report["values"]["derivative_at_zero"] == "512");

    r = cli({"chi", "--t", "1"});
    CHECK(r.report["values"]["chi"] == "-6");
    r = cli({"chi", "--tau", "-7"});
    CHECK(r.code == 2);

    r = cli({"reciprocity", "--t", "2"});
    CHECK(r.code == 1);
    r = cli({"reciprocity", "--t", "2", "--normalized"});
    CHECK(r.code == 0);

    r = cli({"parse", "--expr", "x1 + + x2"});
    CHECK(r.code == 2);
    CHECK(r.report["values"]["error"] == "SyntaxError");

    r = cli({"verify-sphericity", "--family", "Pt", "--n", "7", "--k", "5", "--t", "40"});
    CHECK(r.code == 2);
    CHECK(r.report["values"]["error"] == "ParameterOutOfDomain");

    CHECK(cli({"families"}).code == 0);
    CHECK(cli({}).code == 2);
    CHECK(cli({"nonsense"}).code == 2);
    CHECK(cli({"chi", "--bogus", "1"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("text format and deterministic reports") {
    std::ostringstream out, err;
    CHECK(cli_main({"tubecheck", "verify-sphericity", "--family", "M2", "--n", "3", "--format", "text"}, out, err) ==
          0);
    CHECK(out.str().find("verdict: verified") != std::string::npos);

    auto strip = [](nlohmann::json j) {
      j.erase("timing_ms");
      return j.dump();
    };
    const std::vector<std::string> args{"verify-sphericity", "--family", "CalPt", "--n", "7", "--k", "4"};
    CHECK(strip(cli(args).report) == strip(cli(args).report));
  }

  TEST_CASE("config file and output directory") {
    const auto dir = std::filesystem::temp_directory_path() / "tubecheck_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto conf = dir / "conf.txt";
    {
      std::ofstream f(conf);
      f << "phi_samples = 10\noutput_dir = " << (dir / "reports").string() << "\n";
    }
    auto r = cli({"phi-scan", "--config", conf.string()});
    CHECK(r.code == 0);
    CHECK(r.report["values"]["samples"] == 10);
    CHECK(std::filesystem::exists(dir / "reports" / "phi-scan.json"));
    {
      std::ofstream f(conf);
      f << "bogus = 1\n";
    }
    CHECK(cli({"families", "--config", conf.string()}).code == 2);
    std::filesystem::remove_all(dir);
  }
}
