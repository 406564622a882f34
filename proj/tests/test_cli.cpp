#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hodgekit/cli.hpp"
#include "hodgekit/model_io.hpp"

using namespace hk;
using io::Json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path dir;
  TempDir() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("hodgekit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

struct Result {
  int code;
  Json json;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, Json::parse(out.str())};
}

std::string norm_text(long p, const std::string& basis, const std::string& weights) {
  return R"({"kind":"norm","schema_version":1,"p":)" + std::to_string(p) + R"(,"basis":)" + basis +
         R"(,"weights":)" + weights + "}";
}

std::string canonical(const std::string& text) {
  return Json::parse(text).dump(2) + "\n";
}

}  // namespace

TEST_CASE("model parsing") {
  SUBCASE("norm") {
    const auto m = io::parse_model_text(norm_text(3, R"([["1","0"],["0","1"]])", R"(["1/2","-1"])"));
    CHECK(m.kind() == "norm");
    const auto& n = std::get<io::NormModel>(m.model).norm;
    CHECK(n.place().p() == 3);
    CHECK(n.weights() == std::vector<Rational>{Rational(1, 2), -1});
  }
  SUBCASE("errors carry a path and a reason") {
    auto message = [](const std::string& text) {
      try {
        io::parse_model_text(text);
      } catch (const ValidationError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message(norm_text(2, R"([["1","2"],["2","4"]])", R"(["0","0"])")) == "$.basis: basis singular");
    CHECK(message(norm_text(2, R"([["1","0"],["0","1"]])", R"(["1/0","0"])")) ==
          "$.weights[0]: invalid rational \"1/0\"");
    CHECK(message(norm_text(4, R"([["1"]])", R"(["0"])")) == "$.p: p = 4 is not prime");
    CHECK(message(norm_text(2, R"([["1","0"],["0"]])", R"(["0","0"])")) == "$.basis[1]: ragged matrix row");
    CHECK(message(R"({"kind":"norm","schema_version":2})") == "$.schema_version: unsupported schema version 2");
    CHECK(message(R"({"kind":"tree","schema_version":1})") == "$.kind: unknown kind \"tree\"");
    CHECK(message(R"({"kind":"norm","schema_version":1,"p":2,"basis":[["1"]],"weights":["0"],"x":1})") ==
          "$: unknown field \"x\"");
    CHECK(message("{").rfind("$: invalid JSON", 0) == 0);
    CHECK(message(R"({"kind":"rep","schema_version":1,"generators":1,"relators":[[1,1]],"matrices":[[["2"]]]})") ==
          "$.matrices: relator g1 g1 does not map to the identity");
    CHECK(message(R"({"kind":"graph","schema_version":1,"vertices":2,"edges":[[0,1,"0"]],"boundary":{"0":["1"]}})")
              .rfind("$: ", 0) == 0);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::parse_model_file("/nonexistent/model.json"), ValidationError);
  }
}

TEST_CASE("canonical files round-trip byte for byte") {
  TempDir tmp;
  const std::vector<std::string> docs = {
      norm_text(5, R"([["1","2"],["0","-1/3"]])", R"(["0","7/2"])"),
      R"({"kind":"graph","schema_version":1,"vertices":3,"edges":[[0,1,"1"],[1,2,"2/3"]],"boundary":{"0":["0","1"],"2":["1","-1"]}})",
      R"({"kind":"graph","schema_version":1,"vertices":2,"edges":[[0,1,"1"]],"boundary":{"0":{"p":2,"basis":[["1"]],"weights":["1"]},"1":{"p":2,"basis":[["1"]],"weights":["0"]}}})",
      R"({"kind":"rep","schema_version":1,"generators":2,"relators":[[1,2,-1,-2]],"matrices":[[["2"]],[["1/3"]]],"cocycle":[[["1"]],[["0"]]]})",
      R"({"kind":"rep","schema_version":1,"generators":1,"relators":[],"minpoly":["1","0","1"],"matrices":[[[["0","1"],"0"],["0",["0","-1"]]]]})",
      R"({"kind":"voltage-graph","schema_version":1,"vertices":1,"edges":[[0,0,"1"]],"labels":[[1]],"rep":{"generators":1,"relators":[],"matrices":[[["2"]]]}})",
      R"({"kind":"residues","schema_version":1,"lambda":["1","-1/2"],"items":[{"weight":"1/2","residue":["0","1"]}]})",
  };
  for (const auto& d : docs) {
    const std::string text = canonical(d);
    CHECK(io::serialize(io::parse_model_text(text)) == text);
  }
  // A rep referenced by file name stays a reference.
  tmp.write("loop.json", canonical(R"({"kind":"rep","schema_version":1,"generators":1,"relators":[],"matrices":[[["4"]]]})"));
  const std::string vg =
      canonical(R"({"kind":"voltage-graph","schema_version":1,"vertices":1,"edges":[[0,0,"1"]],"labels":[[1]],"rep":"loop.json"})");
  const auto path = tmp.write("vg.json", vg);
  const auto m = io::parse_model_file(path);
  CHECK(io::serialize(m) == vg);
  CHECK(std::get<io::VoltageGraphModel>(m.model).rep.rep.rank() == 1);
}

TEST_CASE("command line") {
  TempDir tmp;
  const auto a = tmp.write("a.json", norm_text(2, R"([["1","0"],["0","1"]])", R"(["0","0"])"));
  const auto b = tmp.write("b.json", norm_text(2, R"([["1","0"],["0","1"]])", R"(["3","1"])"));

  SUBCASE("norm dist") {
    const auto r = run({"norm", "dist", a, b});
    CHECK(r.code == 0);
    CHECK(r.json == Json{{"d2_sq", "10"}, {"d_inf", "3"}});
  }
  SUBCASE("output is one sorted line") {
    std::ostringstream out, err;
    CHECK(cli::run({"norm", "dist", a, b}, out, err) == 0);
    CHECK(out.str() == "{\"d2_sq\":\"10\",\"d_inf\":\"3\"}\n");
  }
  SUBCASE("norm spectrum and com") {
    const auto s = run({"norm", "spectrum", a, b});
    CHECK(s.json["lambdas"] == Json{"-1", "-3"});  // weights are -log_p of the basis norms
    const auto c = run({"norm", "com", a, b, "--mass", "1", "--mass", "3"});
    CHECK(c.code == 0);
    CHECK(c.json["exact"] == true);
    CHECK(c.json["point"]["weights"] == Json{"9/4", "3/4"});
    CHECK(c.json["objective"] == "15/2");
    CHECK(c.json["objective_approx"].is_number_float());
  }
  SUBCASE("place mismatch and bad input exit with 2") {
    CHECK(run({"norm", "dist", a, b, "--place", "3"}).code == 2);
    const auto bad = tmp.write("bad.json", norm_text(2, R"([["1","1"],["1","1"]])", R"(["0","0"])"));
    const auto r = run({"norm", "dist", a, bad});
    CHECK(r.code == 2);
    CHECK(r.json["error"].get<std::string>().find("basis singular") != std::string::npos);
    CHECK(run({"norm", "dist", a}).code == 2);
    CHECK(run({"norm"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"rep", "ss", a}).code == 2);
  }
  SUBCASE("harmonic solve") {
    const auto path = tmp.write(
        "path.json",
        R"({"kind":"graph","schema_version":1,"vertices":3,"edges":[[0,1,"1"],[1,2,"1"]],"boundary":{"0":["0"],"2":["1"]}})");
    const auto r = run({"harmonic", "solve", path, "--tol", "1e-20"});
    CHECK(r.code == 0);
    CHECK(r.json["termination"] == "converged");
    CHECK(r.json["values"][1] == Json{"1/2"});
    CHECK(r.json["energy"] == "1/2");
    const auto loop = tmp.write("loop.json", R"({"kind":"voltage-graph","schema_version":1,"vertices":1,"edges":[[0,0,"1"]],"labels":[[1]],"rep":{"generators":1,"relators":[],"matrices":[[["2","0"],["0","8"]]]}})");
    CHECK(run({"harmonic", "solve", loop}).code == 2);
    const auto e = run({"harmonic", "solve", loop, "--place", "2"});
    CHECK(e.code == 0);
    CHECK(e.json["energy"] == "10");
  }
  SUBCASE("representation commands") {
    const auto triv = tmp.write("triv.json", R"({"kind":"rep","schema_version":1,"generators":1,"relators":[],"matrices":[[["1","0","0"],["0","1","0"],["0","0","1"]]]})");
    CHECK(run({"rep", "weightfilt", triv}).json == Json{{"gr_dims", {{"0", 3}}}});
    const auto heis = tmp.write("heis.json", R"({"kind":"rep","schema_version":1,"generators":2,"relators":[],"matrices":[[["1","1"],["0","1"]],[["2","0"],["0","2"]]]})");
    CHECK(run({"rep", "weightfilt", heis}).json["gr_dims"] == Json{{"-1", 1}, {"1", 1}});
    CHECK(run({"rep", "weightfilt", heis, "--word", "2"}).code == 2);
    const auto g = run({"rep", "grpsi", heis, "--word", "1"});
    CHECK(g.code == 0);
    CHECK(g.json["blocks"] == Json{1, 1});
    CHECK(g.json["rep"]["matrices"][0] == Json::parse(R"([["1","0"],["0","1"]])"));
    CHECK(run({"rep", "ss", heis}).json["blocks"] == Json{1, 1});
    const auto rot = tmp.write("rot.json", R"({"kind":"rep","schema_version":1,"generators":2,"relators":[],"matrices":[[["0","-1"],["1","0"]],[["2","0"],["0","1"]]]})");
    const auto q = run({"rep", "qu", rot});
    CHECK(q.json["orders"] == Json{4, nullptr});
    CHECK(q.json["exponent"].is_null());
    CHECK(run({"rep", "qu", rot, "--word", "1", "--word", "1,1"}).json["exponent"] == 4);
    CHECK(run({"rep", "charb", rot, "--word", "1"}).json["coefficients"] == Json{"1", "0", "1"});
    CHECK(run({"rep", "charb", rot, "--word", "3"}).code == 2);
    CHECK(run({"rep", "charb", rot, "--word", "x"}).code == 2);
  }
  SUBCASE("deformations") {
    const auto f2 = tmp.write("f2.json", R"({"kind":"rep","schema_version":1,"generators":2,"relators":[],"matrices":[[["1","0"],["0","1"]],[["2","1"],["1","1"]]]})");
    const auto t = run({"deform", "tangent", f2});
    CHECK(t.json["dimZ1"] == 8);
    CHECK(t.json["dimH1"] == 8 - t.json["dimB1"].get<int>());
    CHECK(run({"deform", "lift", f2}).code == 2);  // no cocycle in the file
    const auto z2 = tmp.write("z2.json", R"({"kind":"rep","schema_version":1,"generators":2,"relators":[[1,2,-1,-2]],"matrices":[[["1","0"],["0","1"]],[["1","0"],["0","1"]]],"cocycle":[[["0","1"],["0","0"]],[["0","0"],["1","0"]]]})");
    const auto l = run({"deform", "lift", z2, "--order", "3"});
    CHECK(l.code == 0);
    CHECK(l.json["lift"]["status"] == "obstructed");
    CHECK(l.json["lift"]["order"] == 1);
    CHECK(l.json["lift"]["residuals"] == Json::parse(R"([[["1","0"],["0","-1"]]])"));
    CHECK(l.json["dimZ1"] == 8);
  }
  SUBCASE("kms and residues") {
    const auto r = tmp.write("res.json", R"({"kind":"residues","schema_version":1,"lambda":["1","0"],"items":[{"weight":"0","residue":["0","1"]}]})");
    const auto k = run({"kms", r});
    CHECK(k.json["items"][0]["residue"] == Json{"0", "2"});
    const auto back = tmp.write("back.json", R"({"kind":"residues","schema_version":1,"lambda":["1","0"],"items":[{"weight":"0","residue":["0","2"]}]})");
    CHECK(run({"kms", back, "--inverse"}).json["items"][0]["residue"] == Json{"0", "1"});
    CHECK(run({"residue", "exp", r}).code == 2);
    const auto real = tmp.write("real.json", R"({"kind":"residues","schema_version":1,"lambda":["0","0"],"items":[{"weight":"0","residue":["-1/3","0"]},{"weight":"0","residue":["2","0"]}]})");
    CHECK(run({"residue", "exp", real}).json["exponents"] == Json{"1/3", "0"});
  }
}
