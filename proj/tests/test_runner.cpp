#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eqtime/config.hpp"
#include "eqtime/pipelines.hpp"
#include "eqtime/report_io.hpp"

using namespace eqtime;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "eqtime_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Json base_doc(const std::string& out) {
  Json doc;
  doc["model"] = {{"kind", "ising_ring"}, {"L", 3}, {"omega", 1.0}, {"gamma", 1.1}};
  doc["initial"] = {{"system", "plus_x"}};
  doc["output"] = {{"dir", out}};
  return doc;
}

}  // namespace

TEST_CASE("config validation") {
  Json doc;
  doc["model"] = {{"kind", "nonsense"}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = Json::object();
  doc["model"] = {{"kind", "ising_ring"}, {"L", 1}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = Json::object();
  doc["analysis"] = {{"K", 0.5}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = Json::object();
  doc["model"] = {{"L", 13}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);  // above max_L
  doc["limits"] = {{"allow_large", true}};
  CHECK_NOTHROW(parse_config(doc));

  doc = Json::object();
  doc["unknown_section"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // Defaults parse cleanly.
  CHECK_NOTHROW(parse_config(Json::object()));
}

TEST_CASE("config overrides") {
  Json doc = Json::object();
  apply_override(doc, "model.L=7");
  apply_override(doc, "model.kind=random_ring");
  apply_override(doc, "analysis.eps=[0.5,1.0]");
  const auto cfg = parse_config(doc);
  CHECK(cfg.model.L == 7);
  CHECK(cfg.model.kind == "random_ring");
  REQUIRE(cfg.analysis.eps.size() == 2);
  CHECK(cfg.analysis.eps[0] == 0.5);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("cmd_spectrum: L=2 eigenvalues match the analytic blocks") {
  const auto out = fresh_dir("spectrum_l2");
  Json doc = base_doc(out.string());
  doc["model"]["L"] = 2;
  CHECK(cmd_spectrum(parse_config(doc)) == 0);

  const auto csv = slurp(out / "eigenvalues.csv");
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "index,energy");
  std::vector<double> es;
  while (std::getline(ss, line)) {
    const auto comma = line.find(',');
    es.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(es.size() == 4);
  const double outer = 2.0 * std::sqrt(1.0 + 1.1 * 1.1);
  CHECK(es[0] == doctest::Approx(-outer).epsilon(1e-9));
  CHECK(es[1] == doctest::Approx(-2.2).epsilon(1e-9));
  CHECK(es[2] == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(es[3] == doctest::Approx(outer).epsilon(1e-9));

  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "density_fit.json"));
}

TEST_CASE("rerun determinism: identical bytes for every data file") {
  const auto out1 = fresh_dir("rerun_a");
  const auto out2 = fresh_dir("rerun_b");
  Json doc1 = base_doc(out1.string());
  doc1["model"] = {{"kind", "random_ring"}, {"L", 4}, {"gamma", 1.0},
                   {"w", 0.2}, {"seed", 11}};
  Json doc2 = doc1;
  doc2["output"]["dir"] = out2.string();
  CHECK(cmd_gapdist(parse_config(doc1)) == 0);
  CHECK(cmd_gapdist(parse_config(doc2)) == 0);
  for (const char* name : {"histogram.csv", "xi_profile.csv", "gapdist.json"})
    CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("worker-count invariance of emitted numbers") {
  const auto out1 = fresh_dir("workers_1");
  const auto out2 = fresh_dir("workers_2");
  Json doc1 = base_doc(out1.string());
  doc1["model"]["L"] = 5;
  doc1["parallelism"] = {{"workers", 1}};
  Json doc2 = doc1;
  doc2["output"]["dir"] = out2.string();
  doc2["parallelism"] = {{"workers", 2}};
  CHECK(cmd_gapdist(parse_config(doc1)) == 0);
  CHECK(cmd_gapdist(parse_config(doc2)) == 0);
  CHECK(slurp(out1 / "histogram.csv") == slurp(out2 / "histogram.csv"));
  CHECK(slurp(out1 / "xi_profile.csv") == slurp(out2 / "xi_profile.csv"));
}

TEST_CASE("equilibrated configuration emits the marker file") {
  const auto out = fresh_dir("equilibrated");
  Json doc = base_doc(out.string());
  doc["initial"] = {{"system", "up"}};  // parity-protected: Q = 0 with sx
  CHECK(cmd_gapdist(parse_config(doc)) == 0);
  CHECK(fs::exists(out / "equilibrated.json"));
  CHECK(!fs::exists(out / "histogram.csv"));
  const auto j = Json::parse(slurp(out / "equilibrated.json"));
  CHECK(j.at("equilibrated").get<bool>());
}

TEST_CASE("binomial gapdist mode") {
  const auto out = fresh_dir("binomial");
  Json doc;
  doc["model"] = {{"kind", "binomial"}, {"n_bits", 100000}};
  doc["analysis"] = {{"eps", {1.0, 2.0}}, {"eps_grid", 50}};
  doc["output"] = {{"dir", out.string()}};
  CHECK(cmd_gapdist(parse_config(doc)) == 0);
  const auto j = Json::parse(slurp(out / "gapdist.json"));
  CHECK(j.at("sigma_G").get<double>() == doctest::Approx(std::sqrt(100000.0) / 2).epsilon(1e-4));
  CHECK(fs::exists(out / "xi_profile.csv"));
}

TEST_CASE("empty window returns precondition error") {
  const auto out = fresh_dir("empty_window");
  Json doc = base_doc(out.string());
  doc["initial"] = {{"system", "plus_x"}, {"bath", "microcanonical"},
                    {"center", 1e6}, {"width", 0.01}};
  CHECK_THROWS_AS(cmd_gapdist(parse_config(doc)), PreconditionError);
  CHECK(!fs::exists(out / "histogram.csv"));  // no partial data files
}

TEST_CASE("sweep: one-point grid reproduces the single bound run") {
  const auto out_sweep = fresh_dir("sweep_one");
  Json doc = base_doc(out_sweep.string());
  doc["model"]["L"] = 3;
  doc["sweep"] = {{"L", {3}}};
  doc["analysis"] = {{"eps", {0.5}}, {"T", {5.0, 50.0}}};
  CHECK(cmd_sweep(parse_config(doc)) == 0);
  const auto csv = slurp(out_sweep / "aggregate.csv");
  std::istringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  CHECK(header.find("exact_avg(T=5[1/energy])") != std::string::npos);
  std::getline(ss, row);
  REQUIRE(!row.empty());

  // Cross-check the aggregate values against the bound pipeline quantities.
  const auto out_bound = fresh_dir("sweep_one_ref");
  Json doc2 = base_doc(out_bound.string());
  doc2["model"]["L"] = 3;
  doc2["analysis"] = {{"eps", {0.5}}, {"T", {5.0, 50.0}}};
  CHECK(cmd_bound(parse_config(doc2)) == 0);
  const auto rep = Json::parse(slurp(out_bound / "bound_report.json"));

  std::vector<std::string> fields;
  std::istringstream rs(row);
  std::string cell;
  while (std::getline(rs, cell, ',')) fields.push_back(cell);
  // header: L,seed,eps,xi,a,delta,Q,sigma_G,T_eq,exact...
  CHECK(std::stod(fields[2]) == 0.5);
  CHECK(std::stod(fields[4]) == doctest::Approx(rep.at("a").get<double>()).epsilon(1e-12));
  CHECK(std::stod(fields[5]) == doctest::Approx(rep.at("delta").get<double>()).epsilon(1e-12));
  CHECK(std::stod(fields[6]) == doctest::Approx(rep.at("Q").get<double>()).epsilon(1e-12));
}

TEST_CASE("sweep: random ring statistics across seeds") {
  const auto out = fresh_dir("sweep_seeds");
  Json doc;
  doc["model"] = {{"kind", "random_ring"}, {"L", 3}, {"gamma", 1.0}, {"w", 0.2}};
  doc["observable"] = {{"kind", "sz"}};
  doc["initial"] = {{"system", "up"}};
  doc["sweep"] = {{"L", {3, 4}}, {"seeds", {1, 2, 3}}};
  doc["analysis"] = {{"eps", {0.5}}, {"T", {10.0}}};
  doc["output"] = {{"dir", out.string()}};
  CHECK(cmd_sweep(parse_config(doc)) == 0);
  const auto csv = slurp(out / "aggregate.csv");
  int rows = -1;  // minus header
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 6);  // 2 L x 3 seeds, deterministic order

  // Deterministic row order: L ascending outer, seeds in listed order.
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  std::vector<std::pair<int, int>> order;
  while (std::getline(ss, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    order.emplace_back(std::stoi(line.substr(0, c1)),
                       std::stoi(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  const std::vector<std::pair<int, int>> expect{{3, 1}, {3, 2}, {3, 3},
                                                {4, 1}, {4, 2}, {4, 3}};
  CHECK(order == expect);
}

TEST_CASE("output.formats filters emitted data files") {
  const auto out = fresh_dir("formats_csv_only");
  Json doc = base_doc(out.string());
  doc["output"]["formats"] = {"csv"};
  CHECK(cmd_gapdist(parse_config(doc)) == 0);
  CHECK(fs::exists(out / "histogram.csv"));
  CHECK(!fs::exists(out / "gapdist.json"));
  CHECK(fs::exists(out / "manifest.json"));  // always written

  Json bad = base_doc(out.string());
  bad["output"]["formats"] = {"xml"};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("manifest records files with checksums") {
  const auto out = fresh_dir("manifest");
  Json doc = base_doc(out.string());
  CHECK(cmd_gapdist(parse_config(doc)) == 0);
  const auto manifest = Json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("tool").get<std::string>() == kToolVersion);
  bool found = false;
  for (const auto& f : manifest.at("files")) {
    if (f.at("path") == "histogram.csv") {
      found = true;
      const auto content = slurp(out / "histogram.csv");
      char hex[32];
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(fnv1a64(content)));
      CHECK(f.at("fnv1a64").get<std::string>() == hex);
      CHECK(f.at("bytes").get<std::uint64_t>() == content.size());
    }
  }
  CHECK(found);
}

TEST_CASE("format_full round-trips doubles") {
  for (double x : {1.0 / 3.0, 2.7182818284590452, 1e-300, -4.37e17}) {
    CHECK(std::stod(format_full(x)) == x);
  }
}
