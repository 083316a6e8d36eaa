//------------------------------------------------------------------------------
//
//   Copyright 2026 idva authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
//
//  idva command line: generate instances, run either mechanism, inspect the
//  feasibility graph, run the verification battery, and benchmark.
//
//  Subcommands: generate, sos run, kdep run, verify all, graph inspect, bench.
//  Exit codes: 0 success, 1 property failure, 2 usage or input error.
//
//------------------------------------------------------------------------------

#include <idva/idva.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsageError = 2;

idva::Instance load_instance(const std::string& path) {
  return idva::instance_from_json(idva::read_json_file(path));
}

idva::sos::Config sos_config_from(double d, std::optional<double> chi) {
  idva::sos::Config config;
  config.d = d;
  config.chi_override = chi;
  config.validate();
  return config;
}

void emit(const idva::Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    idva::write_json_file(out_path, doc);
  }
}

//------------------------------------------------------------------------------
// generate
//------------------------------------------------------------------------------

struct GenerateArgs {
  std::string fixture;
  std::string family;
  std::size_t n = 2;
  std::size_t k = 1;
  double alpha = 100.0;
  double eps = idva::kDefaultEps;
  std::uint64_t seed = 1;
  std::size_t max_deps = 2;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  if (args.fixture.empty() == args.family.empty()) {
    std::cerr << "generate needs exactly one of --fixture or --family\n";
    return kUsageError;
  }
  idva::Instance instance = [&] {
    if (!args.fixture.empty()) {
      idva::FixtureParams params;
      params.n = args.n;
      params.k = args.k;
      params.alpha = args.alpha;
      params.eps = args.eps;
      return idva::fixture(args.fixture, params);
    }
    idva::SplitMix64 rng = idva::derive_stream(args.seed, {args.n});
    return idva::experiment::random_instance(args.family, args.n, rng, args.max_deps);
  }();
  emit(idva::instance_to_json(instance), args.out);
  return kOk;
}

//------------------------------------------------------------------------------
// sos run / kdep run
//------------------------------------------------------------------------------

struct SosRunArgs {
  std::string instance;
  double d = 1.0;
  std::optional<double> chi;
  std::string out;
};

int run_sos(const SosRunArgs& args) {
  const idva::Instance instance = load_instance(args.instance);
  const idva::MechanismOutcome outcome =
      idva::sos::run(instance, sos_config_from(args.d, args.chi));
  emit(idva::outcome_to_json(outcome), args.out);
  return kOk;
}

struct KdepRunArgs {
  std::string instance;
  bool audit = false;
  std::string out;
};

int run_kdep(const KdepRunArgs& args) {
  const idva::Instance instance = load_instance(args.instance);
  const idva::MechanismOutcome outcome = idva::kdep::run(instance);
  idva::Json doc = idva::outcome_to_json(outcome);
  bool audit_ok = true;
  if (args.audit) {
    const idva::kdep::AuditReport audit = idva::kdep::audit_declarations(instance);
    audit_ok = audit.ok();
    idva::Json undeclared = idva::Json::array();
    for (const auto& finding : audit.undeclared) {
      undeclared.push_back(idva::Json{{"agent", finding.agent},
                                      {"depends_on", finding.signal},
                                      {"value_before", finding.value_before},
                                      {"value_after", finding.value_after}});
    }
    idva::Json unused = idva::Json::array();
    for (const auto& [agent, signal] : audit.unused) {
      unused.push_back(idva::Json{{"agent", agent}, {"declared", signal}});
    }
    doc["audit"] = idva::Json{{"ok", audit.ok()},
                              {"samples", audit.samples},
                              {"undeclared", std::move(undeclared)},
                              {"unused", std::move(unused)}};
  }
  emit(doc, args.out);
  return audit_ok ? kOk : kPropertyFailure;
}

//------------------------------------------------------------------------------
// graph inspect
//------------------------------------------------------------------------------

struct GraphArgs {
  std::string instance;
  std::string dot;
  std::string out;
};

int run_graph(const GraphArgs& args) {
  const idva::Instance instance = load_instance(args.instance);
  const idva::Digraph graph = idva::build_feasibility_graph(instance);
  const idva::ChiBoundReport report = idva::verify_chi_bound(instance);

  if (!args.dot.empty()) {
    std::ofstream dot(args.dot);
    if (!dot) {
      std::cerr << "cannot open for writing: " << args.dot << '\n';
      return kUsageError;
    }
    dot << "digraph feasibility {\n";
    for (idva::AgentIndex i = 0; i < graph.n; ++i) {
      dot << "  a" << i << ";\n";
      for (idva::AgentIndex j : graph.out[i]) {
        dot << "  a" << i << " -> a" << j << ";\n";
      }
    }
    dot << "}\n";
  }

  emit(idva::Json{{"n", graph.n},
                  {"edges", graph.num_edges()},
                  {"max_outdeg", report.max_out_degree},
                  {"degree_bound", report.degree_bound},
                  {"colors_used", report.colors_used},
                  {"color_bound", report.color_bound},
                  {"ok", report.ok}},
       args.out);
  return report.ok ? kOk : kPropertyFailure;
}

//------------------------------------------------------------------------------
// verify all
//------------------------------------------------------------------------------

struct VerifyArgs {
  std::string instance;
  std::string mechanism = "both";
  double d = 1.0;
  std::optional<double> chi;
  double tol = 1e-9;
  std::string out;
};

idva::Json verify_one(const idva::Instance& instance, idva::verify::Mechanism mechanism,
                      const idva::sos::Config& config, double tol, bool& all_ok) {
  const idva::verify::MechanismFn fn = idva::verify::mechanism_fn(mechanism, config);
  const idva::verify::VerificationReport epic = idva::verify::test_epic(
      instance, fn, idva::verify::DeviationSpec::standard(), tol);
  const idva::verify::VerificationReport ir = idva::verify::test_ir(instance, fn);
  const idva::verify::VerificationReport character =
      idva::verify::test_characterization(instance, fn);
  const idva::verify::WelfareReport welfare =
      idva::verify::measure_welfare(instance, mechanism, config);
  const idva::verify::QueryAuditReport queries =
      idva::verify::audit_queries(instance, mechanism, config);

  const bool ok =
      epic.passed && ir.passed && character.passed && welfare.passed && queries.passed;
  all_ok = all_ok && ok;

  idva::Json doc{{"mechanism", idva::verify::to_string(mechanism)},
                 {"epic", idva::Json{{"passed", epic.passed},
                                     {"checks", epic.checks},
                                     {"max_gain", epic.worst},
                                     {"min_deviations_per_agent",
                                      epic.min_deviations_per_agent}}},
                 {"ir", idva::Json{{"passed", ir.passed},
                                   {"min_utility", ir.worst}}},
                 {"characterization", idva::Json{{"passed", character.passed},
                                                 {"checks", character.checks}}},
                 {"welfare", idva::Json{{"passed", welfare.passed},
                                        {"opt", welfare.opt},
                                        {"expected_welfare", welfare.expected_welfare},
                                        {"ratio", welfare.ratio},
                                        {"bound", welfare.bound}}},
                 {"queries", idva::Json{{"passed", queries.passed},
                                        {"limit", queries.limit},
                                        {"counts", queries.counts}}},
                 {"ok", ok}};
  if (epic.witness) doc["epic"]["witness"] = epic.witness->detail;
  if (ir.witness) doc["ir"]["witness"] = ir.witness->detail;
  if (character.witness) doc["characterization"]["witness"] = character.witness->detail;
  return doc;
}

int run_verify(const VerifyArgs& args) {
  const idva::Instance instance = load_instance(args.instance);
  const idva::sos::Config config = sos_config_from(args.d, args.chi);
  bool all_ok = true;
  idva::Json reports = idva::Json::array();
  if (args.mechanism == "sos" || args.mechanism == "both") {
    reports.push_back(verify_one(instance, idva::verify::Mechanism::sos, config, args.tol,
                                 all_ok));
  }
  if (args.mechanism == "kdep" || args.mechanism == "both") {
    reports.push_back(verify_one(instance, idva::verify::Mechanism::kdep, config, args.tol,
                                 all_ok));
  }
  emit(idva::Json{{"reports", std::move(reports)}, {"ok", all_ok}}, args.out);
  return all_ok ? kOk : kPropertyFailure;
}

//------------------------------------------------------------------------------
// bench
//------------------------------------------------------------------------------

struct BenchArgs {
  std::uint64_t seed = 1;
  std::vector<std::size_t> n_list = {2, 4, 8, 16};
  std::vector<std::string> families;
  std::size_t trials = 10;
  std::string mechanism = "both";
  std::size_t max_deps = 2;
  std::string out;
  std::string csv;
};

int run_bench(const BenchArgs& args) {
  idva::experiment::ExperimentConfig config;
  config.seed = args.seed;
  config.n_list = args.n_list;
  if (!args.families.empty()) config.families = args.families;
  config.trials = args.trials;
  config.mechanism = args.mechanism;
  config.max_deps = args.max_deps;

  const idva::experiment::ExperimentReport report = idva::experiment::run_experiment(config);
  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) {
      std::cerr << "cannot open for writing: " << args.csv << '\n';
      return kUsageError;
    }
    csv << report.csv;
  }
  emit(report.json, args.out);
  return report.all_passed ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-item interdependent-value auction mechanisms"};
  app.require_subcommand(1);

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand("generate", "write an instance as JSON");
  {
    std::string names;
    for (const std::string& name : idva::fixture_names()) {
      names += names.empty() ? name : ", " + name;
    }
    generate->add_option("--fixture", generate_args.fixture, "named fixture: " + names);
  }
  generate->add_option("--family", generate_args.family,
                       "random instance from a generator family");
  generate->add_option("--n", generate_args.n, "number of agents");
  generate->add_option("--k", generate_args.k, "dependency bound for kdep fixtures");
  generate->add_option("--alpha", generate_args.alpha, "weight parameter for carl_daphne");
  generate->add_option("--eps", generate_args.eps, "epsilon parameter");
  generate->add_option("--seed", generate_args.seed, "random seed");
  generate->add_option("--max-deps", generate_args.max_deps,
                       "dependency cap for sparse families");
  generate->add_option("--out", generate_args.out, "output path (default stdout)");

  SosRunArgs sos_args;
  CLI::App* sos = app.add_subcommand("sos", "submodular-over-signals mechanism");
  sos->require_subcommand(1);
  CLI::App* sos_run = sos->add_subcommand("run", "run on an instance");
  sos_run->add_option("--instance", sos_args.instance, "instance JSON path")->required();
  sos_run->add_option("--d", sos_args.d, "submodularity slack d >= 1");
  sos_run->add_option("--chi", sos_args.chi, "override the level divisor chi");
  sos_run->add_option("--out", sos_args.out, "output path (default stdout)");

  KdepRunArgs kdep_args;
  CLI::App* kdep = app.add_subcommand("kdep", "bounded-dependency mechanism");
  kdep->require_subcommand(1);
  CLI::App* kdep_run = kdep->add_subcommand("run", "run on an instance");
  kdep_run->add_option("--instance", kdep_args.instance, "instance JSON path")->required();
  kdep_run->add_flag("--audit", kdep_args.audit, "audit dependency declarations");
  kdep_run->add_option("--out", kdep_args.out, "output path (default stdout)");

  GraphArgs graph_args;
  CLI::App* graph = app.add_subcommand("graph", "feasibility graph tools");
  graph->require_subcommand(1);
  CLI::App* graph_inspect = graph->add_subcommand("inspect", "degree and colour bounds");
  graph_inspect->add_option("--instance", graph_args.instance, "instance JSON path")
      ->required();
  graph_inspect->add_option("--dot", graph_args.dot, "write the graph in DOT format");
  graph_inspect->add_option("--out", graph_args.out, "output path (default stdout)");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "incentive and welfare checks");
  verify->require_subcommand(1);
  CLI::App* verify_all = verify->add_subcommand("all", "run the whole battery");
  verify_all->add_option("--instance", verify_args.instance, "instance JSON path")
      ->required();
  verify_all->add_option("--mechanism", verify_args.mechanism, "sos, kdep, or both")
      ->check(CLI::IsMember({"sos", "kdep", "both"}));
  verify_all->add_option("--d", verify_args.d, "submodularity slack d >= 1");
  verify_all->add_option("--chi", verify_args.chi, "override the level divisor chi");
  verify_all->add_option("--tol", verify_args.tol, "incentive tolerance");
  verify_all->add_option("--out", verify_args.out, "output path (default stdout)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "randomised welfare/query benchmark");
  bench->add_option("--seed", bench_args.seed, "experiment seed");
  bench->add_option("--n", bench_args.n_list, "agent counts (repeatable)");
  bench->add_option("--family", bench_args.families, "generator families (repeatable)");
  bench->add_option("--trials", bench_args.trials, "trials per (n, family)");
  bench->add_option("--mechanism", bench_args.mechanism, "sos, kdep, or both")
      ->check(CLI::IsMember({"sos", "kdep", "both"}));
  bench->add_option("--max-deps", bench_args.max_deps, "dependency cap for sparse families");
  bench->add_option("--out", bench_args.out, "JSON report path (default stdout)");
  bench->add_option("--csv", bench_args.csv, "CSV report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (generate->parsed()) return run_generate(generate_args);
    if (sos->parsed()) return run_sos(sos_args);
    if (kdep->parsed()) return run_kdep(kdep_args);
    if (graph->parsed()) return run_graph(graph_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
