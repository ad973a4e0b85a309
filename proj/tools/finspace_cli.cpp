// finspace: command-line front end for the finite-space causal toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finspace/enumerate.hpp"
#include "finspace/io.hpp"

namespace {

using namespace finspace;

FiniteSpace load_space(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".dot")
    return dag_to_space(dag_from_dot(read_file(path)));
  return space_from_json(json::parse(read_file(path)));
}

void print_trace(const CoreReport& report) {
  for (const auto& [name, kind] : report.removal_trace)
    std::cout << "removed " << name << " (" << to_string(kind) << ")\n";
}

std::pair<std::size_t, std::size_t> enumeration_caps() {
  std::size_t posets = kMaxPosetN, preorders = kMaxPreorderN;
  if (const char* env = std::getenv("FINSPACE_MAX_N")) {
    std::size_t n = static_cast<std::size_t>(std::stoul(env));
    posets = preorders = n;
  }
  return {posets, preorders};
}

int cmd_enumerate(std::size_t n, bool t0, const std::string& up_to, bool list,
                  std::size_t threads) {
  auto [cap_posets, cap_preorders] = enumeration_caps();
  const std::string suffix = t0 ? "_t0" : "";
  auto labeled = count_classes(n, t0, UpTo::labeled, threads, cap_posets,
                               cap_preorders);
  auto homeo = count_classes(n, t0, UpTo::homeomorphism, threads, cap_posets,
                             cap_preorders);
  std::cout << "distinct" << suffix << ": "
            << (t0 ? *labeled.distinct_t0 : *labeled.distinct)
            << ", inequivalent" << suffix << ": "
            << (t0 ? *homeo.inequivalent_t0 : *homeo.inequivalent);
  if (up_to == "homotopy") {
    auto h = count_classes(n, t0, UpTo::homotopy, threads, cap_posets,
                           cap_preorders);
    std::cout << ", homotopy_classes: " << *h.minimal_t0;
  }
  std::cout << "\n";

  if (list) {
    detail::KeySet seen;
    auto emit = [&](const PreorderView& v) {
      if (up_to != "labeled") {
        FiniteSpace s = v.to_space();
        if (up_to == "homotopy") s = core(s).core;
        if (!seen.insert(canonical_key(s)).second) return;
        std::cout << space_to_json(s).dump() << "\n";
        return;
      }
      std::cout << space_to_json(v.to_space()).dump() << "\n";
    };
    if (t0)
      for_each_poset(n, emit, 0, 1, cap_posets);
    else
      for_each_preorder(n, emit, 0, 1, cap_preorders);
  }
  return 0;
}

int cmd_reduce_core(const std::string& path) {
  CoreReport report = core(load_space(path));
  print_trace(report);
  std::cout << space_to_json(report.core).dump(2) << "\n";
  std::cout << hasse_to_dot(space_to_hasse(report.core));
  return 0;
}

int cmd_dsep(const std::string& path, const std::vector<std::string>& u,
             const std::vector<std::string>& v,
             const std::vector<std::string>& z) {
  FiniteSpace s = load_space(path);
  auto fence = tci_witness(s, u, v, z);
  if (!fence) {
    std::cout << "true\n";
  } else {
    std::cout << "false\n" << "unblocked fence:";
    for (const auto& e : *fence) std::cout << " " << e;
    std::cout << "\n";
  }
  return 0;
}

int cmd_learn(const std::string& truth_path, const std::string& family_path,
              const std::string& data_path, const std::string& mode,
              std::optional<std::size_t> sampled, double alpha,
              std::uint64_t seed) {
  LearnedPoset learned;
  if (!data_path.empty()) {
    if (mode != "observational")
      throw input_error("--data requires --mode observational");
    learned = learn_poset_genotypes(ingest_genotypes_file(data_path));
  } else {
    if (truth_path.empty() || family_path.empty())
      throw input_error("learn needs --truth and --family, or --data");
    DiscreteCausalModel truth = model_from_json(json::parse(read_file(truth_path)));
    InterventionFamily family =
        family_from_json(json::parse(read_file(family_path)));
    OracleMode oracle = sampled ? OracleMode::sampled_mode(*sampled, alpha, seed)
                                : OracleMode::exact();
    learned = learn_poset_interventional(truth, family, oracle);
  }
  std::cout << learned_poset_to_json(learned).dump(2) << "\n";
  std::cout << hasse_to_dot(space_to_hasse(learned.space));
  return 0;
}

int cmd_convert(const std::string& from, const std::string& to,
                const std::string& path) {
  FiniteSpace s;
  if (from == "dag" || from == "hasse")
    s = dag_to_space(dag_from_dot(read_file(path)));
  else if (from == "space")
    s = space_from_json(json::parse(read_file(path)));
  else if (from == "chain")
    s = chain_graph_to_space(chain_graph_from_dot(read_file(path)));
  else if (from == "hyper")
    s = hyper_to_space(hyper_from_json(json::parse(read_file(path))));
  else
    throw input_error("unknown --from format: " + from);

  if (to == "space")
    std::cout << space_to_json(s).dump(2) << "\n";
  else if (to == "dag")
    std::cout << dag_to_dot(space_to_dag(s));
  else if (to == "hasse")
    std::cout << hasse_to_dot(space_to_hasse(s));
  else
    throw input_error("unknown --to format: " + to);
  return 0;
}

int cmd_classify_family(const std::string& path) {
  json j = json::parse(read_file(path));
  InterventionFamily family = family_from_json(j);
  auto universe = family_universe_from_json(j);
  auto c = classify_intervention_topology(family, universe);
  std::cout << "label: " << to_string(c.label) << "\n";
  auto flag = [](bool b) { return b ? "yes" : "no"; };
  std::cout << "trivial: " << flag(c.trivial) << "\n"
            << "singleton_closed: " << flag(c.singleton_closed) << "\n"
            << "partition: " << flag(c.partition) << "\n"
            << "strongly_separating: " << flag(c.strongly_separating) << "\n"
            << "separating: " << flag(c.separating) << "\n";
  return 0;
}

int cmd_separability(const std::string& path) {
  GenotypeDataset data = ingest_genotypes_file(path);
  auto pairs = separability_check(data);
  if (pairs.empty()) {
    std::cout << "all pairs separated (" << data.events.size() << " events)\n";
  } else {
    for (const auto& [a, b] : pairs)
      std::cout << "inseparable: " << a << " " << b << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-space causal model toolkit"};
  app.require_subcommand(1);

  // enumerate
  std::size_t n = 0, threads = 1;
  bool t0 = false, list = false;
  std::string up_to = "labeled";
  auto* enum_cmd = app.add_subcommand("enumerate", "count preorders/posets");
  enum_cmd->add_option("--n", n, "number of elements")->required();
  enum_cmd->add_flag("--t0", t0, "restrict to T0 spaces (posets)");
  enum_cmd->add_option("--up-to", up_to, "dedup level")
      ->check(CLI::IsMember({"labeled", "homeo", "homotopy"}));
  enum_cmd->add_flag("--list", list, "stream spaces as JSON, one per line");
  enum_cmd->add_option("--threads", threads, "worker count");

  // reduce-core
  std::string core_input;
  auto* core_cmd = app.add_subcommand("reduce-core", "beat-point core");
  core_cmd->add_option("input", core_input, "space JSON or DAG DOT")
      ->required()->check(CLI::ExistingFile);

  // dsep
  std::string dsep_input;
  std::vector<std::string> u_set, v_set, z_set;
  auto* dsep_cmd = app.add_subcommand("dsep", "topological d-separation");
  dsep_cmd->add_option("input", dsep_input, "space JSON or DAG DOT")
      ->required()->check(CLI::ExistingFile);
  dsep_cmd->add_option("--u", u_set, "first set")->required();
  dsep_cmd->add_option("--v", v_set, "second set")->required();
  dsep_cmd->add_option("--z", z_set, "conditioning set");

  // learn
  std::string truth_path, family_path, data_path, mode;
  std::optional<std::size_t> sampled;
  double alpha = 0.01;
  std::uint64_t seed = 1;
  auto* learn_cmd = app.add_subcommand("learn", "poset structure discovery");
  learn_cmd->add_option("--truth", truth_path, "ground-truth model JSON")
      ->check(CLI::ExistingFile);
  learn_cmd->add_option("--family", family_path, "intervention sets JSON")
      ->check(CLI::ExistingFile);
  learn_cmd->add_option("--data", data_path, "genotype CSV (tumor,gene)")
      ->check(CLI::ExistingFile);
  learn_cmd->add_option("--mode", mode, "observational for --data");
  learn_cmd->add_option("--sampled", sampled, "use a sampled oracle with N draws");
  learn_cmd->add_option("--alpha", alpha, "family-wise significance");
  learn_cmd->add_option("--seed", seed, "sampling seed");

  // convert
  std::string from, to, convert_input;
  auto* convert_cmd = app.add_subcommand("convert", "between representations");
  convert_cmd->add_option("--from", from, "dag|space|hasse|chain|hyper")
      ->required();
  convert_cmd->add_option("--to", to, "space|dag|hasse")->required();
  convert_cmd->add_option("input", convert_input, "input file")
      ->required()->check(CLI::ExistingFile);

  // classify-family
  std::string classify_input;
  auto* classify_cmd =
      app.add_subcommand("classify-family", "intervention family topology");
  classify_cmd->add_option("input", classify_input, "sets JSON")
      ->required()->check(CLI::ExistingFile);

  // separability
  std::string sep_input;
  auto* sep_cmd = app.add_subcommand("separability", "genotype event pairs");
  sep_cmd->add_option("input", sep_input, "genotype CSV")
      ->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
    if (*enum_cmd) return cmd_enumerate(n, t0, up_to, list, threads);
    if (*core_cmd) return cmd_reduce_core(core_input);
    if (*dsep_cmd) return cmd_dsep(dsep_input, u_set, v_set, z_set);
    if (*learn_cmd)
      return cmd_learn(truth_path, family_path, data_path, mode, sampled,
                       alpha, seed);
    if (*convert_cmd) return cmd_convert(from, to, convert_input);
    if (*classify_cmd) return cmd_classify_family(classify_input);
    if (*sep_cmd) return cmd_separability(sep_input);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
