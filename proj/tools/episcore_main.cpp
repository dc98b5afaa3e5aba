#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "episcore/io.hpp"
#include "episcore/pipeline.hpp"

namespace {

using namespace episcore;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"episcore: mine DAG episodes and rank them by minimal-window compactness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a config file");

  // ---- split ----
  auto* split_cmd = app.add_subcommand("split", "split a sequence file into train/test parts");
  std::string split_in, split_train, split_test;
  double split_fraction = 0.5;
  split_cmd->add_option("input", split_in, "sequence file")->required();
  split_cmd->add_option("--train", split_train, "output train file")->required();
  split_cmd->add_option("--test", split_test, "output test file")->required();
  split_cmd->add_option("--fraction", split_fraction, "train fraction in (0,1)");

  // ---- mine ----
  auto* mine_cmd = app.add_subcommand("mine", "mine frequent strict episodes");
  std::string mine_in, mine_out;
  MinerConfig miner_cfg;
  mine_cmd->add_option("input", mine_in, "training sequence file")->required();
  mine_cmd->add_option("--out", mine_out, "episode output file")->required();
  mine_cmd->add_option("--threshold", miner_cfg.min_support,
                       "minimum number of disjoint minimal windows");
  mine_cmd->add_option("--max-window", miner_cfg.max_window, "maximal minimal-window length");
  mine_cmd->add_option("--max-nodes", miner_cfg.max_nodes, "maximal episode size");
  mine_cmd->add_option("--workers", miner_cfg.workers, "worker threads (0: all cores)");
  mine_cmd->add_flag("!--no-parallel", miner_cfg.emit_parallel, "drop parallel episodes");
  mine_cmd->add_flag("!--no-serial", miner_cfg.emit_serial, "drop serial episodes");
  mine_cmd->add_flag("!--no-general", miner_cfg.emit_general, "drop general episodes");

  // ---- rank ----
  auto* rank_cmd = app.add_subcommand("rank", "score mined episodes against a test sequence");
  std::string rank_train, rank_test, rank_episodes_path, rank_out;
  RankConfig rank_cfg;
  rank_cmd->add_option("--train", rank_train, "training sequence file")->required();
  rank_cmd->add_option("--test", rank_test, "test sequence file")->required();
  rank_cmd->add_option("--episodes", rank_episodes_path, "mined episode file")->required();
  rank_cmd->add_option("--out", rank_out, "ranked CSV output")->required();
  rank_cmd->add_option("--rho", rank_cfg.rho, "window weight decay in (0,1)");
  rank_cmd->add_option("--smoothing", rank_cfg.smoothing, "Laplace smoothing for the model");
  rank_cmd->add_option("--max-window", rank_cfg.max_window_scan,
                       "scan bound while ranking (0: unbounded)");
  rank_cmd->add_option("--workers", rank_cfg.workers, "worker threads (0: all cores)");

  // ---- gen-ind ----
  auto* gen_ind = app.add_subcommand("gen-ind", "generate an i.i.d. uniform sequence");
  std::size_t gi_alphabet = 1000, gi_length = 40000;
  std::uint64_t gi_seed = 1;
  std::string gi_out;
  gen_ind->add_option("--alphabet", gi_alphabet, "alphabet size");
  gen_ind->add_option("--length", gi_length, "sequence length");
  gen_ind->add_option("--seed", gi_seed, "rng seed");
  gen_ind->add_option("--out", gi_out, "sequence output file")->required();

  // ---- gen-plant ----
  auto* gen_plant = app.add_subcommand("gen-plant",
                                       "generate a uniform sequence with planted serial episodes");
  std::size_t gp_alphabet = 1000, gp_length = 40000, gp_patterns = 5, gp_len = 5, gp_occ = 100;
  double gp_gap = 0.1;
  std::uint64_t gp_seed = 1;
  std::string gp_out, gp_truth;
  gen_plant->add_option("--alphabet", gp_alphabet, "alphabet size");
  gen_plant->add_option("--length", gp_length, "sequence length");
  gen_plant->add_option("--patterns", gp_patterns, "number of planted patterns");
  gen_plant->add_option("--pattern-len", gp_len, "nodes per pattern");
  gen_plant->add_option("--occurrences", gp_occ, "occurrences per pattern");
  gen_plant->add_option("--gap-prob", gp_gap, "gap probability between pattern events");
  gen_plant->add_option("--seed", gp_seed, "rng seed");
  gen_plant->add_option("--out", gp_out, "sequence output file")->required();
  gen_plant->add_option("--truth", gp_truth, "ground-truth episode file");

  // ---- simulate-normality ----
  auto* sim_cmd = app.add_subcommand("simulate-normality",
                                     "independent-sequence experiment: CSV of Phi(-score)");
  NormalityConfig sim_cfg;
  std::string sim_out;
  sim_cmd->add_option("--alphabet", sim_cfg.alphabet, "alphabet size");
  sim_cmd->add_option("--train-length", sim_cfg.train_length, "training sequence length");
  sim_cmd->add_option("--test-length", sim_cfg.test_length, "test sequence length");
  sim_cmd->add_option("--threshold", sim_cfg.threshold, "mining support threshold");
  sim_cmd->add_option("--max-window", sim_cfg.max_window, "mining window bound");
  sim_cmd->add_option("--rho", sim_cfg.rho, "window weight decay");
  sim_cmd->add_option("--seed", sim_cfg.seed, "rng seed");
  sim_cmd->add_option("--workers", sim_cfg.workers, "worker threads");
  sim_cmd->add_flag("--learned", sim_cfg.learned_probabilities,
                    "estimate probabilities from the training half (default: true uniform)");
  sim_cmd->add_option("--out", sim_out, "CSV output file")->required();

  // ---- inspect ----
  auto* inspect_cmd = app.add_subcommand("inspect", "machine sizes and DOT files per episode");
  std::string ins_episodes, ins_sequence, ins_dot_prefix;
  inspect_cmd->add_option("--episodes", ins_episodes, "episode file")->required();
  inspect_cmd->add_option("--sequence", ins_sequence,
                          "sequence file supplying the symbol table")->required();
  inspect_cmd->add_option("--dot-prefix", ins_dot_prefix,
                          "write <prefix><i>.{mg,simple,mw}.dot files");

  CLI11_PARSE(app, argc, argv);

  if (split_cmd->parsed()) {
    auto data = read_sequence_file(split_in);
    auto [train, test] = split(data.sequence, split_fraction);
    write_sequence_file(split_train, train, data.table);
    write_sequence_file(split_test, test, data.table);
    std::cout << "train " << train.length() << " test " << test.length() << "\n";
  } else if (mine_cmd->parsed()) {
    auto data = read_sequence_file(mine_in);
    auto mined = mine(data.sequence, data.table.size(), miner_cfg);
    write_episodes_file(mine_out, mined, data.table);
    std::cout << "episodes " << mined.size() << "\n";
  } else if (rank_cmd->parsed()) {
    auto train = read_sequence_file(rank_train);
    auto test_data = read_sequence_file(rank_test);
    // re-intern the test sequence against the training table so ids agree;
    // symbols unseen in training enter the table and live off the smoothing
    std::vector<Symbol> test_syms;
    test_syms.reserve(test_data.sequence.length());
    for (Symbol a : test_data.sequence.symbols())
      test_syms.push_back(train.table.intern(test_data.table.token_of(a)));
    EventSequence test(std::move(test_syms));
    ProbabilityModel model =
        estimate_probabilities(train.sequence, train.table, rank_cfg.smoothing);
    auto episodes = read_episodes_file(rank_episodes_path, train.table);
    auto records = rank_episodes(episodes, model, test, train.table.size(), rank_cfg);
    auto out = open_out(rank_out);
    write_ranked_csv(out, records, train.table);
    std::cout << "ranked " << records.size() << "\n";
  } else if (gen_ind->parsed()) {
    auto table = SymbolTable::numeric(gi_alphabet);
    write_sequence_file(gi_out, generate_independent(gi_alphabet, gi_length, gi_seed), table);
  } else if (gen_plant->parsed()) {
    auto table = SymbolTable::numeric(gp_alphabet);
    auto planted =
        generate_planted(gp_alphabet, gp_length, gp_patterns, gp_len, gp_occ, gp_gap, gp_seed);
    write_sequence_file(gp_out, planted.sequence, table);
    if (!gp_truth.empty()) {
      std::vector<MinedEpisode> truth;
      for (const auto& e : planted.episodes) truth.push_back({e, 0});
      write_episodes_file(gp_truth, truth, table);
    }
  } else if (sim_cmd->parsed()) {
    auto result = simulate_normality(sim_cfg);
    auto out = open_out(sim_out);
    write_normality_csv(out, result);
    std::printf("episodes %zu ks %.6g\n", result.episodes_ranked, result.ks_distance);
  } else if (inspect_cmd->parsed()) {
    auto data = read_sequence_file(ins_sequence);
    auto episodes = read_episodes_file(ins_episodes, data.table);
    std::cout << "episode,nodes,mg_states,mg_edges,simple_states,simple_edges,"
                 "mw_states,mw_edges,cross_states,cross_edges\n";
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      auto rep = inspect_episode(episodes[i].episode, data.table.size());
      std::cout << episodes[i].episode.render(data.table) << ',' << rep.episode_nodes << ','
                << rep.mg_states << ',' << rep.mg_edges << ',' << rep.simple_states << ','
                << rep.simple_edges << ',' << rep.mw_states << ',' << rep.mw_edges << ','
                << rep.cross_states << ',' << rep.cross_edges << '\n';
      if (!ins_dot_prefix.empty()) {
        auto base = ins_dot_prefix + std::to_string(i);
        open_out(base + ".mg.dot") << rep.mg_dot;
        open_out(base + ".simple.dot") << rep.simple_dot;
        open_out(base + ".mw.dot") << rep.mw_dot;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const episcore::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
