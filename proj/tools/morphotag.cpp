// morphotag: train, evaluate and apply the Bi-LSTM-CRF named entity tagger.
//
//   morphotag train    --train t.conll --dev d.conll --vectors v.vec --out m.ckpt
//   morphotag evaluate --model m.ckpt --test t.conll [--confusion c.csv]
//   morphotag tag      --model m.ckpt --input raw.conll [--out tagged.conll]
//   morphotag validate FILE
//   morphotag stats    FILE
//   morphotag ablate   --grid table6 --train ... --dev ... --vectors ...
//
// Exit status: 0 success, 1 operational error, 2 validation findings.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morphotag/ablation.hpp"
#include "morphotag/checkpoint.hpp"
#include "morphotag/config.hpp"
#include "morphotag/corpus.hpp"
#include "morphotag/embeddings.hpp"
#include "morphotag/error.hpp"
#include "morphotag/eval.hpp"
#include "morphotag/tagset.hpp"
#include "morphotag/text.hpp"
#include "morphotag/train.hpp"

namespace fs = std::filesystem;
using namespace morphotag;

namespace {

const std::set<std::string> kBoolKeys = {"parallel", "morph", "script-feature", "bio-mask", "freeze-embeddings",
                                         "bucket"};
// Keys holding paths that must exist before a command starts.
const std::vector<std::string> kInputPaths = {"train", "dev", "test", "vectors", "tagset-map", "lexicon", "model",
                                              "input"};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag storage for one subcommand: every config key is also a flag.
struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::string positional;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file (flags override it)");
  for (const auto key : RunConfig::keys()) {
    const std::string k(key);
    if (kBoolKeys.count(k))
      cmd->add_flag("--" + k, f.switches[k]);
    else
      cmd->add_option("--" + k, f.values[k]);
  }
}

const std::string& get(const RunConfig& rc, const std::string& key) {
  if (key == "train") return rc.train;
  if (key == "dev") return rc.dev;
  if (key == "test") return rc.test;
  if (key == "vectors") return rc.vectors;
  if (key == "tagset-map") return rc.tagset_map;
  if (key == "lexicon") return rc.lexicon;
  if (key == "model") return rc.model;
  if (key == "input") return rc.input;
  if (key == "out") return rc.out;
  throw std::logic_error("no path key " + key);
}

RunConfig resolve(CLI::App* cmd, const Flags& f) {
  RunConfig rc;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw UsageError("--config: file not found: " + f.config);
    for (const auto& [k, v] : parse_config_text(text::read_file(f.config))) rc.set(k, v);
  }
  for (const auto key : RunConfig::keys()) {
    const std::string k(key);
    if (kBoolKeys.count(k)) {
      if (f.switches.at(k)) rc.set(k, "1");
    } else if (cmd->count("--" + k) > 0) {
      rc.set(k, f.values.at(k));
    }
  }
  if (!f.positional.empty()) rc.input = f.positional;
  if (!rc.seed_set) {
    if (const char* env = std::getenv("MORPHOTAG_SEED"); env && *env) rc.set("seed", env);
  }
  for (const auto& k : kInputPaths) {
    const auto& p = get(rc, k);
    if (!p.empty() && !fs::exists(p)) throw UsageError("--" + k + ": file not found: " + p);
  }
  return rc;
}

void require(const RunConfig& rc, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (get(rc, k).empty()) throw UsageError(std::string("--") + k + " is required");
}

Corpus read_corpus(const std::string& path, Columns columns, const std::string& split) {
  return parse_conll(text::read_file(path), columns, split);
}

TagsetMapping read_mapping(const RunConfig& rc) {
  return rc.tagset_map.empty() ? TagsetMapping::defaults() : TagsetMapping::load(rc.tagset_map);
}

std::optional<Lexicon> read_lexicon(const RunConfig& rc) {
  if (rc.lexicon.empty()) return std::nullopt;
  return Lexicon::load(rc.lexicon);
}

int cmd_train(RunConfig rc) {
  require(rc, {"train", "dev", "vectors", "out"});
  const auto train_set = read_corpus(rc.train, Columns::Labeled, "train");
  const auto dev_set = read_corpus(rc.dev, Columns::Labeled, "dev");
  corpus_stats(train_set);  // rejects BIO-invalid data
  corpus_stats(dev_set);
  const auto vectors = WordVectorTable::load(rc.vectors);
  rc.model_config.word_dim = vectors.dimension();
  rc.model_config.validate();
  rc.train_config.validate();

  Model model(rc.model_config, vectors, CharVocabulary::build(train_set), read_mapping(rc), read_lexicon(rc),
              rc.train_config.seed);
  const std::string log_path = rc.log.empty() ? rc.out + ".log" : rc.log;
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error(Errc::Io, "cannot write " + log_path);

  const auto result = train(model, train_set, dev_set, rc.train_config, [&](const EpochLog& e) {
    const auto line = e.to_kv();
    std::cerr << line << "\n";
    log << line << "\n";
    log.flush();
  });
  save_checkpoint(result.best, rc.out);
  std::cout << "best_epoch=" << result.best_epoch << "\n"
            << "best_dev_f1=" << format_percent(result.best_dev_f1) << "\n"
            << "epochs=" << result.epochs.size() << "\n"
            << "checkpoint=" << rc.out << "\n"
            << "log=" << log_path << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& rc) {
  require(rc, {"model"});
  const std::string& path = rc.test.empty() ? rc.input : rc.test;
  if (path.empty()) throw UsageError("--test is required");
  const auto model = restore(load_checkpoint(rc.model));
  const auto gold = read_corpus(path, Columns::Labeled, "test");
  const auto predicted = predict_all(model, gold, rc.train_config.eval_threads);
  const auto report = score(gold, predicted);
  std::cout << format_report(report) << "\n" << report_kv(report);
  if (!rc.confusion.empty()) {
    text::write_file(rc.confusion, confusion(gold_labels(gold), predicted).to_csv());
    std::cerr << "confusion matrix written to " << rc.confusion << "\n";
  }
  return 0;
}

int cmd_tag(const RunConfig& rc) {
  require(rc, {"model", "input"});
  const auto model = restore(load_checkpoint(rc.model));
  const auto input = read_corpus(rc.input, Columns::Unlabeled, "input");
  const auto predicted = predict_all(model, input, rc.train_config.eval_threads);
  std::string out;
  for (std::size_t s = 0; s < input.sentences.size(); ++s) {
    if (s > 0) out += "\n";
    const auto& tokens = input.sentences[s].tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out += tokens[i].surface;
      if (tokens[i].tag) out += " " + *tokens[i].tag;
      if (tokens[i].label) out += " " + std::string(label_name(*tokens[i].label));
      out += " " + std::string(label_name(predicted[s][i])) + "\n";
    }
  }
  if (rc.out.empty())
    std::cout << out;
  else
    text::write_file(rc.out, out);
  return 0;
}

int cmd_validate(const RunConfig& rc) {
  require(rc, {"input"});
  const auto corpus = read_corpus(rc.input, Columns::Labeled, "");
  std::size_t found = 0;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& v : validate_bio(sentence)) {
      const auto& tok = sentence.tokens[v.index];
      const auto prev = v.index == 0 ? std::string("sentence start")
                                     : std::string(label_name(*sentence.tokens[v.index - 1].label));
      std::cout << rc.input << ":" << tok.line << ": "
                << (v.kind == ViolationKind::OrphanInside ? "OrphanInside" : "TypeMismatch") << " "
                << label_name(*tok.label) << " after " << prev << "\n";
      ++found;
    }
  }
  if (found == 0) {
    std::cout << "OK\n";
    return 0;
  }
  std::cerr << found << " violation(s)\n";
  return 2;
}

int cmd_stats(const RunConfig& rc) {
  require(rc, {"input"});
  const auto stats = corpus_stats(read_corpus(rc.input, Columns::Labeled, ""));
  std::cout << "sentences=" << stats.sentences << "\n" << "tokens=" << stats.tokens << "\n";
  for (const auto t : kEntityTypes) std::cout << entity_type_name(t) << "=" << stats.count(t) << "\n";
  return 0;
}

int cmd_ablate(RunConfig rc) {
  require(rc, {"train", "dev", "vectors"});
  const auto spec = AblationSpec::by_name(rc.grid.empty() ? "table6" : rc.grid);
  const auto train_set = read_corpus(rc.train, Columns::Labeled, "train");
  const auto dev_set = read_corpus(rc.dev, Columns::Labeled, "dev");
  std::optional<Corpus> test_set;
  if (!rc.test.empty()) test_set = read_corpus(rc.test, Columns::Labeled, "test");
  const auto vectors = WordVectorTable::load(rc.vectors);
  const auto mapping = read_mapping(rc);
  const auto lexicon = read_lexicon(rc);

  AblationData data;
  data.train = &train_set;
  data.dev = &dev_set;
  data.test = test_set ? &*test_set : nullptr;
  data.vectors = &vectors;
  data.mapping = &mapping;
  data.lexicon = lexicon ? &*lexicon : nullptr;
  const auto outcomes = run_ablation(spec, data, rc.model_config, rc.train_config, rc.parallel);
  std::cout << format_ablation(spec, outcomes) << "\n" << ablation_kv(outcomes);
  if (!rc.out.empty()) text::write_file(rc.out, ablation_kv(outcomes));
  for (const auto& o : outcomes)
    if (!o.error.empty()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-LSTM-CRF named entity recognition with morphosyntactic features"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    bool positional;
    int (*run)(RunConfig);
  };
  const std::vector<Command> commands = {
      {"train", "train a model and write the best checkpoint", false, [](RunConfig rc) { return cmd_train(rc); }},
      {"evaluate", "score a checkpoint on a labeled file", false, [](RunConfig rc) { return cmd_evaluate(rc); }},
      {"tag", "append predicted labels to an input file", false, [](RunConfig rc) { return cmd_tag(rc); }},
      {"validate", "check BIO well-formedness", true, [](RunConfig rc) { return cmd_validate(rc); }},
      {"stats", "print corpus statistics", true, [](RunConfig rc) { return cmd_stats(rc); }},
      {"ablate", "run the table2 or table6 experiment grid", false, [](RunConfig rc) { return cmd_ablate(rc); }},
  };

  std::vector<Flags> flags(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
    add_flags(sub, flags[i]);
    if (commands[i].positional) sub->add_option("file", flags[i].positional, "corpus file");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const auto rc = resolve(subs[i], flags[i]);
      std::cerr << "command=" << commands[i].name << "\n" << rc.echo();
      return commands[i].run(rc);
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
