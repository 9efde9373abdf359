#include "morphotag/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "morphotag/error.hpp"
#include "morphotag/text.hpp"

namespace morphotag {

namespace {

std::size_t to_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw Error(Errc::BadConfig, std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw Error(Errc::BadConfig, std::string(key) + ": expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw Error(Errc::BadConfig, std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(Errc::BadConfig, std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

const std::vector<std::string_view>& RunConfig::keys() {
  static const std::vector<std::string_view> k = {
      "train", "dev", "test", "vectors", "tagset-map", "lexicon", "out", "model", "input", "confusion", "log", "grid",
      "parallel", "scheme", "morph", "script-feature", "combined-reading", "char-mode", "char-embed-dim",
      "char-hidden", "word-hidden", "dropout", "bio-mask", "freeze-embeddings", "seed", "lr", "lr-decay", "beta1",
      "beta2", "epsilon", "clip", "clip-mode", "batch-size", "max-epochs", "patience", "bucket", "eval-threads"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto& m = model_config;
  auto& t = train_config;
  if (key == "train") train = value;
  else if (key == "dev") dev = value;
  else if (key == "test") test = value;
  else if (key == "vectors") vectors = value;
  else if (key == "tagset-map") tagset_map = value;
  else if (key == "lexicon") {
    lexicon = value;
    m.scheme.lexicon = !lexicon.empty();
  } else if (key == "out") out = value;
  else if (key == "model") model = value;
  else if (key == "input") input = value;
  else if (key == "confusion") confusion = value;
  else if (key == "log") log = value;
  else if (key == "grid") {
    if (value != "table2" && value != "table6") throw Error(Errc::BadConfig, "grid: expected table2 or table6");
    grid = value;
  } else if (key == "parallel") parallel = to_bool(key, value);
  else if (key == "scheme") {
    const auto id = parse_scheme_id(value);
    if (!id)
      throw Error(Errc::BadConfig, "scheme: expected one of pos2, pos3, pos4, pos5, pos11, pos3+11, pos4+11, none");
    m.scheme.pos = *id;
  } else if (key == "morph") m.scheme.morph = to_bool(key, value);
  else if (key == "script-feature") m.scheme.script = to_bool(key, value);
  else if (key == "combined-reading") {
    if (value == "concat") m.scheme.reading = CombinedReading::Concat;
    else if (value == "gloss") m.scheme.reading = CombinedReading::Gloss;
    else throw Error(Errc::BadConfig, "combined-reading: expected concat or gloss");
  } else if (key == "char-mode") {
    const auto mode = parse_char_mode(value);
    if (!mode) throw Error(Errc::BadConfig, "char-mode: expected none, forward, backward or both");
    m.char_mode = *mode;
  } else if (key == "char-embed-dim") m.char_embed_dim = to_size(key, value);
  else if (key == "char-hidden") m.char_hidden = to_size(key, value);
  else if (key == "word-hidden") m.word_hidden = to_size(key, value);
  else if (key == "dropout") m.dropout = to_double(key, value);
  else if (key == "bio-mask") m.bio_mask = to_bool(key, value);
  else if (key == "freeze-embeddings") m.freeze_embeddings = to_bool(key, value);
  else if (key == "seed") {
    t.seed = to_u64(key, value);
    seed_set = true;
  } else if (key == "lr") t.lr = to_double(key, value);
  else if (key == "lr-decay") t.lr_decay = to_double(key, value);
  else if (key == "beta1") t.beta1 = to_double(key, value);
  else if (key == "beta2") t.beta2 = to_double(key, value);
  else if (key == "epsilon") t.epsilon = to_double(key, value);
  else if (key == "clip") t.clip = to_double(key, value);
  else if (key == "clip-mode") {
    if (value == "value") t.clip_mode = ClipMode::Value;
    else if (value == "norm") t.clip_mode = ClipMode::Norm;
    else throw Error(Errc::BadConfig, "clip-mode: expected value or norm");
  } else if (key == "batch-size") t.batch_size = to_size(key, value);
  else if (key == "max-epochs") t.max_epochs = to_size(key, value);
  else if (key == "patience") t.patience = to_size(key, value);
  else if (key == "bucket") t.bucket_by_length = to_bool(key, value);
  else if (key == "eval-threads") t.eval_threads = to_size(key, value);
  else throw Error(Errc::BadConfig, "unknown key '" + std::string(key) + "'");
}

std::string RunConfig::echo() const {
  const auto& m = model_config;
  const auto& t = train_config;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"train", train}, {"dev", dev}, {"test", test}, {"vectors", vectors}, {"tagset-map", tagset_map},
      {"lexicon", lexicon}, {"out", out}, {"model", model}, {"input", input}, {"confusion", confusion}, {"log", log},
      {"grid", grid}, {"parallel", parallel ? "1" : "0"},
      {"scheme", std::string(scheme_name(m.scheme.pos))}, {"morph", m.scheme.morph ? "1" : "0"},
      {"script-feature", m.scheme.script ? "1" : "0"},
      {"combined-reading", m.scheme.reading == CombinedReading::Gloss ? "gloss" : "concat"},
      {"scheme-dim", std::to_string(scheme_dim(m.scheme))},
      {"char-mode", std::string(char_mode_name(m.char_mode))}, {"char-embed-dim", std::to_string(m.char_embed_dim)},
      {"char-hidden", std::to_string(m.char_hidden)}, {"word-hidden", std::to_string(m.word_hidden)},
      {"dropout", num(m.dropout)}, {"bio-mask", m.bio_mask ? "1" : "0"},
      {"freeze-embeddings", m.freeze_embeddings ? "1" : "0"}, {"seed", std::to_string(t.seed)}, {"lr", num(t.lr)},
      {"lr-decay", num(t.lr_decay)}, {"beta1", num(t.beta1)}, {"beta2", num(t.beta2)},
      {"epsilon", num(t.epsilon)}, {"clip", num(t.clip)}, {"clip-mode", t.clip_mode == ClipMode::Norm ? "norm" : "value"},
      {"batch-size", std::to_string(t.batch_size)}, {"max-epochs", std::to_string(t.max_epochs)},
      {"patience", std::to_string(t.patience)}, {"bucket", t.bucket_by_length ? "1" : "0"},
      {"eval-threads", std::to_string(t.eval_threads)}};
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) out += "config." + k + "=" + v + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::BadConfig, "config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(Errc::BadConfig, "config line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second)
      throw Error(Errc::BadConfig, "config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace morphotag
