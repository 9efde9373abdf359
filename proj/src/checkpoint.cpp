#include "morphotag/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <map>

#include "morphotag/error.hpp"
#include "morphotag/text.hpp"

namespace morphotag {

namespace {

constexpr std::string_view kMagic = "MTNER";

std::uint32_t crc(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) throw Error(Errc::CorruptSection, std::string("truncated ") + what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32(const char* what) {
    const auto s = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  std::uint64_t u64(const char* what) {
    const auto s = take(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  std::size_t pos() const noexcept { return pos_; }
  std::string_view since(std::size_t start) const noexcept { return bytes_.substr(start, pos_ - start); }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string fmt_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string metadata_text(const Checkpoint& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto& m = c.config;
  kv.emplace_back("model.word_dim", std::to_string(m.word_dim));
  kv.emplace_back("model.char_embed_dim", std::to_string(m.char_embed_dim));
  kv.emplace_back("model.char_hidden", std::to_string(m.char_hidden));
  kv.emplace_back("model.char_mode", std::string(char_mode_name(m.char_mode)));
  kv.emplace_back("model.word_hidden", std::to_string(m.word_hidden));
  kv.emplace_back("model.dropout", fmt_double(m.dropout));
  kv.emplace_back("model.tags", std::to_string(m.tags));
  kv.emplace_back("model.freeze_embeddings", m.freeze_embeddings ? "1" : "0");
  kv.emplace_back("model.bio_mask", m.bio_mask ? "1" : "0");
  kv.emplace_back("scheme.pos", std::string(scheme_name(m.scheme.pos)));
  kv.emplace_back("scheme.morph", m.scheme.morph ? "1" : "0");
  kv.emplace_back("scheme.script", m.scheme.script ? "1" : "0");
  kv.emplace_back("scheme.lexicon", m.scheme.lexicon ? "1" : "0");
  kv.emplace_back("scheme.reading", m.scheme.reading == CombinedReading::Gloss ? "gloss" : "concat");
  kv.emplace_back("vocab.words", join(c.words, ' '));
  std::vector<std::string> cps;
  for (char32_t ch : c.chars) cps.push_back(std::to_string(static_cast<std::uint32_t>(ch)));
  kv.emplace_back("vocab.chars", join(cps, ' '));
  auto rules = split(c.tagset_rules, '\n');
  if (!rules.empty() && rules.back().empty()) rules.pop_back();
  kv.emplace_back("tagset.rules", join(rules, ';'));
  if (c.lexicon) kv.emplace_back("lexicon.words", join(*c.lexicon, ' '));
  kv.emplace_back("train.best_dev_f1", fmt_double(c.best_dev_f1));
  kv.emplace_back("train.epoch", std::to_string(c.epoch));

  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

void parse_metadata(std::string_view text, Checkpoint& c) {
  std::map<std::string, std::string, std::less<>> kv;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::CorruptSection, "metadata line without '='");
    kv.emplace(line.substr(0, eq), line.substr(eq + 1));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(Errc::CorruptSection, "metadata lacks '" + std::string(key) + "'");
    return it->second;
  };
  auto size = [&](std::string_view key) {
    std::size_t v = 0;
    const auto& s = get(key);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(Errc::CorruptSection, "bad value for " + std::string(key));
    return v;
  };
  auto real = [&](std::string_view key) {
    double v = 0;
    const auto& s = get(key);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(Errc::CorruptSection, "bad value for " + std::string(key));
    return v;
  };
  auto flag = [&](std::string_view key) { return get(key) == "1"; };

  auto& m = c.config;
  m.word_dim = size("model.word_dim");
  m.char_embed_dim = size("model.char_embed_dim");
  m.char_hidden = size("model.char_hidden");
  const auto mode = parse_char_mode(get("model.char_mode"));
  if (!mode) throw Error(Errc::CorruptSection, "bad model.char_mode");
  m.char_mode = *mode;
  m.word_hidden = size("model.word_hidden");
  m.dropout = real("model.dropout");
  m.tags = size("model.tags");
  m.freeze_embeddings = flag("model.freeze_embeddings");
  m.bio_mask = flag("model.bio_mask");
  const auto pos = parse_scheme_id(get("scheme.pos"));
  if (!pos) throw Error(Errc::CorruptSection, "bad scheme.pos");
  m.scheme.pos = *pos;
  m.scheme.morph = flag("scheme.morph");
  m.scheme.script = flag("scheme.script");
  m.scheme.lexicon = flag("scheme.lexicon");
  m.scheme.reading = get("scheme.reading") == "gloss" ? CombinedReading::Gloss : CombinedReading::Concat;
  c.words = split(get("vocab.words"), ' ');
  c.chars.clear();
  for (const auto& cp : split(get("vocab.chars"), ' ')) c.chars.push_back(static_cast<char32_t>(std::stoul(cp)));
  c.tagset_rules.clear();
  for (const auto& rule : split(get("tagset.rules"), ';')) c.tagset_rules += rule + '\n';
  if (kv.count("lexicon.words")) c.lexicon = split(get("lexicon.words"), ' ');
  c.best_dev_f1 = real("train.best_dev_f1");
  c.epoch = size("train.epoch");
}

}  // namespace

Checkpoint snapshot(const Model& model, double best_dev_f1, std::size_t epoch) {
  Checkpoint c;
  c.config = model.config();
  c.words = model.words();
  c.chars = model.chars().chars();
  c.tagset_rules = model.mapping().to_text();
  if (model.lexicon()) c.lexicon = model.lexicon()->sorted_words();
  for (const auto& p : model.params()) c.arrays.push_back({p->id, p->value});
  c.best_dev_f1 = best_dev_f1;
  c.epoch = epoch;
  return c;
}

Model restore(const Checkpoint& ckpt) {
  diff::ParameterSet params;
  for (const auto& a : ckpt.arrays) params.add(a.id, a.value);
  std::optional<Lexicon> lexicon;
  if (ckpt.lexicon) {
    lexicon.emplace();
    for (const auto& w : *ckpt.lexicon) lexicon->insert(w);
  }
  return Model(ckpt.config, ckpt.words, CharVocabulary::from_chars(ckpt.chars), TagsetMapping::parse(ckpt.tagset_rules),
               std::move(lexicon), std::move(params));
}

void copy_params(const Checkpoint& ckpt, Model& model) {
  for (const auto& a : ckpt.arrays) {
    auto& p = model.params().get(a.id);
    if (p.value.shape != a.value.shape) throw Error(Errc::ShapeMismatch, "checkpoint array '" + a.id + "' shape differs");
    p.value = a.value;
  }
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic);
  put_u32(out, ckpt.version);
  const auto meta = metadata_text(ckpt);
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  put_u32(out, crc(meta));
  put_u32(out, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    std::string section;
    put_u32(section, static_cast<std::uint32_t>(a.id.size()));
    section += a.id;
    put_u32(section, static_cast<std::uint32_t>(a.value.rank()));
    for (auto e : a.value.shape) put_u64(section, e);
    for (double v : a.value.data) put_u64(section, std::bit_cast<std::uint64_t>(v));
    out += section;
    put_u32(out, crc(section));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic)
    throw Error(Errc::BadMagic, "not a checkpoint file");
  Reader r(bytes.substr(kMagic.size()));
  Checkpoint c;
  c.version = r.u32("version");
  if (c.version != kCheckpointVersion)
    throw Error(Errc::VersionUnsupported, "checkpoint version " + std::to_string(c.version));

  const auto meta_len = r.u32("metadata length");
  const auto meta = r.take(meta_len, "metadata");
  if (r.u32("metadata checksum") != crc(meta)) throw Error(Errc::CorruptSection, "metadata checksum mismatch");
  parse_metadata(meta, c);

  const auto count = r.u32("section count");
  for (std::uint32_t s = 0; s < count; ++s) {
    const auto start = r.pos();
    NamedArray a;
    a.id = std::string(r.take(r.u32("section id length"), "section id"));
    const auto rank = r.u32("section rank");
    if (rank > 8) throw Error(Errc::CorruptSection, "section '" + a.id + "' has rank " + std::to_string(rank));
    diff::Shape shape(rank);
    std::uint64_t n = 1;
    for (auto& e : shape) {
      e = r.u64("section shape");
      n *= e;
    }
    if (n > (bytes.size() / 8) + 1) throw Error(Errc::CorruptSection, "section '" + a.id + "' is truncated");
    std::vector<double> values(n);
    for (auto& v : values) v = std::bit_cast<double>(r.u64("section values"));
    const auto body = r.since(start);
    if (r.u32("section checksum") != crc(body))
      throw Error(Errc::CorruptSection, "checksum mismatch in section '" + a.id + "'");
    a.value = diff::Tensor(std::move(shape), std::move(values));
    c.arrays.push_back(std::move(a));
  }
  if (!r.done()) throw Error(Errc::CorruptSection, "trailing bytes after last section");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  text::write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(text::read_file(path)); }

}  // namespace morphotag
