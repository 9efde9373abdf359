// Regenerates the committed test fixtures under a target directory:
// small synthetic corpora, matching word vectors, and a tiny checkpoint
// together with damaged copies of it.
//
//   make_fixtures tests/fixtures

#include <filesystem>
#include <iostream>
#include <string>

#include "morphotag/checkpoint.hpp"
#include "morphotag/corpus.hpp"
#include "morphotag/synthetic.hpp"
#include "morphotag/text.hpp"

namespace fs = std::filesystem;
using namespace morphotag;

namespace {

Corpus strip_labels(Corpus c) {
  for (auto& s : c.sentences)
    for (auto& t : s.tokens) t.label.reset();
  return c;
}

std::string untagged(const Corpus& c) {
  std::string out;
  for (std::size_t s = 0; s < c.sentences.size(); ++s) {
    if (s > 0) out += "\n";
    for (const auto& t : c.sentences[s].tokens) out += t.surface + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures DIR\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir / "ckpt");

  const auto train = synthetic::planted_corpus(40, 1);
  const auto dev = synthetic::planted_corpus(15, 2);
  const auto test = synthetic::planted_corpus(15, 3);
  const auto vectors = synthetic::random_vectors({&train, &dev, &test}, 16, 4);
  text::write_file(dir / "train.conll", serialize_conll(train));
  text::write_file(dir / "dev.conll", serialize_conll(dev));
  text::write_file(dir / "test.conll", serialize_conll(test));
  text::write_file(dir / "tagged_input.conll", serialize_conll(strip_labels(test)));
  text::write_file(dir / "untagged_input.conll", untagged(test));
  text::write_file(dir / "vectors.vec", vectors.to_text());

  ModelConfig config;
  config.word_dim = vectors.dimension();
  config.char_embed_dim = 4;
  config.char_hidden = 3;
  config.word_hidden = 4;
  config.scheme.pos = SchemeId::POS3_11;
  config.scheme.morph = true;
  const Model model(config, vectors, CharVocabulary::build(train), TagsetMapping::defaults(), std::nullopt, 42);
  const auto bytes = serialize_checkpoint(snapshot(model, 12.5, 3));
  text::write_file(dir / "ckpt" / "good.ckpt", bytes);

  text::write_file(dir / "ckpt" / "truncated.ckpt", bytes.substr(0, bytes.size() - 37));

  auto flipped = bytes;
  flipped[flipped.size() - 12] ^= 0x01;  // inside the last section's values
  text::write_file(dir / "ckpt" / "flipped_value.ckpt", flipped);

  auto meta = bytes;
  meta[20] ^= 0x20;  // inside the metadata block
  text::write_file(dir / "ckpt" / "flipped_metadata.ckpt", meta);

  auto crc = bytes;
  crc[crc.size() - 1] ^= 0xff;  // the last section's checksum
  text::write_file(dir / "ckpt" / "flipped_checksum.ckpt", crc);

  auto magic = bytes;
  magic[0] = 'X';
  text::write_file(dir / "ckpt" / "bad_magic.ckpt", magic);

  auto version = bytes;
  version[5] = 2;
  text::write_file(dir / "ckpt" / "bad_version.ckpt", version);

  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
