#pragma once

// Deterministic synthetic Bulgarian-like corpora and word vectors for tests,
// demos and the shipped fixtures. They stand in for external data that the
// toolkit consumes but does not ship.

#include <cstdint>
#include <vector>

#include "morphotag/corpus.hpp"
#include "morphotag/embeddings.hpp"

namespace morphotag::synthetic {

// Template sentences with planted PER (first name + optional family name),
// LOC and multi-token ORG mentions; every token carries a positional tag.
Corpus planted_corpus(std::size_t sentences, std::uint64_t seed);

// Sentences where a set of surface forms is used both as entities and as
// ordinary words. Entity uses are tagged as proper nouns (LOC) or hybrids
// (PER), other uses as verbs or adverbs, and the surrounding words are drawn
// independently of the labels. Only the positional tag tells them apart.
Corpus tag_decided_corpus(std::size_t sentences, std::uint64_t seed);

// One random vector, uniform in [-0.5, 0.5), for every distinct surface form.
WordVectorTable random_vectors(const std::vector<const Corpus*>& corpora, std::size_t dim, std::uint64_t seed);

}  // namespace morphotag::synthetic
