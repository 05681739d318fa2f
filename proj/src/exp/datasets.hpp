#pragma once

#include <string>
#include <vector>

#include "models/irm.hpp"
#include "util/rng.hpp"

namespace dpvi::exp {

struct LabeledPoints {
  std::vector<std::vector<double>> points;
  std::vector<std::int32_t> labels;
};

// Three equal-probability bivariate Gaussians with shared isotropic
// covariance. Specs 1..6 follow the fixed ladder of mean separations
// built from mu2 = (0.5, 0.5): {(0,0), a*mu2, b*mu2} with
// (a, b) = (4, 8), (2, 4), (1, 2) and variance 0.25 (odd specs) or 0.5
// (even specs).
LabeledPoints gen_gaussian_mixture(int variant, int n_points, Rng& rng);

struct SyntheticHmm {
  std::vector<double> init;
  std::vector<std::vector<double>> trans;
  std::vector<std::vector<double>> emit;
  std::vector<int> hidden;
  std::vector<int> observed;
};

// Draws an HMM (initial/transition rows ~ Dir(trans_conc), emission rows ~
// Dir(emit_conc)) and ancestrally samples a sequence.
SyntheticHmm gen_hmm_data(int n_hidden, int n_obs, int length, Rng& rng,
                          double trans_conc = 0.1, double emit_conc = 10.0);

struct TextSequence {
  std::vector<int> train;
  std::vector<int> test;
  std::vector<char> alphabet;  // symbol id -> character
};

// Reads a text file, normalizes it (lowercase; runs of whitespace collapse
// to one space; only [a-z], space and . , ' - survive) and splits the first
// train_chars symbols for training and the next test_chars for testing.
// The alphabet is built over the union of both parts.
TextSequence load_text_sequence(const std::string& path, int train_chars,
                                int test_chars);
TextSequence split_text(const std::string& raw, int train_chars,
                        int test_chars);

// Plain symbol-id sequence: one non-negative integer per line.
std::vector<int> load_symbol_sequence(const std::string& path);

// Alphabet table serialization: one "id<TAB>character-code" line per symbol.
std::string alphabet_table_string(const std::vector<char>& alphabet);
std::vector<char> parse_alphabet_table(const std::string& text);

// Numeric CSV, one row per point; optional header row is detected and
// skipped.
std::vector<std::vector<double>> load_csv(const std::string& path);

// Relation file: a header line "types n1 n2 ..." and "positions t1 t2 ...",
// then one observed cell per line: entity indices followed by the 0/1 value.
RelationData load_relation(const std::string& path);

// Synthetic two-type block relation: entities carry hidden clusters, block
// probabilities are polarized so the structure is recoverable.
struct SyntheticRelation {
  RelationData relation;  // fully observed
  std::vector<std::int32_t> row_clusters;
  std::vector<std::int32_t> col_clusters;
};
SyntheticRelation gen_block_relation(int rows, int cols, int row_clusters,
                                     int col_clusters, Rng& rng);

// Uniformly samples `count` cells without replacement; returns held-out
// cells and removes them from the relation.
std::vector<RelationData::Cell> hold_out_cells(RelationData& rel, double frac,
                                               Rng& rng);

// Held-out cells named explicitly: one line of entity indices per cell.
// Matching cells are removed from the relation and returned with their
// observed values.
std::vector<RelationData::Cell> hold_out_from_file(RelationData& rel,
                                                   const std::string& path);

// Seeded permutation of 0..n-1 (Fisher-Yates).
std::vector<int> random_permutation(int n, Rng& rng);

}  // namespace dpvi::exp
