#include "exp/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dpvi::exp {

LabeledPoints gen_gaussian_mixture(int variant, int n_points, Rng& rng) {
  if (variant < 1 || variant > 6)
    throw Error("unknown mixture variant (want 1..6)");
  if (n_points < 1) throw Error("need at least one point");
  static const double kScales[3][2] = {{4.0, 8.0}, {2.0, 4.0}, {1.0, 2.0}};
  const double* scale = kScales[(variant - 1) / 2];
  double variance = (variant % 2 == 1) ? 0.25 : 0.5;
  double sd = std::sqrt(variance);
  const double mu2[2] = {0.5, 0.5};
  double means[3][2] = {
      {0.0, 0.0},
      {scale[0] * mu2[0], scale[0] * mu2[1]},
      {scale[1] * mu2[0], scale[1] * mu2[1]},
  };

  LabeledPoints out;
  out.points.reserve(static_cast<std::size_t>(n_points));
  out.labels.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    int c = static_cast<int>(rng.uniform_below(3));
    out.points.push_back({means[c][0] + sd * rng.normal(),
                          means[c][1] + sd * rng.normal()});
    out.labels.push_back(c);
  }
  return out;
}

SyntheticHmm gen_hmm_data(int n_hidden, int n_obs, int length, Rng& rng,
                          double trans_conc, double emit_conc) {
  if (n_hidden < 1 || n_obs < 1 || length < 1)
    throw Error("bad synthetic HMM shape");
  SyntheticHmm out;
  out.init = rng.symmetric_dirichlet(n_hidden, trans_conc);
  for (int s = 0; s < n_hidden; ++s)
    out.trans.push_back(rng.symmetric_dirichlet(n_hidden, trans_conc));
  for (int s = 0; s < n_hidden; ++s)
    out.emit.push_back(rng.symmetric_dirichlet(n_obs, emit_conc));

  out.hidden.resize(static_cast<std::size_t>(length));
  out.observed.resize(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n) {
    const std::vector<double>& row =
        n == 0 ? out.init : out.trans[static_cast<std::size_t>(out.hidden[n - 1])];
    out.hidden[static_cast<std::size_t>(n)] = rng.categorical(row);
    out.observed[static_cast<std::size_t>(n)] = rng.categorical(
        out.emit[static_cast<std::size_t>(out.hidden[static_cast<std::size_t>(n)])]);
  }
  return out;
}

namespace {

bool kept_char(char c) {
  return (c >= 'a' && c <= 'z') || c == '.' || c == ',' || c == '\'' ||
         c == '-';
}

std::string normalize_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char raw_c : raw) {
    char c = static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw_c)));
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (!kept_char(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

TextSequence split_text(const std::string& raw, int train_chars,
                        int test_chars) {
  std::string text = normalize_text(raw);
  if (static_cast<int>(text.size()) < train_chars + test_chars)
    throw Error("text too short: need " +
                std::to_string(train_chars + test_chars) + " symbols, have " +
                std::to_string(text.size()));

  TextSequence out;
  std::string window = text.substr(0, static_cast<std::size_t>(train_chars) +
                                          static_cast<std::size_t>(test_chars));
  std::vector<int> char_to_id(256, -1);
  for (char c : window) {
    auto idx = static_cast<std::size_t>(static_cast<unsigned char>(c));
    if (char_to_id[idx] == -1) {
      char_to_id[idx] = static_cast<int>(out.alphabet.size());
      out.alphabet.push_back(c);
    }
  }
  for (int i = 0; i < train_chars; ++i)
    out.train.push_back(char_to_id[static_cast<std::size_t>(
        static_cast<unsigned char>(window[static_cast<std::size_t>(i)]))]);
  for (int i = train_chars; i < train_chars + test_chars; ++i)
    out.test.push_back(char_to_id[static_cast<std::size_t>(
        static_cast<unsigned char>(window[static_cast<std::size_t>(i)]))]);
  return out;
}

TextSequence load_text_sequence(const std::string& path, int train_chars,
                                int test_chars) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open text file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return split_text(buf.str(), train_chars, test_chars);
}

std::vector<int> load_symbol_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open symbol file: " + path);
  std::vector<int> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    int v;
    if (!(ls >> v)) continue;
    if (v < 0)
      throw Error("symbol file line " + std::to_string(lineno) +
                  ": negative id");
    out.push_back(v);
  }
  if (out.empty()) throw Error("symbol file has no entries: " + path);
  return out;
}

std::string alphabet_table_string(const std::vector<char>& alphabet) {
  std::ostringstream out;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    out << i << "\t" << static_cast<int>(static_cast<unsigned char>(alphabet[i]))
        << "\n";
  return out.str();
}

std::vector<char> parse_alphabet_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<char> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t id;
    int code;
    if (!(ls >> id >> code)) throw Error("malformed alphabet table line: " + line);
    if (id != out.size()) throw Error("alphabet table ids must be consecutive");
    out.push_back(static_cast<char>(code));
  }
  return out;
}

std::vector<std::vector<double>> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header row
      throw Error("CSV line " + std::to_string(lineno) + ": not numeric");
    }
    if (row.empty()) continue;
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw Error("CSV line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("CSV file has no data rows: " + path);
  return rows;
}

RelationData load_relation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation file: " + path);
  RelationData rel;
  std::string line;
  int lineno = 0;
  bool have_types = false, have_positions = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "types") {
      int n;
      while (ls >> n) rel.type_sizes.push_back(n);
      have_types = true;
    } else if (first == "positions") {
      int t;
      while (ls >> t) rel.position_type.push_back(t);
      have_positions = true;
    } else {
      if (!have_types || !have_positions)
        throw Error("relation file needs 'types' and 'positions' headers "
                    "before cells");
      RelationData::Cell cell;
      try {
        cell.entities.push_back(std::stoi(first));
      } catch (const std::exception&) {
        throw Error("relation line " + std::to_string(lineno) +
                    ": not an entity index: " + first);
      }
      int v;
      std::vector<int> rest;
      while (ls >> v) rest.push_back(v);
      if (rest.size() != rel.position_type.size())
        throw Error("relation line " + std::to_string(lineno) +
                    ": expected " + std::to_string(rel.position_type.size()) +
                    " indices and a value");
      for (std::size_t i = 0; i + 1 < rest.size(); ++i)
        cell.entities.push_back(rest[i]);
      cell.value = rest.back();
      rel.cells.push_back(std::move(cell));
    }
  }
  rel.validate();
  return rel;
}

SyntheticRelation gen_block_relation(int rows, int cols, int row_clusters,
                                     int col_clusters, Rng& rng) {
  SyntheticRelation out;
  out.relation.type_sizes = {rows, cols};
  out.relation.position_type = {0, 1};
  out.row_clusters.resize(static_cast<std::size_t>(rows));
  out.col_clusters.resize(static_cast<std::size_t>(cols));
  for (auto& c : out.row_clusters)
    c = static_cast<std::int32_t>(rng.uniform_below(
        static_cast<std::uint32_t>(row_clusters)));
  for (auto& c : out.col_clusters)
    c = static_cast<std::int32_t>(rng.uniform_below(
        static_cast<std::uint32_t>(col_clusters)));

  std::vector<std::vector<double>> block_p(
      static_cast<std::size_t>(row_clusters),
      std::vector<double>(static_cast<std::size_t>(col_clusters)));
  for (auto& row : block_p)
    for (double& p : row) p = rng.uniform() < 0.5 ? 0.1 : 0.9;

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      RelationData::Cell cell;
      cell.entities = {i, j};
      double p = block_p[static_cast<std::size_t>(
          out.row_clusters[static_cast<std::size_t>(i)])]
                        [static_cast<std::size_t>(
                            out.col_clusters[static_cast<std::size_t>(j)])];
      cell.value = rng.uniform() < p ? 1 : 0;
      out.relation.cells.push_back(std::move(cell));
    }
  }
  return out;
}

std::vector<RelationData::Cell> hold_out_cells(RelationData& rel, double frac,
                                               Rng& rng) {
  if (frac < 0.0 || frac >= 1.0) throw Error("held-out fraction must be in [0,1)");
  auto total = rel.cells.size();
  auto n_out = static_cast<std::size_t>(std::floor(frac * total));
  std::vector<int> perm = random_permutation(static_cast<int>(total), rng);
  std::vector<char> mask(total, 0);
  for (std::size_t i = 0; i < n_out; ++i)
    mask[static_cast<std::size_t>(perm[i])] = 1;
  std::vector<RelationData::Cell> heldout;
  std::vector<RelationData::Cell> kept;
  for (std::size_t i = 0; i < total; ++i) {
    if (mask[i])
      heldout.push_back(rel.cells[i]);
    else
      kept.push_back(rel.cells[i]);
  }
  rel.cells = std::move(kept);
  return heldout;
}

std::vector<RelationData::Cell> hold_out_from_file(RelationData& rel,
                                                   const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mask file: " + path);
  std::set<std::vector<int>> masked;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<int> idx;
    int v;
    while (ls >> v) idx.push_back(v);
    if (idx.empty()) continue;
    if (static_cast<int>(idx.size()) != rel.arity())
      throw Error("mask line " + std::to_string(lineno) + ": expected " +
                  std::to_string(rel.arity()) + " entity indices");
    masked.insert(std::move(idx));
  }
  std::vector<RelationData::Cell> heldout;
  std::vector<RelationData::Cell> kept;
  for (auto& cell : rel.cells) {
    if (masked.count(cell.entities))
      heldout.push_back(cell);
    else
      kept.push_back(cell);
  }
  if (heldout.size() != masked.size())
    throw Error("mask file names cells absent from the relation");
  rel.cells = std::move(kept);
  return heldout;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    auto j = static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace dpvi::exp
