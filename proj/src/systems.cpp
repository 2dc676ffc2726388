#include "descspace/systems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "descspace/errors.hpp"
#include "descspace/numeric.hpp"

namespace descspace::systems {

namespace {

constexpr int kMaxSpins = 20;

}  // namespace

JointTable build_ising(const IsingSpec& spec) {
  const Eigen::Index n = spec.coupling.rows();
  if (n < 1 || spec.coupling.cols() != n) {
    throw Error("coupling matrix must be square and non-empty");
  }
  if (n > kMaxSpins) {
    throw Error("spin systems above " + std::to_string(kMaxSpins) +
                " components are not enumerable");
  }
  if (!(spec.kT > 0.0) || !std::isfinite(spec.kT)) {
    throw Error("kT must be positive and finite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.coupling(i, i) != 0.0) {
      throw Error("coupling diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(spec.coupling(i, j))) {
        throw Error("couplings must be finite");
      }
      if (spec.coupling(i, j) != spec.coupling(j, i)) {
        throw Error("coupling matrix must be symmetric");
      }
    }
  }

  const std::size_t states = std::size_t{1} << n;
  std::vector<double> energy(states);
  double max_log = -1e300;
  for (std::size_t s = 0; s < states; ++s) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = (s >> i) & 1 ? 1.0 : -1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double xj = (s >> j) & 1 ? 1.0 : -1.0;
        sum += spec.coupling(i, j) * xi * xj;
      }
    }
    energy[s] = sum / spec.kT;
    max_log = std::max(max_log, energy[s]);
  }

  NeumaierAccumulator z_acc;
  for (double& e : energy) {
    e = std::exp(e - max_log);
    z_acc.add(e);
  }
  const double z = z_acc.total();

  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  outcomes.reserve(states);
  masses.reserve(states);
  for (std::size_t s = 0; s < states; ++s) {
    Outcome o(n);
    for (Eigen::Index i = 0; i < n; ++i) o[i] = (s >> i) & 1;
    outcomes.push_back(std::move(o));
    masses.push_back(energy[s] / z);
  }
  return JointTable(std::vector<int>(n, 2), std::move(outcomes),
                    std::move(masses));
}

bool validate_board(std::string_view board) {
  if (board.size() != 16) return false;
  int rows[4] = {0, 0, 0, 0};
  int cols[4] = {0, 0, 0, 0};
  int quads[4] = {0, 0, 0, 0};
  for (int cell = 0; cell < 16; ++cell) {
    const char c = board[cell];
    if (c < '1' || c > '4') return false;
    const int bit = 1 << (c - '1');
    const int r = cell / 4;
    const int col = cell % 4;
    const int q = (r / 2) * 2 + col / 2;
    if (rows[r] & bit) return false;
    if (cols[col] & bit) return false;
    if (quads[q] & bit) return false;
    rows[r] |= bit;
    cols[col] |= bit;
    quads[q] |= bit;
  }
  return true;
}

namespace {

void fill_boards(std::string& board, int cell, int rows[4], int cols[4],
                 int quads[4], std::vector<std::string>& out) {
  if (cell == 16) {
    out.push_back(board);
    return;
  }
  const int r = cell / 4;
  const int c = cell % 4;
  const int q = (r / 2) * 2 + c / 2;
  for (int digit = 0; digit < 4; ++digit) {
    const int bit = 1 << digit;
    if ((rows[r] | cols[c] | quads[q]) & bit) continue;
    rows[r] |= bit;
    cols[c] |= bit;
    quads[q] |= bit;
    board[cell] = static_cast<char>('1' + digit);
    fill_boards(board, cell + 1, rows, cols, quads, out);
    rows[r] &= ~bit;
    cols[c] &= ~bit;
    quads[q] &= ~bit;
  }
}

}  // namespace

std::vector<std::string> generate_boards() {
  std::vector<std::string> out;
  std::string board(16, '0');
  int rows[4] = {0, 0, 0, 0};
  int cols[4] = {0, 0, 0, 0};
  int quads[4] = {0, 0, 0, 0};
  fill_boards(board, 0, rows, cols, quads, out);
  // Depth-first digit order already yields lexicographic output; keep the
  // sort as a guarantee rather than an assumption.
  std::sort(out.begin(), out.end());
  return out;
}

JointTable build_sudoku(const std::vector<std::string>& catalog,
                        std::vector<std::string>* rejected) {
  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  std::vector<std::string> valid;
  for (const std::string& board : catalog) {
    if (!validate_board(board)) {
      if (rejected) {
        rejected->push_back(board);
        continue;
      }
      throw Error("invalid board: '" + board + "'");
    }
    valid.push_back(board);
  }
  std::sort(valid.begin(), valid.end());
  valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
  if (valid.empty()) throw Error("board catalog has no valid boards");

  const double mass = 1.0 / static_cast<double>(valid.size());
  for (const std::string& board : valid) {
    Outcome o(16);
    for (int cell = 0; cell < 16; ++cell) o[cell] = board[cell] - '1';
    outcomes.push_back(std::move(o));
    masses.push_back(mass);
  }
  return JointTable(std::vector<int>(16, 4), std::move(outcomes),
                    std::move(masses));
}

JointTable load_sudoku_catalog(const std::string& path,
                               std::vector<std::string>* rejected) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open board catalog '" + path + "'");
  std::vector<std::string> catalog;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    catalog.push_back(line);
  }
  return build_sudoku(catalog, rejected);
}

JointTable load_ngrams(const std::string& path, const NgramSpec& spec) {
  if (spec.word_length != 4 && spec.word_length != 8) {
    throw Error("word length must be 4 or 8");
  }
  if (spec.window != NgramWindow::Whole && spec.word_length != 8) {
    throw Error("half windows require 8-letter words");
  }
  if (spec.max_rank < 1) throw Error("max_rank must be positive");

  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency list '" + path + "'");

  int kept_rank = 0;
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line) && kept_rank < spec.max_rank) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    double count = 0.0;
    if (!(fields >> word)) continue;  // blank line
    if (!(fields >> count)) {
      throw Error("malformed frequency row at line " +
                  std::to_string(line_no));
    }
    if (static_cast<int>(word.size()) != spec.word_length) continue;
    ++kept_rank;
    if (!std::isfinite(count) || count <= 0.0) {
      throw Error("counts must be positive at line " + std::to_string(line_no));
    }
    bool clean = true;
    for (unsigned char c : word) {
      if (c < 'a' || c > 'z') {
        clean = false;
        break;
      }
    }
    if (!clean) continue;
    rows.emplace_back(word, count);
  }
  if (rows.empty()) {
    throw Error("no usable entries of length " +
                std::to_string(spec.word_length) + " in '" + path + "'");
  }

  int offset = 0;
  int window_len = spec.word_length;
  if (spec.window != NgramWindow::Whole) {
    window_len = 4;
    offset = spec.window == NgramWindow::Second ? 4 : 0;
  }

  NeumaierAccumulator total_acc;
  for (const auto& [word, count] : rows) total_acc.add(count);
  const double total = total_acc.total();

  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  outcomes.reserve(rows.size());
  masses.reserve(rows.size());
  for (const auto& [word, count] : rows) {
    Outcome o(window_len);
    for (int i = 0; i < window_len; ++i) o[i] = word[offset + i] - 'a';
    outcomes.push_back(std::move(o));
    masses.push_back(count / total);
  }
  // The table constructor merges duplicate windows (distinct words can share
  // a half-window) and renormalizes.
  return JointTable(std::vector<int>(window_len, 26), std::move(outcomes),
                    std::move(masses));
}

JointTable build_table(const std::vector<int>& alphabet_sizes,
                       const std::vector<Outcome>& outcomes,
                       const std::vector<double>& masses) {
  return JointTable(alphabet_sizes, outcomes, masses);
}

}  // namespace descspace::systems
