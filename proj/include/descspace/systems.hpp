#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "descspace/table.hpp"

namespace descspace::systems {

/// Pairwise-coupled binary spin system at temperature kT (in units where the
/// Boltzmann constant is 1).  Spins take values {-1, +1}; outcome index 0
/// encodes -1 and index 1 encodes +1.
struct IsingSpec {
  Eigen::MatrixXd coupling;  // symmetric, zero diagonal
  double kT = 1.0;
};

/// Exhaustive Boltzmann table p(x) ∝ exp(Σ_{i<j} J_ij x_i x_j / kT) over all
/// 2^N spin configurations.  Throws for N > 20, asymmetric couplings,
/// non-zero diagonals or kT <= 0.
JointTable build_ising(const IsingSpec& spec);

/// Checks a 16-character 4x4 sudoku board (digits '1'..'4', row-major):
/// every row, column and 2x2 quadrant must contain each digit exactly once.
bool validate_board(std::string_view board);

/// All valid 4x4 boards in lexicographic order.  There are exactly 288.
std::vector<std::string> generate_boards();

/// Uniform distribution over a board catalog: 16 components, one per cell,
/// alphabet {0..3} encoding digits 1..4.  Invalid or malformed boards are
/// rejected; if `rejected` is non-null each offending line is reported there,
/// otherwise any rejection throws.  Duplicate boards collapse to one state.
JointTable build_sudoku(const std::vector<std::string>& catalog,
                        std::vector<std::string>* rejected = nullptr);

/// Reads a board catalog file (one 16-character board per line; blank lines
/// and lines starting with '#' are skipped) and builds the uniform table.
JointTable load_sudoku_catalog(const std::string& path,
                               std::vector<std::string>* rejected = nullptr);

/// Which letters of an 8-letter word form the modeled window.
enum class NgramWindow { First, Second, Whole };

struct NgramSpec {
  int word_length = 4;  // 4 or 8
  NgramWindow window = NgramWindow::Whole;
  int max_rank = 10000;
};

/// Loads a "word count" frequency list (one pair per line, ordered by
/// descending count).  Keeps the first max_rank rows whose word has the
/// requested length, then discards words containing symbols outside 'a'..'z',
/// merges duplicate windows and normalizes.  Components are letter positions
/// with alphabet size 26.  Window First/Second selects the leading/trailing
/// four letters of 8-letter words and requires word_length == 8; Whole keeps
/// all word_length letters.
JointTable load_ngrams(const std::string& path, const NgramSpec& spec);

/// Arbitrary user-supplied table: explicit alphabet sizes plus outcome/mass
/// rows.  This is the escape hatch for systems the named builders do not
/// cover.
JointTable build_table(const std::vector<int>& alphabet_sizes,
                       const std::vector<Outcome>& outcomes,
                       const std::vector<double>& masses);

}  // namespace descspace::systems
