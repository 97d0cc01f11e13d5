#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "frapm/model.hpp"

namespace frapm {

/// Sum of polynomial pieces; zero outside every piece. Pieces are half-open
/// [lo, hi) except the last one, which includes hi.
class PiecewisePolynomial {
 public:
  struct Piece {
    double lo, hi;
    std::vector<double> coefficients;  // ascending powers of x
  };

  PiecewisePolynomial() = default;
  explicit PiecewisePolynomial(std::vector<Piece> pieces);

  /// "lo hi : c0 c1 ... | lo hi : c0 ..."
  static PiecewisePolynomial parse(std::string_view text);

  double operator()(double x) const;
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  std::vector<Piece> pieces_;
};

/// Model description in flat `key = value` text:
///
///   id = my-model
///   support = <lo> <hi>          initial-data support
///   bound = <M>
///   growth = <piecewise>         b
///   death = <piecewise>          c
///   initial = <piecewise>        initial density (optional)
///   birth.<p>.intensity = <piecewise>   p = 1..r
///   birth.<p>.placement = <piecewise>
///
/// Unknown keys and missing required keys raise ParseError.
ModelSpec parse_model_text(std::string_view text);
ModelSpec load_model_file(const std::string& path);

}  // namespace frapm
