#include "frapm/model_file.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "frapm/errors.hpp"
#include "frapm/io.hpp"

namespace frapm {

PiecewisePolynomial::PiecewisePolynomial(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  for (const auto& p : pieces_) {
    if (!(p.lo < p.hi)) throw Error(ErrorKind::ParseError, "polynomial piece needs lo < hi");
    if (p.coefficients.empty()) throw Error(ErrorKind::ParseError, "polynomial piece has no coefficients");
  }
}

PiecewisePolynomial PiecewisePolynomial::parse(std::string_view text) {
  std::vector<Piece> pieces;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto bar = text.find('|', start);
    if (bar == std::string_view::npos) bar = text.size();
    std::string chunk(text.substr(start, bar - start));
    const auto colon = chunk.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::ParseError, "polynomial piece '" + chunk + "' lacks ':'");
    std::istringstream range(chunk.substr(0, colon)), coeffs(chunk.substr(colon + 1));
    Piece p;
    if (!(range >> p.lo >> p.hi)) throw Error(ErrorKind::ParseError, "bad piece range in '" + chunk + "'");
    std::string extra;
    if (range >> extra) throw Error(ErrorKind::ParseError, "trailing text in piece range '" + chunk + "'");
    double c;
    while (coeffs >> c) p.coefficients.push_back(c);
    if (!coeffs.eof()) throw Error(ErrorKind::ParseError, "bad coefficient in '" + chunk + "'");
    pieces.push_back(std::move(p));
    start = bar + 1;
  }
  return PiecewisePolynomial(std::move(pieces));
}

double PiecewisePolynomial::operator()(double x) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    const bool last = i + 1 == pieces_.size();
    if (x >= p.lo && (x < p.hi || (last && x == p.hi))) {
      double acc = 0.0;
      for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
  }
  return 0.0;
}

ModelSpec parse_model_text(std::string_view text) {
  const auto kv = parse_key_values(text);

  std::map<std::string, std::string> seen;
  for (const auto& [k, v] : kv) seen[k] = v;

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = seen.find(key);
    if (it == seen.end()) throw Error(ErrorKind::ParseError, "model file lacks '" + key + "'");
    return it->second;
  };

  ModelSpec spec;
  std::map<int, BirthBranch> branches;
  std::map<int, int> branch_fields;
  for (const auto& [key, value] : seen) {
    if (key == "id" || key == "support" || key == "bound" || key == "growth" || key == "death" ||
        key == "initial")
      continue;
    int p = 0;
    char field[32] = {};
    if (std::sscanf(key.c_str(), "birth.%d.%31s", &p, field) == 2 && p >= 1) {
      const std::string f(field);
      auto poly = PiecewisePolynomial::parse(value);
      if (f == "intensity")
        branches[p].intensity = autonomous(poly);
      else if (f == "placement")
        branches[p].placement = poly;
      else
        throw Error(ErrorKind::ParseError, "unknown model key '" + key + "'");
      ++branch_fields[p];
      continue;
    }
    throw Error(ErrorKind::ParseError, "unknown model key '" + key + "'");
  }

  spec.id = seen.count("id") ? seen["id"] : "file-" + std::to_string(fnv1a(text));
  {
    std::istringstream s(require("support"));
    if (!(s >> spec.support_lo >> spec.support_hi))
      throw Error(ErrorKind::ParseError, "support needs two numbers");
  }
  {
    std::istringstream s(require("bound"));
    if (!(s >> spec.propagation_bound)) throw Error(ErrorKind::ParseError, "bound needs a number");
  }
  spec.growth = autonomous(PiecewisePolynomial::parse(require("growth")));
  spec.death = autonomous(PiecewisePolynomial::parse(require("death")));
  if (seen.count("initial")) spec.initial_density = PiecewisePolynomial::parse(seen["initial"]);

  int expected = 1;
  for (auto& [p, br] : branches) {
    if (p != expected++) throw Error(ErrorKind::ParseError, "birth branches must be numbered 1..r");
    if (branch_fields[p] != 2)
      throw Error(ErrorKind::ParseError, "birth." + std::to_string(p) + " needs intensity and placement");
    spec.births.push_back(std::move(br));
  }
  return spec;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open model file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

}  // namespace frapm
