#include "cvloc/cmfile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cvloc {

namespace {

// Split on whitespace, remembering 1-based column of each token start.
std::vector<std::pair<std::string, int>> tokenize(const std::string& line) {
  std::vector<std::pair<std::string, int>> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size()) break;
    const size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    out.emplace_back(line.substr(start, i - start), int(start) + 1);
  }
  return out;
}

}  // namespace

CMFile read_cm(std::istream& in) {
  std::string line;
  int lineno = 0;

  // header
  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string magic, version, nfield, cfield;
    hs >> magic >> version >> nfield >> cfield;
    if (magic != "cv-cm" || version != "v1")
      throw ParseError("expected header 'cv-cm v1 ...'", lineno);
    if (nfield.rfind("N=", 0) != 0)
      throw ParseError("expected N=<modes> in header", lineno);
    if (cfield.rfind("convention=", 0) != 0)
      throw ParseError("expected convention=... in header", lineno);
    const std::string conv = cfield.substr(11);
    if (conv != kCMConvention)
      throw ParseError("unsupported convention '" + conv + "' (need '" +
                           kCMConvention + "')",
                       lineno);
    int n = 0;
    const std::string ns = nfield.substr(2);
    auto [p, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), n);
    if (ec != std::errc() || p != ns.data() + ns.size() || n < 1)
      throw ParseError("bad mode count '" + ns + "'", lineno);

    CMFile f;
    const int d = 2 * n;
    Eigen::MatrixXd m(d, d);
    int row = 0;
    while (row < d) {
      if (!std::getline(in, line))
        throw ParseError("expected " + std::to_string(d) + " matrix rows, got " +
                             std::to_string(row),
                         lineno + 1);
      ++lineno;
      auto toks = tokenize(line);
      if (toks.empty()) continue;  // blank line
      if (toks[0].first[0] == '#') {
        if (toks[0].first == "#" && toks.size() > 1 &&
            toks[1].first == "labels:") {
          for (size_t i = 2; i < toks.size(); ++i)
            f.labels.push_back(toks[i].first);
          if (int(f.labels.size()) != n)
            throw ParseError("expected " + std::to_string(n) + " labels, got " +
                                 std::to_string(f.labels.size()),
                             lineno);
        }
        continue;
      }
      if (int(toks.size()) != d)
        throw ParseError("expected " + std::to_string(d) + " values, got " +
                             std::to_string(toks.size()),
                         lineno);
      for (int col = 0; col < d; ++col) {
        const auto& [tok, colno] = toks[col];
        try {
          size_t used = 0;
          m(row, col) = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ParseError("bad number '" + tok + "'", lineno, colno);
        }
      }
      ++row;
    }
    try {
      f.cm = CovarianceMatrix(std::move(m));
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), lineno);
    }
    return f;
  }
}

CMFile read_cm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_cm(in);
}

void write_cm(std::ostream& out, const CMFile& f) {
  out << "cv-cm v1 N=" << f.cm.n_modes << " convention=" << kCMConvention
      << "\n";
  if (!f.labels.empty()) {
    out << "# labels:";
    for (const auto& l : f.labels) out << ' ' << l;
    out << "\n";
  }
  out << std::setprecision(17);
  const int d = f.cm.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out << (j ? " " : "") << f.cm.data(i, j);
    out << "\n";
  }
}

void write_cm_file(const std::string& path, const CMFile& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_cm(out, f);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace cvloc
