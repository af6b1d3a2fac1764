#include "ddv/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddv {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& cell, double& out) {
  const char* c = cell.c_str();
  char* end = nullptr;
  out = std::strtod(c, &end);
  return end != c && *end == '\0';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(trimmed(cur));
  return cells;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

struct CsvColumn {
  char family;  // 'u', 'x', or 'y'
  int index;    // 1-based within the family
};

}  // namespace

Trajectory load_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("load_trajectory_csv: cannot open " + path);

  std::string line;
  if (!std::getline(f, line))
    throw std::invalid_argument("load_trajectory_csv: empty file " + path);

  std::vector<std::string> header = split_csv(line);
  std::vector<CsvColumn> cols;
  int counts[3] = {0, 0, 0};  // u, x, y
  auto family_slot = [](char fam) { return fam == 'u' ? 0 : fam == 'x' ? 1 : 2; };
  std::vector<std::vector<bool>> seen(3);
  for (const std::string& name : header) {
    if (name.size() < 2 ||
        (name[0] != 'u' && name[0] != 'x' && name[0] != 'y'))
      throw std::invalid_argument(
          "load_trajectory_csv: header: unknown column '" + name + "'");
    int idx = 0;
    for (size_t i = 1; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i])))
        throw std::invalid_argument(
            "load_trajectory_csv: header: unknown column '" + name + "'");
      idx = idx * 10 + (name[i] - '0');
    }
    if (idx < 1)
      throw std::invalid_argument(
          "load_trajectory_csv: header: unknown column '" + name + "'");
    auto& s = seen[family_slot(name[0])];
    if (static_cast<int>(s.size()) < idx) s.resize(idx, false);
    if (s[idx - 1])
      throw std::invalid_argument(
          "load_trajectory_csv: header: duplicate column '" + name + "'");
    s[idx - 1] = true;
    cols.push_back({name[0], idx});
    ++counts[family_slot(name[0])];
  }
  for (int fam = 0; fam < 3; ++fam)
    for (int i = 0; i < counts[fam]; ++i)
      if (static_cast<int>(seen[fam].size()) <= i || !seen[fam][i])
        throw std::invalid_argument(
            "load_trajectory_csv: header: column indices must be contiguous "
            "from 1");
  const int m = counts[0], n = counts[1], p = counts[2];
  if (m < 1)
    throw std::invalid_argument("load_trajectory_csv: no input columns");

  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != cols.size()) {
      std::ostringstream err;
      err << "load_trajectory_csv: row " << lineno << ": expected "
          << cols.size() << " cells, got " << cells.size();
      throw std::invalid_argument(err.str());
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty())
    throw std::invalid_argument("load_trajectory_csv: no data rows in " +
                                path);

  // last row counts as x_N when exactly the state cells are filled
  bool trailing = false;
  if (n > 0 && rows.size() >= 2) {
    trailing = true;
    const auto& last = rows.back();
    for (size_t c = 0; c < cols.size(); ++c) {
      bool empty = last[c].empty();
      if (cols[c].family == 'x' ? empty : !empty) trailing = false;
    }
  }
  const int N = static_cast<int>(rows.size()) - (trailing ? 1 : 0);

  Trajectory t;
  t.u.resize(m, N);
  if (n > 0) t.x.resize(n, N + (trailing ? 1 : 0));
  if (p > 0) t.y.resize(p, N);

  for (size_t r = 0; r < rows.size(); ++r) {
    const bool is_tail = trailing && r + 1 == rows.size();
    for (size_t c = 0; c < cols.size(); ++c) {
      const std::string& cell = rows[r][c];
      std::string where = "row " + std::to_string(r + 2) + ", column " +
                          std::string(1, cols[c].family) +
                          std::to_string(cols[c].index);
      if (is_tail && cols[c].family != 'x') continue;
      if (cell.empty())
        throw std::invalid_argument("load_trajectory_csv: " + where +
                                    ": empty cell");
      double v;
      if (!parse_double(cell, v))
        throw std::invalid_argument("load_trajectory_csv: " + where +
                                    ": not a number: '" + cell + "'");
      const int i = cols[c].index - 1;
      switch (cols[c].family) {
        case 'u':
          t.u(i, r) = v;
          break;
        case 'x':
          t.x(i, r) = v;
          break;
        default:
          t.y(i, r) = v;
      }
    }
  }
  return t;
}

void save_trajectory_csv(const Trajectory& t, const std::string& path) {
  const int m = static_cast<int>(t.u.rows());
  const int N = t.N();
  const int n = t.has_states() ? static_cast<int>(t.x.rows()) : 0;
  const int p = t.has_outputs() ? static_cast<int>(t.y.rows()) : 0;
  if (m < 1 || N < 1)
    throw std::invalid_argument("save_trajectory_csv: empty input record");
  if (p > 0 && t.y.cols() != N)
    throw std::invalid_argument("save_trajectory_csv: output length mismatch");
  if (n > 0 && t.x.cols() != N && t.x.cols() != N + 1)
    throw std::invalid_argument("save_trajectory_csv: state length mismatch");

  std::ofstream f(path);
  if (!f)
    throw std::invalid_argument("save_trajectory_csv: cannot write " + path);

  bool first = true;
  auto emit_name = [&](char fam, int i) {
    if (!first) f << ',';
    first = false;
    f << fam << i + 1;
  };
  for (int i = 0; i < m; ++i) emit_name('u', i);
  for (int i = 0; i < n; ++i) emit_name('x', i);
  for (int i = 0; i < p; ++i) emit_name('y', i);
  f << '\n';

  const int rows = (n > 0 && t.x.cols() == N + 1) ? N + 1 : N;
  for (int r = 0; r < rows; ++r) {
    first = true;
    auto emit = [&](const std::string& s) {
      if (!first) f << ',';
      first = false;
      f << s;
    };
    for (int i = 0; i < m; ++i) emit(r < N ? fmt(t.u(i, r)) : "");
    for (int i = 0; i < n; ++i) emit(fmt(t.x(i, r)));
    for (int i = 0; i < p; ++i) emit(r < N ? fmt(t.y(i, r)) : "");
    f << '\n';
  }
}

namespace {

// shared row-oriented reader for the labeled-block formats: dimension lines,
// then blocks given row by row, then free key-value lines
struct BlockFile {
  std::vector<std::pair<int, std::vector<std::string>>> lines;  // lineno, tokens
  size_t pos = 0;
  std::string where;

  BlockFile(const std::string& path, const char* what) : where(what) {
    std::ifstream f(path);
    if (!f)
      throw std::invalid_argument(where + ": cannot open " + path);
    std::string raw;
    int lineno = 0;
    while (std::getline(f, raw)) {
      ++lineno;
      size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::vector<std::string> toks = tokens_of(raw);
      if (!toks.empty()) lines.emplace_back(lineno, std::move(toks));
    }
  }

  bool done() const { return pos >= lines.size(); }
  int lineno() const { return done() ? -1 : lines[pos].first; }
  const std::vector<std::string>& toks() const { return lines[pos].second; }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream err;
    err << where << ": ";
    if (!done()) err << "line " << lineno() << ": ";
    err << msg;
    throw std::invalid_argument(err.str());
  }

  // "name value" dimension lines, in any order, all required before blocks
  std::map<std::string, int> read_dims(const std::vector<std::string>& names) {
    std::map<std::string, int> dims;
    while (dims.size() < names.size()) {
      if (done()) fail("missing dimension line");
      const auto& t = toks();
      bool known = false;
      for (const auto& nm : names) known = known || t[0] == nm;
      if (!known || t.size() != 2)
        fail("expected a dimension line (" + names[0] + "/...)");
      if (dims.count(t[0])) fail("duplicate dimension " + t[0]);
      double v;
      if (!parse_double(t[1], v) || v < 1 || v != static_cast<int>(v))
        fail("dimension " + t[0] + " must be a positive integer");
      dims[t[0]] = static_cast<int>(v);
      ++pos;
    }
    return dims;
  }

  // reads the named block; the first row may share the label's line
  Matrix read_block(const std::string& label, int r, int c) {
    if (done()) fail("missing block " + label);
    const auto& head = toks();
    if (head[0] != label) fail("expected block " + label);
    Matrix M(r, c);
    int row = 0;
    if (head.size() > 1) {
      if (static_cast<int>(head.size()) - 1 != c)
        fail("expected " + std::to_string(c) + " values in row 1 of " + label +
             ", got " + std::to_string(head.size() - 1));
      for (int j = 0; j < c; ++j) {
        double v;
        if (!parse_double(head[j + 1], v))
          fail("not a number in " + label + ": '" + head[j + 1] + "'");
        M(0, j) = v;
      }
      row = 1;
    }
    ++pos;
    for (; row < r; ++row) {
      if (done()) fail("unexpected end of file in block " + label);
      const auto& t = toks();
      if (static_cast<int>(t.size()) != c)
        fail("expected " + std::to_string(c) + " values in row " +
             std::to_string(row + 1) + " of " + label + ", got " +
             std::to_string(t.size()));
      for (int j = 0; j < c; ++j) {
        double v;
        if (!parse_double(t[j], v))
          fail("not a number in " + label + ": '" + t[j] + "'");
        M(row, j) = v;
      }
      ++pos;
    }
    return M;
  }

  std::map<std::string, double> read_metadata() {
    std::map<std::string, double> meta;
    while (!done()) {
      const auto& t = toks();
      double v;
      if (t.size() != 2 || !parse_double(t[1], v))
        fail("expected a 'key value' metadata line");
      meta[t[0]] = v;
      ++pos;
    }
    return meta;
  }
};

void write_block(std::ofstream& f, const char* label, const Matrix& M) {
  f << label << '\n';
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) f << (j ? " " : "") << fmt(M(i, j));
    f << '\n';
  }
}

}  // namespace

SystemFile load_system_file(const std::string& path) {
  BlockFile bf(path, "load_system_file");
  auto dims = bf.read_dims({"n", "m", "p"});
  const int n = dims["n"], m = dims["m"], p = dims["p"];
  // blocks may come in any order; each appears exactly once
  std::map<std::string, Matrix> blocks;
  std::map<std::string, std::pair<int, int>> shape = {
      {"A", {n, n}}, {"B", {n, m}}, {"C", {p, n}}, {"D", {p, m}}};
  while (blocks.size() < 4) {
    if (bf.done()) {
      for (const auto& [lbl, sh] : shape)
        if (!blocks.count(lbl))
          throw std::invalid_argument("load_system_file: missing block " +
                                      lbl);
    }
    const std::string label = bf.toks()[0];
    if (!shape.count(label)) bf.fail("unknown block '" + label + "'");
    if (blocks.count(label)) bf.fail("duplicate block " + label);
    blocks[label] =
        bf.read_block(label, shape[label].first, shape[label].second);
  }
  SystemFile sf{{blocks["A"], blocks["B"], blocks["C"], blocks["D"]},
                bf.read_metadata()};
  return sf;
}

void save_system_file(
    const LtiSystem& sys, const std::string& path,
    const std::vector<std::pair<std::string, double>>& metadata) {
  std::ofstream f(path);
  if (!f)
    throw std::invalid_argument("save_system_file: cannot write " + path);
  f << "n " << sys.n() << "\nm " << sys.m() << "\np " << sys.p() << '\n';
  write_block(f, "A", sys.A);
  write_block(f, "B", sys.B);
  write_block(f, "C", sys.C);
  write_block(f, "D", sys.D);
  for (const auto& [key, value] : metadata)
    f << key << ' ' << fmt(value) << '\n';
}

SupplyRate load_supply_file(const std::string& path) {
  BlockFile bf(path, "load_supply_file");
  auto dims = bf.read_dims({"m", "p"});
  const int m = dims["m"], p = dims["p"];
  Matrix Q = bf.read_block("Q", p, p);
  Matrix S = bf.read_block("S", p, m);
  Matrix R = bf.read_block("R", m, m);
  if (!bf.done()) bf.fail("unexpected content after the R block");
  return custom_supply(std::move(Q), std::move(S), std::move(R));
}

NoiseBoundQuadratic load_noise_file(const std::string& path,
                                    NoiseTarget target) {
  BlockFile bf(path, "load_noise_file");
  auto dims = bf.read_dims({"span", "width"});
  const int span = dims["span"], width = dims["width"];
  Matrix Qn = bf.read_block("Qn", span, span);
  Matrix Sn = bf.read_block("Sn", span, width);
  Matrix Rn = bf.read_block("Rn", width, width);
  if (!bf.done()) bf.fail("unexpected content after the Rn block");
  return NoiseBoundQuadratic(std::move(Qn), std::move(Sn), std::move(Rn),
                             target);
}

void Report::add(const std::string& key, const std::string& value) {
  items.emplace_back(key, value);
}

void Report::add(const std::string& key, double value) {
  items.emplace_back(key, fmt(value));
}

std::string Report::to_text() const {
  std::ostringstream ss;
  for (const auto& [key, value] : items) ss << key << ' ' << value << '\n';
  return ss.str();
}

void Report::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("Report: cannot write " + path);
  f << to_text();
}

}  // namespace ddv
