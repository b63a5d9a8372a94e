#pragma once

// ISPD2005 Bookshelf reader/writer.
//
// Pin offsets in .nets are relative to the node center; internally they are
// stored relative to the lower-left corner.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/synthetic.hpp"

namespace gsplace {

/// A movable node taller than this many modal cell heights is a movable macro.
inline constexpr double kMacroHeightFactor = 4.0;

namespace bookshelf_detail {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

/// Non-empty, comment-stripped lines split on whitespace; ':' is its own token.
class TokenFile {
 public:
  explicit TokenFile(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path_ + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text_ = ss.str();
    std::size_t pos = 0, number = 0;
    while (pos < text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string::npos) end = text_.size();
      ++number;
      std::string_view row(text_.data() + pos, end - pos);
      if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
      Line line{number, split(row)};
      if (!line.tokens.empty()) lines_.push_back(std::move(line));
      pos = end + 1;
    }
  }

  const std::string& path() const noexcept { return path_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }

  [[noreturn]] void fail(const Line& l, const std::string& what) const {
    throw ParseError(path_, l.number, what);
  }
  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw ParseError(path_, line, what);
  }

  double number(const Line& l, std::size_t k) const {
    if (k >= l.tokens.size()) fail(l, "missing numeric field");
    const std::string_view t = l.tokens[k];
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
      fail(l, "expected a number, got '" + std::string(t) + "'");
    return v;
  }

  long integer(const Line& l, std::size_t k) const {
    const double v = number(l, k);
    if (v != std::floor(v) || v < 0.0 || v > 1e12)
      fail(l, "expected a non-negative integer, got '" + std::string(l.tokens[k]) + "'");
    return static_cast<long>(v);
  }

  /// Value of a "Key : value" line, or nullopt if the line is not that key.
  std::optional<long> keyed(const Line& l, std::string_view key) const {
    if (l.tokens.empty() || l.tokens[0] != key) return std::nullopt;
    if (l.tokens.size() != 3 || l.tokens[1] != ":") fail(l, "expected '" + std::string(key) + " : <n>'");
    return integer(l, 2);
  }

  /// True if the line is the format header ("UCLA <kind> 1.0").
  static bool is_header(const Line& l) { return l.tokens[0] == "UCLA"; }

 private:
  static std::vector<std::string_view> split(std::string_view row) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < row.size()) {
      while (i < row.size() && ws(row[i])) ++i;
      if (i >= row.size()) break;
      if (row[i] == ':') {
        out.push_back(row.substr(i, 1));
        ++i;
        continue;
      }
      const std::size_t b = i;
      while (i < row.size() && !ws(row[i]) && row[i] != ':') ++i;
      out.push_back(row.substr(b, i - b));
    }
    return out;
  }

  std::string path_;
  std::string text_;
  std::vector<Line> lines_;
};

struct RawNode {
  std::string name;
  double width = 0.0, height = 0.0;
  bool terminal = false;
  bool terminal_ni = false;
  bool fixed_in_pl = false;
  Point position;
};

}  // namespace bookshelf_detail

/// Files named by an .aux, resolved relative to its directory.
struct AuxFiles {
  std::filesystem::path nodes, nets, pl, scl, wts;
};

inline AuxFiles read_aux(const std::filesystem::path& aux) {
  bookshelf_detail::TokenFile f(aux);
  AuxFiles out;
  const auto dir = aux.parent_path();
  for (const auto& l : f.lines()) {
    for (std::size_t k = 0; k < l.tokens.size(); ++k) {
      const std::filesystem::path p(std::string(l.tokens[k]));
      const std::string ext = p.extension().string();
      if (ext == ".nodes") out.nodes = dir / p;
      else if (ext == ".nets") out.nets = dir / p;
      else if (ext == ".pl") out.pl = dir / p;
      else if (ext == ".scl") out.scl = dir / p;
      else if (ext == ".wts") out.wts = dir / p;
    }
  }
  if (out.nodes.empty() || out.nets.empty() || out.pl.empty())
    throw ParseError(aux.string(), f.lines().empty() ? 0 : f.lines().back().number,
                     "aux must list .nodes, .nets and .pl files");
  return out;
}

namespace bookshelf_detail {

inline std::vector<RawNode> read_nodes(const std::filesystem::path& path,
                                       std::unordered_map<std::string, std::size_t>& index) {
  TokenFile f(path);
  std::vector<RawNode> nodes;
  std::optional<long> num_nodes, num_terminals;
  std::size_t last_line = 0;
  for (const auto& l : f.lines()) {
    last_line = l.number;
    if (TokenFile::is_header(l)) continue;
    if (auto v = f.keyed(l, "NumNodes")) { num_nodes = v; continue; }
    if (auto v = f.keyed(l, "NumTerminals")) { num_terminals = v; continue; }
    if (l.tokens.size() < 3 || l.tokens.size() > 4) f.fail(l, "expected '<name> <width> <height> [terminal]'");
    RawNode n;
    n.name = std::string(l.tokens[0]);
    n.width = f.number(l, 1);
    n.height = f.number(l, 2);
    if (n.width < 0.0 || n.height < 0.0) f.fail(l, "negative node size for '" + n.name + "'");
    if (l.tokens.size() == 4) {
      if (l.tokens[3] == "terminal") n.terminal = true;
      else if (l.tokens[3] == "terminal_NI") n.terminal = n.terminal_ni = true;
      else f.fail(l, "unknown node attribute '" + std::string(l.tokens[3]) + "'");
    }
    if (!index.emplace(n.name, nodes.size()).second) f.fail(l, "duplicate node '" + n.name + "'");
    nodes.push_back(std::move(n));
  }
  if (num_nodes && static_cast<std::size_t>(*num_nodes) != nodes.size())
    f.fail(last_line, "NumNodes is " + std::to_string(*num_nodes) + " but " +
                          std::to_string(nodes.size()) + " nodes were declared");
  if (num_terminals) {
    const auto t = std::count_if(nodes.begin(), nodes.end(), [](const RawNode& n) { return n.terminal; });
    if (t != *num_terminals)
      f.fail(last_line, "NumTerminals is " + std::to_string(*num_terminals) + " but " +
                            std::to_string(t) + " terminals were declared");
  }
  return nodes;
}

struct RawPin {
  std::size_t node;
  double dx, dy;  // center-relative
};
struct RawNet {
  std::string name;
  std::vector<RawPin> pins;
};

inline std::vector<RawNet> read_nets(const std::filesystem::path& path,
                                     const std::unordered_map<std::string, std::size_t>& index) {
  TokenFile f(path);
  std::vector<RawNet> nets;
  std::optional<long> num_nets, num_pins;
  std::size_t expected = 0, pin_total = 0, open_line = 0, last_line = 0;
  for (const auto& l : f.lines()) {
    last_line = l.number;
    if (TokenFile::is_header(l)) continue;
    if (auto v = f.keyed(l, "NumNets")) { num_nets = v; continue; }
    if (auto v = f.keyed(l, "NumPins")) { num_pins = v; continue; }
    if (l.tokens[0] == "NetDegree") {
      if (expected != 0) f.fail(open_line, "net declares more pins than it lists");
      if (l.tokens.size() < 3 || l.tokens.size() > 4 || l.tokens[1] != ":")
        f.fail(l, "expected 'NetDegree : <n> [name]'");
      expected = static_cast<std::size_t>(f.integer(l, 2));
      RawNet net;
      net.name = l.tokens.size() == 4 ? std::string(l.tokens[3]) : "net" + std::to_string(nets.size());
      nets.push_back(std::move(net));
      open_line = l.number;
      if (expected == 0) f.fail(l, "net '" + nets.back().name + "' has degree 0");
      continue;
    }
    if (expected == 0) f.fail(l, "pin line outside of a net");
    // <node> <dir> [: <dx> <dy>]
    if (l.tokens.size() != 2 && l.tokens.size() != 5) f.fail(l, "expected '<node> <I|O|B> [: <dx> <dy>]'");
    const auto it = index.find(std::string(l.tokens[0]));
    if (it == index.end()) f.fail(l, "pin references undeclared node '" + std::string(l.tokens[0]) + "'");
    RawPin pin{it->second, 0.0, 0.0};
    if (l.tokens.size() == 5) {
      if (l.tokens[2] != ":") f.fail(l, "expected ':' before pin offsets");
      pin.dx = f.number(l, 3);
      pin.dy = f.number(l, 4);
    }
    nets.back().pins.push_back(pin);
    --expected;
    ++pin_total;
  }
  if (expected != 0) f.fail(last_line, "file ends inside net '" + nets.back().name + "'");
  if (num_nets && static_cast<std::size_t>(*num_nets) != nets.size())
    f.fail(last_line, "NumNets is " + std::to_string(*num_nets) + " but " + std::to_string(nets.size()) +
                          " nets were listed");
  if (num_pins && static_cast<std::size_t>(*num_pins) != pin_total)
    f.fail(last_line, "NumPins is " + std::to_string(*num_pins) + " but " + std::to_string(pin_total) +
                          " pins were listed");
  return nets;
}

/// Applies a .pl file; returns per-node "seen" flags.
inline void read_pl_into(const std::filesystem::path& path,
                         const std::unordered_map<std::string, std::size_t>& index,
                         std::vector<RawNode>& nodes) {
  TokenFile f(path);
  for (const auto& l : f.lines()) {
    if (TokenFile::is_header(l)) continue;
    if (l.tokens.size() < 3) f.fail(l, "expected '<name> <x> <y> [: <orient>] [/FIXED]'");
    const auto it = index.find(std::string(l.tokens[0]));
    if (it == index.end()) f.fail(l, "placement for undeclared node '" + std::string(l.tokens[0]) + "'");
    RawNode& n = nodes[it->second];
    n.position = {f.number(l, 1), f.number(l, 2)};
    std::size_t k = 3;
    if (k < l.tokens.size() && l.tokens[k] == ":") {
      if (k + 1 >= l.tokens.size()) f.fail(l, "missing orientation after ':'");
      k += 2;
    }
    for (; k < l.tokens.size(); ++k) {
      if (l.tokens[k] == "/FIXED" || l.tokens[k] == "/FIXED_NI") n.fixed_in_pl = true;
      else f.fail(l, "unexpected token '" + std::string(l.tokens[k]) + "'");
    }
  }
}

inline std::optional<Region> read_scl(const std::filesystem::path& path) {
  TokenFile f(path);
  std::optional<Region> region;
  std::optional<long> num_rows;
  long rows = 0;
  bool in_row = false;
  double coord = 0.0, height = 0.0, site_w = 1.0, site_sp = 0.0, origin = 0.0;
  long sites = 0;
  bool have_origin = false;
  std::size_t last_line = 0;
  for (const auto& l : f.lines()) {
    last_line = l.number;
    if (TokenFile::is_header(l)) continue;
    if (auto v = f.keyed(l, "NumRows")) { num_rows = v; continue; }
    const std::string_view key = l.tokens[0];
    if (key == "CoreRow") {
      if (in_row) f.fail(l, "CoreRow without End");
      in_row = true;
      coord = height = origin = 0.0;
      site_w = 1.0;
      site_sp = 0.0;
      sites = 0;
      have_origin = false;
      continue;
    }
    if (!in_row) f.fail(l, "row attribute outside of a CoreRow block");
    if (key == "End") {
      if (!have_origin) f.fail(l, "row has no SubrowOrigin");
      const double pitch = site_sp > 0.0 ? site_sp : site_w;
      const Region r{origin, coord, origin + pitch * static_cast<double>(sites), coord + height};
      if (!region) region = r;
      else
        region = Region{std::min(region->xmin, r.xmin), std::min(region->ymin, r.ymin),
                        std::max(region->xmax, r.xmax), std::max(region->ymax, r.ymax)};
      in_row = false;
      ++rows;
      continue;
    }
    if (l.tokens.size() < 3 || l.tokens[1] != ":") f.fail(l, "expected '<key> : <value>'");
    if (key == "Coordinate") coord = f.number(l, 2);
    else if (key == "Height") height = f.number(l, 2);
    else if (key == "Sitewidth") site_w = f.number(l, 2);
    else if (key == "Sitespacing") site_sp = f.number(l, 2);
    else if (key == "Siteorient" || key == "Sitesymmetry") continue;
    else if (key == "SubrowOrigin") {
      origin = f.number(l, 2);
      have_origin = true;
      if (l.tokens.size() == 6 && l.tokens[3] == "NumSites" && l.tokens[4] == ":")
        sites = f.integer(l, 5);
      else if (l.tokens.size() != 3)
        f.fail(l, "expected 'SubrowOrigin : <x> NumSites : <n>'");
    } else if (key == "NumSites") sites = f.integer(l, 2);
    else f.fail(l, "unknown row attribute '" + std::string(key) + "'");
  }
  if (in_row) f.fail(last_line, "file ends inside a CoreRow block");
  if (num_rows && *num_rows != rows)
    f.fail(last_line, "NumRows is " + std::to_string(*num_rows) + " but " + std::to_string(rows) +
                          " rows were listed");
  return region;
}

/// Net weights from a .wts file keyed by net name (node-weight entries are ignored).
inline std::unordered_map<std::string, double> read_wts(const std::filesystem::path& path) {
  TokenFile f(path);
  std::unordered_map<std::string, double> w;
  for (const auto& l : f.lines()) {
    if (TokenFile::is_header(l)) continue;
    if (l.tokens.size() != 2) f.fail(l, "expected '<name> <weight>'");
    const double v = f.number(l, 1);
    if (!(v > 0.0)) f.fail(l, "weight must be > 0");
    w[std::string(l.tokens[0])] = v;
  }
  return w;
}

inline double modal_height(const std::vector<RawNode>& nodes) {
  std::map<double, std::size_t> hist;
  for (const auto& n : nodes)
    if (!n.terminal && !n.fixed_in_pl && n.height > 0.0) ++hist[n.height];
  double best = 0.0;
  std::size_t count = 0;
  for (const auto& [h, c] : hist)
    if (c > count) best = h, count = c;
  return best;
}

}  // namespace bookshelf_detail

/// Parses an ISPD2005-style Bookshelf design from its .aux file.
inline DesignBundle parse_design(const std::filesystem::path& aux) {
  using namespace bookshelf_detail;
  const AuxFiles files = read_aux(aux);
  std::unordered_map<std::string, std::size_t> index;
  std::vector<RawNode> nodes = read_nodes(files.nodes, index);
  const std::vector<RawNet> raw_nets = read_nets(files.nets, index);
  read_pl_into(files.pl, index, nodes);

  std::optional<Region> region;
  if (!files.scl.empty()) region = read_scl(files.scl);
  if (!region) {
    if (nodes.empty()) throw ParseError(files.nodes.string(), 0, "no rows and no nodes: region undefined");
    Region r{nodes[0].position.x, nodes[0].position.y, nodes[0].position.x, nodes[0].position.y};
    for (const auto& n : nodes) {
      r.xmin = std::min(r.xmin, n.position.x);
      r.ymin = std::min(r.ymin, n.position.y);
      r.xmax = std::max(r.xmax, n.position.x + n.width);
      r.ymax = std::max(r.ymax, n.position.y + n.height);
    }
    region = r;
  }
  if (!(region->width() > 0.0 && region->height() > 0.0))
    throw ParseError((files.scl.empty() ? files.pl : files.scl).string(), 0, "placement region is empty");

  const double modal = modal_height(nodes);
  std::vector<Instance> inst;
  inst.reserve(nodes.size());
  for (const auto& n : nodes) {
    InstanceKind kind = InstanceKind::kMovableCell;
    if (n.terminal || n.fixed_in_pl) {
      const bool pin_like = n.terminal_ni || n.width * n.height == 0.0 ||
                            (modal > 0.0 && n.height <= modal && n.width <= kMacroHeightFactor * modal);
      kind = pin_like ? InstanceKind::kIoPin : InstanceKind::kFixedMacro;
    } else if (modal > 0.0 && n.height > kMacroHeightFactor * modal) {
      kind = InstanceKind::kMovableMacro;
    }
    inst.push_back({n.name, n.width, n.height, kind, n.position});
  }

  std::unordered_map<std::string, double> weights;
  if (!files.wts.empty() && std::filesystem::exists(files.wts)) weights = read_wts(files.wts);
  std::vector<Net> nets;
  nets.reserve(raw_nets.size());
  for (const auto& rn : raw_nets) {
    Net net;
    net.name = rn.name;
    if (const auto it = weights.find(rn.name); it != weights.end()) net.weight = it->second;
    for (const auto& p : rn.pins)
      net.pins.push_back({p.node, p.dx + 0.5 * inst[p.node].width, p.dy + 0.5 * inst[p.node].height});
    nets.push_back(std::move(net));
  }

  DesignBundle b{Netlist(std::move(inst), std::move(nets), *region), {}, aux.string()};
  b.positions = b.netlist.initial_positions();
  return b;
}

namespace bookshelf_detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace bookshelf_detail

/// Writes lower-left positions as a Bookshelf .pl; fixed instances carry /FIXED.
inline void write_pl(const Netlist& nl, const std::vector<Point>& lower_left,
                     const std::filesystem::path& path) {
  using bookshelf_detail::fmt6;
  if (lower_left.size() != nl.size()) throw ConfigError("position count does not match the netlist");
  auto out = bookshelf_detail::open_out(path);
  out << "UCLA pl 1.0\n";
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    out << inst.name << ' ' << fmt6(lower_left[i].x) << ' ' << fmt6(lower_left[i].y) << " : N";
    if (inst.fixed()) out << " /FIXED";
    out << '\n';
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

/// Reads a .pl against an existing netlist; unlisted instances keep their loaded position.
inline std::vector<Point> read_pl(const Netlist& nl, const std::filesystem::path& path) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<bookshelf_detail::RawNode> nodes(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    index.emplace(nl.instance(i).name, i);
    nodes[i].position = nl.instance(i).position;
  }
  bookshelf_detail::read_pl_into(path, index, nodes);
  std::vector<Point> p(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) p[i] = nodes[i].position;
  return p;
}

/// Exports a design as <dir>/<name>.{aux,nodes,nets,pl,scl}.
inline std::filesystem::path write_design(const Netlist& nl, const std::vector<Point>& lower_left,
                                          const std::filesystem::path& dir, const std::string& name) {
  using bookshelf_detail::fmt6;
  std::filesystem::create_directories(dir);
  {
    auto out = bookshelf_detail::open_out(dir / (name + ".aux"));
    out << "RowBasedPlacement : " << name << ".nodes " << name << ".nets " << name << ".pl " << name
        << ".scl\n";
  }
  {
    auto out = bookshelf_detail::open_out(dir / (name + ".nodes"));
    out << "UCLA nodes 1.0\n\nNumNodes : " << nl.size() << "\nNumTerminals : " << nl.fixed_count() << "\n";
    for (const Instance& inst : nl.instances()) {
      out << inst.name << ' ' << fmt6(inst.width) << ' ' << fmt6(inst.height);
      if (inst.fixed()) out << " terminal";
      out << '\n';
    }
  }
  {
    auto out = bookshelf_detail::open_out(dir / (name + ".nets"));
    out << "UCLA nets 1.0\n\nNumNets : " << nl.nets().size() << "\nNumPins : " << nl.pin_count() << "\n";
    for (const Net& net : nl.nets()) {
      out << "NetDegree : " << net.pins.size() << ' ' << net.name << '\n';
      for (const Pin& p : net.pins) {
        const Instance& inst = nl.instance(p.instance);
        out << inst.name << " B : " << fmt6(p.dx - 0.5 * inst.width) << ' ' << fmt6(p.dy - 0.5 * inst.height)
            << '\n';
      }
    }
  }
  write_pl(nl, lower_left, dir / (name + ".pl"));
  {
    const Region& r = nl.region();
    const int rows = std::max(1, static_cast<int>(std::lround(r.height())));
    const long sites = std::max(1L, std::lround(r.width()));
    const double rh = r.height() / rows, sw = r.width() / static_cast<double>(sites);
    auto out = bookshelf_detail::open_out(dir / (name + ".scl"));
    out << "UCLA scl 1.0\n\nNumRows : " << rows << "\n";
    for (int k = 0; k < rows; ++k) {
      out << "CoreRow Horizontal\n  Coordinate : " << fmt6(r.ymin + k * rh) << "\n  Height : " << fmt6(rh)
          << "\n  Sitewidth : " << fmt6(sw) << "\n  Sitespacing : " << fmt6(sw)
          << "\n  Siteorient : 1\n  Sitesymmetry : 1\n  SubrowOrigin : " << fmt6(r.xmin)
          << " NumSites : " << sites << "\nEnd\n";
    }
  }
  return dir / (name + ".aux");
}

}  // namespace gsplace
