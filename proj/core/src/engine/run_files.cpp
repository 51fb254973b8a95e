#include "oarseg/engine/run_files.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::filesystem::path RunPaths::report_json(SplitName split) const {
  auto p = report_stem(split);
  p += ".json";
  return p;
}

std::filesystem::path runs_root(const std::optional<std::filesystem::path>& explicit_root) {
  if (explicit_root) return *explicit_root;
  if (const char* env = std::getenv("OARSEG_RUNS_DIR"); env != nullptr && *env != '\0') return env;
  return "runs";
}

RunPaths run_paths(const std::filesystem::path& root, std::string_view run_name) {
  return RunPaths{root / std::string(run_name)};
}

void atomic_write(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_curves(const std::filesystem::path& path, const Curves& c) {
  std::string out = "epoch,split,loss,mean_dice\n";
  std::size_t v = 0;
  for (const auto& p : c.train) {
    out += std::to_string(p.epoch) + ",train," + g17(p.loss) + "," + g17(p.mean_dice) + "\n";
    while (v < c.val.size() && c.val[v].epoch <= p.epoch) {
      const auto& q = c.val[v++];
      out += std::to_string(q.epoch) + ",val," + g17(q.loss) + "," + g17(q.mean_dice) + "\n";
    }
  }
  for (; v < c.val.size(); ++v) {
    const auto& q = c.val[v];
    out += std::to_string(q.epoch) + ",val," + g17(q.loss) + "," + g17(q.mean_dice) + "\n";
  }
  atomic_write(path, out);
}

Curves read_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingCurves("no curves at " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "epoch,split,loss,mean_dice") {
    throw MissingCurves(path.string() + " has an unexpected header");
  }
  Curves c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw MissingCurves(path.string() + ": malformed row '" + line + "'");
    try {
      CurvePoint p{std::stoll(cells[0]), std::stod(cells[2]), std::stod(cells[3])};
      if (cells[1] == "train") {
        c.train.push_back(p);
      } else if (cells[1] == "val") {
        c.val.push_back(p);
      } else {
        throw MissingCurves(path.string() + ": unknown split '" + cells[1] + "'");
      }
    } catch (const std::logic_error&) {
      throw MissingCurves(path.string() + ": malformed row '" + line + "'");
    }
  }
  return c;
}

void write_class_dice(const std::filesystem::path& path, const ClassDiceTable& t) {
  std::string out = "epoch";
  for (const auto& o : t.organs) out += "," + o;
  out += "\n";
  for (std::size_t r = 0; r < t.epochs.size(); ++r) {
    out += std::to_string(t.epochs[r]);
    for (double d : t.dice[r]) out += "," + g17(d);
    out += "\n";
  }
  atomic_write(path, out);
}

ClassDiceTable read_class_dice(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingCurves("no per-class curves at " + path.string());
  std::string line;
  ClassDiceTable t;
  if (!std::getline(in, line)) throw MissingCurves(path.string() + " is empty");
  auto head = split_csv(line);
  if (head.empty() || head[0] != "epoch") throw MissingCurves(path.string() + " has an unexpected header");
  t.organs.assign(head.begin() + 1, head.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != head.size()) throw MissingCurves(path.string() + ": malformed row");
    t.epochs.push_back(std::stoll(cells[0]));
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
    t.dice.push_back(std::move(row));
  }
  return t;
}

}  // namespace oarseg
