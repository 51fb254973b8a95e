#include "oarseg/engine/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <zlib.h>

#include "oarseg/engine/run_files.hpp"
#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

constexpr char kMagic[8] = {'O', 'A', 'R', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t off) {
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  return v;
}

std::uint32_t crc(const char* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

std::map<std::string, torch::Tensor> named_state(const Model& m) {
  std::map<std::string, torch::Tensor> out;
  for (const auto& p : m.net().named_parameters(true)) out.emplace(p.key(), p.value());
  for (const auto& b : m.net().named_buffers(true)) out.emplace(b.key(), b.value());
  return out;
}

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "f4";
    case torch::kFloat64: return "f8";
    case torch::kInt64: return "i8";
    default: throw std::runtime_error("unsupported tensor dtype in checkpoint");
  }
}

torch::ScalarType dtype_from(const std::string& s) {
  if (s == "f4") return torch::kFloat32;
  if (s == "f8") return torch::kFloat64;
  if (s == "i8") return torch::kInt64;
  throw CorruptCheckpoint("unknown tensor dtype '" + s + "'");
}

struct Parsed {
  nlohmann::json header;
  std::string bytes;
  std::size_t payload_offset = 0;
};

Parsed parse(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptCheckpoint("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Parsed p;
  p.bytes = ss.str();
  const auto& b = p.bytes;
  constexpr std::size_t fixed = sizeof kMagic + 4 + 8;
  if (b.size() < fixed + 4 || std::memcmp(b.data(), kMagic, sizeof kMagic) != 0) {
    throw CorruptCheckpoint(path.string() + " is not a checkpoint");
  }
  const auto stored_crc = get<std::uint32_t>(b, b.size() - 4);
  if (crc(b.data(), b.size() - 4) != stored_crc) throw CorruptCheckpoint(path.string() + " failed its checksum");
  if (get<std::uint32_t>(b, sizeof kMagic) != kVersion) throw CorruptCheckpoint("unsupported checkpoint version");
  const auto header_len = get<std::uint64_t>(b, sizeof kMagic + 4);
  if (header_len > b.size() - fixed - 4) throw CorruptCheckpoint(path.string() + " is truncated");
  try {
    p.header = nlohmann::json::parse(b.substr(fixed, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint header: ") + e.what());
  }
  p.payload_offset = fixed + header_len;
  return p;
}

ModelConfig header_config(const nlohmann::json& header) {
  try {
    return header.at("model").get<ModelConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint model config: ") + e.what());
  } catch (const InvalidConfig& e) {
    throw CorruptCheckpoint(std::string("checkpoint model config: ") + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const TrainState& s) {
  nlohmann::json j;
  j["epochs_completed"] = s.epochs_completed;
  j["iteration"] = s.iteration;
  j["step_size"] = s.step_size;
  auto curve = [](const std::vector<CurvePoint>& c) {
    auto a = nlohmann::json::array();
    for (const auto& p : c) a.push_back({p.epoch, p.loss, p.mean_dice});
    return a;
  };
  j["train_curve"] = curve(s.curves.train);
  j["val_curve"] = curve(s.curves.val);
  j["class_dice"] = {{"organs", s.class_dice.organs}, {"epochs", s.class_dice.epochs}, {"dice", s.class_dice.dice}};
  if (s.best) {
    j["best"] = {{"epoch", s.best->epoch}, {"val_dice", s.best->val_dice}};
  } else {
    j["best"] = nullptr;
  }
  return j;
}

TrainState train_state_from_json(const nlohmann::json& j) {
  TrainState s;
  s.epochs_completed = j.at("epochs_completed").get<std::int64_t>();
  s.iteration = j.at("iteration").get<std::int64_t>();
  s.step_size = j.at("step_size").get<std::int64_t>();
  auto curve = [](const nlohmann::json& a) {
    std::vector<CurvePoint> c;
    for (const auto& r : a) c.push_back({r.at(0).get<std::int64_t>(), r.at(1).get<double>(), r.at(2).get<double>()});
    return c;
  };
  s.curves.train = curve(j.at("train_curve"));
  s.curves.val = curve(j.at("val_curve"));
  const auto& cd = j.at("class_dice");
  s.class_dice.organs = cd.at("organs").get<std::vector<std::string>>();
  s.class_dice.epochs = cd.at("epochs").get<std::vector<std::int64_t>>();
  s.class_dice.dice = cd.at("dice").get<std::vector<std::vector<double>>>();
  if (!j.at("best").is_null()) {
    s.best = BestEpoch{j.at("best").at("epoch").get<std::int64_t>(), j.at("best").at("val_dice").get<double>()};
  }
  return s;
}

void save_checkpoint(const Model& m, const TrainState& state, const std::filesystem::path& path) {
  const auto tensors = named_state(m);
  nlohmann::json index = nlohmann::json::array();
  std::string payload;
  for (const auto& [name, t] : tensors) {
    const auto c = t.detach().to(torch::kCPU).contiguous();
    const auto nbytes = static_cast<std::size_t>(c.numel()) * c.element_size();
    index.push_back({{"name", name}, {"dtype", dtype_name(c.scalar_type())}, {"shape", c.sizes().vec()},
                     {"offset", payload.size()}, {"nbytes", nbytes}});
    payload.append(static_cast<const char*>(c.data_ptr()), nbytes);
  }
  nlohmann::json header;
  header["model"] = m.config();
  header["state"] = to_json(state);
  header["tensors"] = std::move(index);
  const auto header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  out += payload;
  put<std::uint32_t>(out, crc(out.data(), out.size()));
  atomic_write(path, out);
}

ModelConfig peek_checkpoint_config(const std::filesystem::path& path) { return header_config(parse(path).header); }

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
  const auto p = parse(path);
  const auto cfg = header_config(p.header);
  if (expected && !(*expected == cfg)) {
    throw ConfigMismatch("checkpoint " + path.string() + " holds a " + std::string(to_string(cfg.variant)) +
                         " with " + std::to_string(cfg.num_classes) + " classes, which differs from the requested model");
  }
  auto model = build_model(cfg);
  auto tensors = named_state(model);
  const auto payload_size = p.bytes.size() - 4 - p.payload_offset;
  try {
    const auto& index = p.header.at("tensors");
    if (index.size() != tensors.size()) throw CorruptCheckpoint("checkpoint tensor count does not match the model");
    torch::NoGradGuard guard;
    for (const auto& e : index) {
      const auto name = e.at("name").get<std::string>();
      const auto it = tensors.find(name);
      if (it == tensors.end()) throw CorruptCheckpoint("checkpoint holds unknown tensor '" + name + "'");
      const auto dtype = dtype_from(e.at("dtype").get<std::string>());
      const auto shape = e.at("shape").get<std::vector<std::int64_t>>();
      const auto offset = e.at("offset").get<std::size_t>();
      const auto nbytes = e.at("nbytes").get<std::size_t>();
      auto& dst = it->second;
      if (dtype != dst.scalar_type() || shape != dst.sizes().vec()) {
        throw CorruptCheckpoint("tensor '" + name + "' has the wrong dtype or shape");
      }
      if (offset > payload_size || nbytes > payload_size - offset ||
          nbytes != static_cast<std::size_t>(dst.numel()) * dst.element_size()) {
        throw CorruptCheckpoint("tensor '" + name + "' lies outside the payload");
      }
      auto src = torch::from_blob(const_cast<char*>(p.bytes.data() + p.payload_offset + offset), shape,
                                  torch::TensorOptions().dtype(dtype));
      dst.copy_(src);
    }
    return LoadedCheckpoint{std::move(model), train_state_from_json(p.header.at("state"))};
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint index: ") + e.what());
  }
}

}  // namespace oarseg
