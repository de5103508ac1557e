#include "marlot/marl/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace marlot::marl {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'T', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw CheckpointError("checkpoint truncated");
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32_le(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

float read_f32_le(std::istream& is) {
  const std::uint32_t bits = read_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void Checkpoint::expect_compatible(int n_agents_wanted,
                                   int obs_dim_wanted) const {
  if (n_agents != n_agents_wanted) {
    throw CheckpointError("checkpoint trained for " + std::to_string(n_agents) +
                          " agents, run requires " +
                          std::to_string(n_agents_wanted));
  }
  if (obs_dim != obs_dim_wanted) {
    throw CheckpointError("checkpoint observation dim " +
                          std::to_string(obs_dim) + " does not match " +
                          std::to_string(obs_dim_wanted));
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::ordered_json header;
  header["version"] = ckpt.version;
  header["algo"] = ckpt.algo;
  header["n_agents"] = ckpt.n_agents;
  header["learned_evader"] = ckpt.learned_evader;
  header["obs_dim"] = ckpt.obs_dim;
  header["act_dim"] = ckpt.act_dim;
  header["hidden"] = ckpt.hidden;
  header["seed"] = ckpt.seed;
  header["episodes"] = ckpt.episodes;
  header["final_noise"] = ckpt.final_noise;
  header["reward_curve"] = ckpt.reward_curve;
  auto nets = nlohmann::ordered_json::array();
  for (const auto& blob : ckpt.actors) {
    nets.push_back({{"name", blob.name}, {"count", blob.values.size()}});
  }
  header["nets"] = nets;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  const std::string header_str = header.dump();
  write_u32(os, static_cast<std::uint32_t>(header_str.size()));
  os.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& blob : ckpt.actors) {
    for (float v : blob.values) write_f32_le(os, v);
  }
  if (!os) throw CheckpointError("write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw CheckpointError("not a checkpoint file: " + path);
  }
  const std::uint32_t header_len = read_u32(is);
  std::string header_str(header_len, '\0');
  if (!is.read(header_str.data(), header_len)) {
    throw CheckpointError("checkpoint header truncated");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError("corrupt checkpoint header");
  }

  Checkpoint ckpt;
  try {
    ckpt.version = header.at("version").get<int>();
    if (ckpt.version != Checkpoint::kVersion) {
      throw CheckpointError("unsupported checkpoint version " +
                            std::to_string(ckpt.version));
    }
    ckpt.algo = header.at("algo").get<std::string>();
    ckpt.n_agents = header.at("n_agents").get<int>();
    ckpt.learned_evader = header.at("learned_evader").get<bool>();
    ckpt.obs_dim = header.at("obs_dim").get<int>();
    ckpt.act_dim = header.at("act_dim").get<int>();
    ckpt.hidden = header.at("hidden").get<int>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.episodes = header.at("episodes").get<int>();
    ckpt.final_noise = header.at("final_noise").get<double>();
    ckpt.reward_curve = header.at("reward_curve").get<std::vector<double>>();
    for (const auto& net : header.at("nets")) {
      Checkpoint::NetBlob blob;
      blob.name = net.at("name").get<std::string>();
      blob.values.resize(net.at("count").get<std::size_t>());
      ckpt.actors.push_back(std::move(blob));
    }
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError("corrupt checkpoint header fields");
  }

  for (auto& blob : ckpt.actors) {
    for (auto& v : blob.values) v = read_f32_le(is);
  }
  // must be exactly at EOF
  char extra;
  if (is.read(&extra, 1)) {
    throw CheckpointError("trailing bytes in checkpoint");
  }
  return ckpt;
}

}  // namespace marlot::marl
